//! Euler-Lagrange residuals for the full and reduced systems, force stress
//! tensors, and the zero-length-scale algebraic limit system.
//!
//! Residuals are reported nodally at interior nodes; the boundary entries of
//! an [`ElResidual`] are zero (boundary defects belong to the constraint
//! sets, not to the field equations). The full system is evaluated in its
//! expanded form with 3-point second differences; the reduced system is
//! evaluated through the stress field, whose central difference is the exact
//! adjoint of the discrete energy gradient (factor `h` on the force part,
//! `4h` on the moment part at `l_c = 0`).

use crate::discretize::diff_energy;
use crate::model::{self, Field, Params, ShearState};
use crate::{Error, Result};

/// Nodal residuals of balance of forces and balance of angular momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct ElResidual {
    pub force: Field,
    pub moment: Field,
}

impl ElResidual {
    /// Max norm over interior nodes.
    pub fn max_interior(&self) -> f64 {
        let n = self.force.len();
        self.force[1..n - 1]
            .iter()
            .chain(self.moment[1..n - 1].iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// The constant `zeta = (1 + alpha_d^2) u'(0) - alpha_d^3` of the algebraic
/// limit system; `mu * zeta` is the stress level shared by all of its roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaConstant {
    pub zeta: f64,
}

impl ZetaConstant {
    pub fn new(u_prime_0: f64, alpha_d: f64) -> Self {
        Self { zeta: (1.0 + alpha_d * alpha_d) * u_prime_0 - alpha_d.powi(3) }
    }

    /// Uses the state's first-order boundary slope, matching the energy
    /// discretization.
    pub fn from_state(state: &ShearState, alpha_d: f64) -> Self {
        let p0 = (state.u[1] - state.u[0]) / state.grid.h;
        Self::new(p0, alpha_d)
    }
}

/// Force stress `tau = dW/du'` of the exact energy:
/// `mu [u' + sin(a)(sin(a) u' - 4 sin^2(a/2))] + mu_c cos(a)[cos(a) u' - 2 sin(a)]`.
pub fn stress_full(u_prime: f64, alpha: f64, p: &Params) -> f64 {
    model::w_full_dp(u_prime, alpha, p)
}

/// Reduced force stress `tau_red = dW_red/du'`:
/// `mu [u' - a^2(a - u')] + mu_c (2-a^2)/2 [(2-a^2)/2 u' - (6a - a^3)/3]`.
pub fn stress_reduced(u_prime: f64, alpha: f64, p: &Params) -> f64 {
    model::w_red3_dp(u_prime, alpha, p)
}

/// Nodal stress field of a state, using the energy-path differentiation.
/// Constant for solutions of balance of forces.
pub fn stress_field(state: &ShearState, p: &Params, kind: model::Kind) -> Field {
    let up = diff_energy(&state.u, &state.grid);
    up.iter()
        .zip(&state.alpha)
        .map(|(&pi, &ai)| match kind {
            model::Kind::Full => stress_full(pi, ai, p),
            model::Kind::Reduced => stress_reduced(pi, ai, p),
        })
        .collect()
}

fn check_min_nodes(state: &ShearState) -> Result<()> {
    if state.grid.n < 5 {
        return Err(Error::TooFewNodes { needed: 5, got: state.grid.n });
    }
    Ok(())
}

fn second_difference(f: &[f64], i: usize, h: f64) -> f64 {
    (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
}

/// Residuals of the exact Euler-Lagrange system in expanded form:
///
/// ```text
/// force_i  = [2 mu + (mu_c - mu) cos^2(a)] u'' - rhs_force
/// moment_i = 4 mu lc^2 a'' - (cos(a) u' - 2 sin(a)) [(mu - mu_c)(sin(a) u' - 4 sin^2(a/2)) - 2 mu_c]
/// ```
///
/// with 3-point second differences and central first derivatives.
pub fn el_residual_full(state: &ShearState, p: &Params) -> Result<ElResidual> {
    check_min_nodes(state)?;
    let g = &state.grid;
    let n = g.n;
    let up = diff_energy(&state.u, g);
    let ap = diff_energy(&state.alpha, g);
    let mut force = vec![0.0; n];
    let mut moment = vec![0.0; n];
    for i in 1..n - 1 {
        let a = state.alpha[i];
        let (s, c) = a.sin_cos();
        let u2 = second_difference(&state.u, i, g.h);
        let a2 = second_difference(&state.alpha, i, g.h);
        let coeff = 2.0 * p.mu + (p.mu_c - p.mu) * c * c;
        let rhs_force =
            (2.0 * (p.mu_c - p.mu) * (s * c * up[i] + c * c - s * s) + 2.0 * p.mu * c) * ap[i];
        force[i] = coeff * u2 - rhs_force;

        let sq = s * up[i] - 2.0 * (1.0 - c);
        let cq = c * up[i] - 2.0 * s;
        let rhs_moment = cq * ((p.mu - p.mu_c) * sq - 2.0 * p.mu_c);
        moment[i] = 4.0 * p.mu * p.l_c * p.l_c * a2 - rhs_moment;
    }
    Ok(ElResidual { force, moment })
}

fn stress_red2(pr: f64, a: f64, p: &Params) -> f64 {
    p.mu * (pr - a * a * (a - pr)) + p.mu_c * ((1.0 - a * a) * pr + 4.0 * a.powi(3) / 3.0 - 2.0 * a)
}

fn w_red2_da(pr: f64, a: f64, p: &Params) -> f64 {
    p.mu * a * (a - pr) * (2.0 * a - pr)
        + p.mu_c * (-a * pr * pr + 4.0 * a * a * pr - 2.0 * pr + 4.0 * a - 8.0 * a.powi(3) / 3.0)
}

/// Residuals of the reduced Euler-Lagrange system. With
/// `include_underlined = true` these are the equations of the completed
/// square `Wred3`; without, the higher-order terms are dropped (`Wred2`).
///
/// The force part is assembled as `-d(tau_red)/dx` through the nodal stress
/// field; at interior nodes `h * force_i` equals the discrete energy
/// gradient exactly, and `4 h * moment_i` does at `l_c = 0`.
pub fn el_residual_reduced(
    state: &ShearState,
    p: &Params,
    include_underlined: bool,
) -> Result<ElResidual> {
    check_min_nodes(state)?;
    let g = &state.grid;
    let n = g.n;
    let up = diff_energy(&state.u, g);
    let sigma: Vec<f64> = (0..n)
        .map(|i| {
            if include_underlined {
                stress_reduced(up[i], state.alpha[i], p)
            } else {
                stress_red2(up[i], state.alpha[i], p)
            }
        })
        .collect();
    let mut force = vec![0.0; n];
    let mut moment = vec![0.0; n];
    for i in 1..n - 1 {
        force[i] = -(sigma[i + 1] - sigma[i - 1]) / (2.0 * g.h);
        let a2 = second_difference(&state.alpha, i, g.h);
        let w_a = if include_underlined {
            model::w_red3_da(up[i], state.alpha[i], p)
        } else {
            w_red2_da(up[i], state.alpha[i], p)
        };
        moment[i] = 0.25 * (w_a - 4.0 * p.mu * p.l_c * p.l_c * a2);
    }
    Ok(ElResidual { force, moment })
}

/// Residuals of the purely algebraic limit system (`l_c = mu_c = 0`):
///
/// ```text
/// force_i  = (u' - zeta)(u' + u'^3/8 - zeta)
/// moment_i = alpha (alpha - u')(alpha - u'/2)
/// ```
pub fn algebraic_residual(state: &ShearState, p: &Params, zeta: ZetaConstant) -> ElResidual {
    debug_assert_eq!(p.l_c, 0.0, "algebraic system assumes l_c = 0");
    debug_assert_eq!(p.mu_c, 0.0, "algebraic system assumes mu_c = 0");
    let g = &state.grid;
    let up = diff_energy(&state.u, g);
    let z = zeta.zeta;
    let force = up.iter().map(|&pr| (pr - z) * (pr + pr.powi(3) / 8.0 - z)).collect();
    let moment = up
        .iter()
        .zip(&state.alpha)
        .map(|(&pr, &a)| a * (a - pr) * (a - 0.5 * pr))
        .collect();
    ElResidual { force, moment }
}
