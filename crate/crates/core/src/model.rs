//! Domain types and the shear energy in all of its published representations.
//!
//! The deformation is `u: (0,1) -> R` with `u(0)=0`, `u(1)=gamma`; the
//! microrotation about `e_2` is the scalar angle field `alpha`. Writing
//! `p = u'` and `g = alpha'`, the exact energy density is
//!
//! ```text
//! W(p, a, g) = mu/2 * [ 4 Lc^2 g^2 + p^2 + (sin(a) p - 4 sin^2(a/2))^2 ]
//!            + mu_c/2 * ( cos(a) p - 2 sin(a) )^2
//! ```
//!
//! and the reduced density replaces the trigonometric wells by their
//! third-order expansions. Each representation published for these two
//! functionals is available and tested for pointwise equivalence.

use crate::discretize::{self, BoundarySpec, DofMap};
use crate::{Error, Result};

/// Nodal scalar field; one value per grid node.
pub type Field = Vec<f64>;

/// Material and loading constants.
///
/// `alpha_d` is the prescribed microrotation angle used by Dirichlet
/// boundary conditions and by the algebraic limit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Elastic shear modulus, `> 0`.
    pub mu: f64,
    /// Cosserat couple modulus, `>= 0`.
    pub mu_c: f64,
    /// Characteristic length weighting the curvature term, `>= 0`.
    pub l_c: f64,
    /// Shear amount at the upper face, `>= 0`.
    pub gamma: f64,
    /// Dirichlet microrotation angle (radians).
    pub alpha_d: f64,
}

impl Params {
    pub fn new(mu: f64, mu_c: f64, l_c: f64, gamma: f64, alpha_d: f64) -> Result<Self> {
        let p = Self { mu, mu_c, l_c, gamma, alpha_d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParams("mu must be > 0"));
        }
        if !(self.mu_c >= 0.0) {
            return Err(Error::InvalidParams("mu_c must be >= 0"));
        }
        if !(self.l_c >= 0.0) {
            return Err(Error::InvalidParams("l_c must be >= 0"));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidParams("gamma must be >= 0"));
        }
        if !self.alpha_d.is_finite() {
            return Err(Error::NonFinite("alpha_d"));
        }
        Ok(())
    }
}

/// Uniform grid on `[0, 1]` with `n >= 3` nodes, `z_i = i/(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

impl Grid {
    /// Trapezoidal weight of node `i`: `h/2` at the endpoints, `h` inside.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5 * self.h
        } else {
            self.h
        }
    }
}

/// Nodal deformation and microrotation pair on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearState {
    pub grid: Grid,
    pub u: Field,
    pub alpha: Field,
}

impl ShearState {
    pub fn new(grid: Grid, u: Field, alpha: Field) -> Result<Self> {
        if u.len() != grid.n {
            return Err(Error::LengthMismatch { expected: grid.n, found: u.len() });
        }
        if alpha.len() != grid.n {
            return Err(Error::LengthMismatch { expected: grid.n, found: alpha.len() });
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("u"));
        }
        if alpha.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("alpha"));
        }
        Ok(Self { grid, u, alpha })
    }

    /// Homogeneous shear `u(x) = gamma x` with constant angle.
    pub fn homogeneous(grid: &Grid, gamma: f64, alpha: f64) -> Self {
        let u = grid.nodes.iter().map(|z| gamma * z).collect();
        let a = vec![alpha; grid.n];
        Self { grid: grid.clone(), u, alpha: a }
    }

    pub fn zero(grid: &Grid) -> Self {
        Self { grid: grid.clone(), u: vec![0.0; grid.n], alpha: vec![0.0; grid.n] }
    }
}

/// Which energy functional: the exact one or its third-order reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Full,
    Reduced,
}

/// Representation of the exact integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FullForm {
    /// Literal form: trigonometric wells plus the `cos^2(a) (2 tan(a) - p)^2`
    /// coupling term.
    Direct,
    /// Sum-of-squares rearrangement; nonnegative term by term. Default for
    /// minimization.
    #[default]
    Quadratic,
}

/// Representation of the reduced integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReducedForm {
    /// Third-order truncation in its published product form.
    Wred,
    /// Algebraically identical rearrangement of `Wred`.
    Wred2,
    /// `Wred2` completed to a full square in the coupling term. Default.
    #[default]
    Wred3,
}

/// Double-well potential `Phi_u` and quadratic potential `Q_u` from the
/// Allen-Cahn form of the reduced angular momentum balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSplit {
    pub phi: f64,
    pub q: f64,
}

#[inline]
fn s_term(p: f64, a: f64) -> f64 {
    a.sin() * p - 2.0 * (1.0 - a.cos())
}

#[inline]
fn c_term(p: f64, a: f64) -> f64 {
    a.cos() * p - 2.0 * a.sin()
}

#[inline]
fn b_term(p: f64, a: f64) -> f64 {
    (1.0 - 0.5 * a * a) * p - 2.0 * a + a * a * a / 3.0
}

/// Exact energy density `W(u', alpha, alpha')` in the requested representation.
///
/// Both forms carry the curvature term `2 mu Lc^2 |alpha'|^2`.
pub fn integrand_full(u_prime: f64, alpha: f64, alpha_prime: f64, p: &Params, form: FullForm) -> f64 {
    let (s, c) = alpha.sin_cos();
    let curv = 2.0 * p.mu * p.l_c * p.l_c * alpha_prime * alpha_prime;
    match form {
        FullForm::Direct => {
            let bulk = 2.0 * (c - 1.0) * (c - 1.0)
                + 0.5 * (1.0 + s * s) * u_prime * u_prime
                + 2.0 * (c - 1.0) * s * u_prime;
            let couple = c * c * (2.0 * alpha.tan() - u_prime).powi(2);
            curv + p.mu * bulk + 0.5 * p.mu_c * couple
        }
        FullForm::Quadratic => {
            let sq = s_term(u_prime, alpha);
            let cq = c_term(u_prime, alpha);
            curv + 0.5 * p.mu * (u_prime * u_prime + sq * sq) + 0.5 * p.mu_c * cq * cq
        }
    }
}

/// Reduced energy density in the requested representation.
///
/// `Wred` and `Wred2` are algebraically equal; `Wred3` adds the completion
/// term `mu_c/2 (a^4 p^2/4 - a^5 p/3 + a^6/9)`.
pub fn integrand_reduced(
    u_prime: f64,
    alpha: f64,
    alpha_prime: f64,
    p: &Params,
    form: ReducedForm,
) -> f64 {
    let a = alpha;
    let pr = u_prime;
    let curv = 2.0 * p.mu * p.l_c * p.l_c * alpha_prime * alpha_prime;
    match form {
        ReducedForm::Wred => {
            let bulk = 0.5 * (1.0 + a * a) * pr * pr + 0.5 * a.powi(4) - a.powi(3) * pr;
            let couple = 2.0
                * (0.5 * pr - a)
                * (0.5 * pr - a - a * a / 6.0 * (3.0 * pr - 2.0 * a));
            curv + p.mu * bulk + p.mu_c * couple
        }
        ReducedForm::Wred2 => {
            let well = a * (a - pr);
            let couple = (1.0 - a * a) * pr * pr
                + (8.0 * a * a / 3.0 - 4.0) * a * pr
                + 4.0 * a * a
                - 4.0 * a.powi(4) / 3.0;
            curv + 0.5 * p.mu * (pr * pr + well * well) + 0.5 * p.mu_c * couple
        }
        ReducedForm::Wred3 => {
            let well = a * (a - pr);
            let b = b_term(pr, a);
            curv + 0.5 * p.mu * (pr * pr + well * well) + 0.5 * p.mu_c * b * b
        }
    }
}

/// `Phi_u(alpha) = alpha^2 (alpha - u')^2 / 8` and
/// `Q_u(alpha) = ((2 - alpha^2)/2 u' - (6 alpha - alpha^3)/3)^2 / 8`.
pub fn potential_split(alpha: f64, u_prime: f64) -> PotentialSplit {
    let phi = (alpha * (alpha - u_prime)).powi(2) / 8.0;
    let q = b_term(u_prime, alpha).powi(2) / 8.0;
    PotentialSplit { phi, q }
}

/// Discrete energy: trapezoidal quadrature of the selected integrand with
/// `u'`, `alpha'` from discrete differentiation (central inside, first-order
/// one-sided at the endpoints, which makes constant-stress states exact
/// stationary points of the discrete functional).
pub fn energy_full(state: &ShearState, p: &Params, form: FullForm) -> f64 {
    let g = &state.grid;
    let up = discretize::diff_energy(&state.u, g);
    let ap = discretize::diff_energy(&state.alpha, g);
    let density: Vec<f64> = (0..g.n)
        .map(|i| integrand_full(up[i], state.alpha[i], ap[i], p, form))
        .collect();
    discretize::trapezoid(&density, g)
}

/// Reduced counterpart of [`energy_full`].
pub fn energy_reduced(state: &ShearState, p: &Params, form: ReducedForm) -> f64 {
    let g = &state.grid;
    let up = discretize::diff_energy(&state.u, g);
    let ap = discretize::diff_energy(&state.alpha, g);
    let density: Vec<f64> = (0..g.n)
        .map(|i| integrand_reduced(up[i], state.alpha[i], ap[i], p, form))
        .collect();
    discretize::trapezoid(&density, g)
}

/// Energy in the default representation of the requested kind
/// (quadratic for the full functional, `Wred3` for the reduced one).
pub fn energy(state: &ShearState, p: &Params, kind: Kind) -> f64 {
    match kind {
        Kind::Full => energy_full(state, p, FullForm::Quadratic),
        Kind::Reduced => energy_reduced(state, p, ReducedForm::Wred3),
    }
}

/// `dW/du'` of the default full representation; this is the force stress.
#[inline]
pub(crate) fn w_full_dp(p: f64, a: f64, prm: &Params) -> f64 {
    let (s, c) = a.sin_cos();
    prm.mu * (p + s_term(p, a) * s) + prm.mu_c * c_term(p, a) * c
}

/// `dW/dalpha` of the default full representation.
#[inline]
pub(crate) fn w_full_da(p: f64, a: f64, prm: &Params) -> f64 {
    let (s, c) = a.sin_cos();
    let t = s * p + 2.0 * c;
    c_term(p, a) * (prm.mu * s_term(p, a) - prm.mu_c * t)
}

/// `dW/du'` of `Wred3`; this is the reduced force stress.
#[inline]
pub(crate) fn w_red3_dp(p: f64, a: f64, prm: &Params) -> f64 {
    prm.mu * (p - a * a * (a - p)) + prm.mu_c * (1.0 - 0.5 * a * a) * b_term(p, a)
}

/// `dW/dalpha` of `Wred3`.
#[inline]
pub(crate) fn w_red3_da(p: f64, a: f64, prm: &Params) -> f64 {
    let well = a * (a - p);
    prm.mu * well * (2.0 * a - p) + prm.mu_c * b_term(p, a) * (a * a - a * p - 2.0)
}

/// Raw nodal gradient of the discrete energy, treating every nodal value of
/// `u` and `alpha` as independent.
pub(crate) fn nodal_gradient(state: &ShearState, p: &Params, kind: Kind) -> (Vec<f64>, Vec<f64>) {
    let g = &state.grid;
    let n = g.n;
    let up = discretize::diff_energy(&state.u, g);
    let ap = discretize::diff_energy(&state.alpha, g);

    let mut q_p = vec![0.0; n]; // w_i * dW/dp
    let mut q_g = vec![0.0; n]; // w_i * dW/dalpha'
    let mut ga = vec![0.0; n];
    let four_mu_l2 = 4.0 * p.mu * p.l_c * p.l_c;
    for i in 0..n {
        let w = g.weight(i);
        let (dp, da) = match kind {
            Kind::Full => (w_full_dp(up[i], state.alpha[i], p), w_full_da(up[i], state.alpha[i], p)),
            Kind::Reduced => {
                (w_red3_dp(up[i], state.alpha[i], p), w_red3_da(up[i], state.alpha[i], p))
            }
        };
        q_p[i] = w * dp;
        q_g[i] = w * four_mu_l2 * ap[i];
        ga[i] = w * da;
    }

    let mut gu = vec![0.0; n];
    discretize::add_diff_energy_adjoint(&q_p, g, &mut gu);
    discretize::add_diff_energy_adjoint(&q_g, g, &mut ga);
    (gu, ga)
}

/// Analytic gradient of the discrete energy over the free degrees of freedom
/// of `bc`; constrained nodal slots are zero. Derived (consistent-coupling)
/// endpoint angles and a symmetry-eliminated slope DOF are chained into the
/// free entries, so the result matches central finite differences of
/// [`energy`] taken in packed coordinates.
pub fn energy_gradient(
    state: &ShearState,
    p: &Params,
    kind: Kind,
    bc: &BoundarySpec,
) -> Result<(Field, Field)> {
    let map = DofMap::new(bc.clone(), &state.grid)?;
    let (gu, ga) = nodal_gradient(state, p, kind);
    let packed = map.pack_gradient(state, &gu, &ga);
    Ok(map.scatter_gradient(&packed))
}

fn rotation(alpha: f64) -> [[f64; 3]; 3] {
    let (s, c) = alpha.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn shear_gradient(u_prime: f64) -> [[f64; 3]; 3] {
    [[1.0, 0.0, u_prime], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Determinant of a 3x3 matrix; pairs with [`first_cosserat_tensor`] in
/// checks that the shear ansatz is volume preserving.
pub fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// `mu |sym(R^T F - I)|^2 + mu_c |skew(R^T F - I)|^2` for an explicit
/// deformation gradient `F` and the rotation about `e_2` by `alpha`.
pub(crate) fn biot_energy(mu: f64, mu_c: f64, f: &[[f64; 3]; 3], alpha: f64) -> f64 {
    let r = rotation(alpha);
    let ubar = mat_mul(&transpose(&r), f);
    let mut sym2 = 0.0;
    let mut skew2 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let e_ij = ubar[i][j] - if i == j { 1.0 } else { 0.0 };
            let e_ji = ubar[j][i] - if i == j { 1.0 } else { 0.0 };
            let sym = 0.5 * (e_ij + e_ji);
            let skew = 0.5 * (e_ij - e_ji);
            sym2 += sym * sym;
            skew2 += skew * skew;
        }
    }
    mu * sym2 + mu_c * skew2
}

/// First Cosserat deformation tensor `Ubar = R^T F`, for tests of the
/// ansatz (`det Ubar = 1`, consistent coupling as `skew(Ubar) = 0`).
pub fn first_cosserat_tensor(u_prime: f64, alpha: f64) -> [[f64; 3]; 3] {
    mat_mul(&transpose(&rotation(alpha)), &shear_gradient(u_prime))
}

/// Evaluates the three-dimensional Biot-stretch energy density on the shear
/// ansatz. With `l_c = 0` this equals [`integrand_full`]; the volumetric term
/// vanishes identically because `det(R^T F) = 1`.
pub fn integrand_3d_check(u_prime: f64, alpha: f64, p: &Params) -> f64 {
    debug_assert_eq!(p.l_c, 0.0, "3D cross-check is defined for l_c = 0");
    biot_energy(p.mu, p.mu_c, &shear_gradient(u_prime), alpha)
}
