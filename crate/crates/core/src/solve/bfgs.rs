//! Dense BFGS quasi-Newton minimization of the discrete shear energies over
//! the packed free DOFs of a [`BoundarySpec`].

use super::line_search::{armijo, strong_wolfe, LineSearchHit};
use super::{inf_norm, norm2, LineSearch, SolveOptions, SolveReport};
use crate::analysis::volume_fraction;
use crate::discretize::{BoundarySpec, DofMap};
use crate::model::{self, Kind, Params, ShearState};
use crate::Result;

/// Dense symmetric inverse-Hessian approximation.
struct InvHessian {
    n: usize,
    a: Vec<f64>,
}

impl InvHessian {
    fn scaled_identity(n: usize, scale: f64) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = scale;
        }
        Self { n, a }
    }

    fn reset(&mut self, scale: f64) {
        self.a.fill(0.0);
        for i in 0..self.n {
            self.a[i * self.n + i] = scale;
        }
    }

    fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            out[i] = row.iter().zip(v).map(|(m, x)| m * x).sum();
        }
        out
    }

    /// BFGS update of the inverse Hessian:
    /// `H <- H + (sy + yHy)/sy^2 s s^T - (Hy s^T + s (Hy)^T)/sy`.
    fn update(&mut self, s: &[f64], y: &[f64], sy: f64) {
        let n = self.n;
        let hy = self.matvec(y);
        let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
        let c1 = (sy + yhy) / (sy * sy);
        let c2 = 1.0 / sy;
        for i in 0..n {
            for j in 0..n {
                self.a[i * n + j] += c1 * s[i] * s[j] - c2 * (hy[i] * s[j] + s[i] * hy[j]);
            }
        }
    }
}

/// Minimizes the discrete energy of `kind` over the free DOFs of `bc`,
/// starting from `init` (projected onto the feasible set by the DOF map).
///
/// Accepted iterates have nonincreasing energy. Convergence is declared on
/// the packed-gradient infinity norm; on line-search failure or iteration
/// exhaustion the best iterate is returned with `converged = false`.
pub fn minimize_bfgs(
    init: &ShearState,
    p: &Params,
    bc: &BoundarySpec,
    kind: Kind,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    p.validate()?;
    let map = DofMap::new(bc.clone(), &init.grid)?;
    let n = map.count();

    let eval = |x: &[f64]| -> (f64, Vec<f64>) {
        let state = map.unpack(x).expect("dimension fixed by the DOF map");
        let e = model::energy(&state, p, kind);
        let (gu, ga) = model::nodal_gradient(&state, p, kind);
        (e, map.pack_gradient(&state, &gu, &ga))
    };

    let mut x = map.pack(init);
    let (mut f, mut g) = eval(&x);
    let g0_norm = norm2(&g);
    let mut h_inv = InvHessian::scaled_identity(n, if g0_norm > 0.0 { 1.0 / g0_norm } else { 1.0 });

    let mut iterations = 0usize;
    let mut converged = inf_norm(&g) <= opts.grad_tol;
    let mut fresh_reset = true;

    while !converged && iterations < opts.max_iters {
        let mut d: Vec<f64> = h_inv.matvec(&g).iter().map(|v| -v).collect();
        if super::dot(&d, &g) >= 0.0 {
            // Lost positive definiteness; restart from steepest descent.
            let scale = 1.0 / norm2(&g).max(1e-300);
            h_inv.reset(scale);
            d = g.iter().map(|v| -v * scale).collect();
            fresh_reset = true;
        }

        let line_eval = |a: f64| -> (f64, Vec<f64>) {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + a * di).collect();
            eval(&xt)
        };
        let hit: Option<LineSearchHit> = match opts.line_search {
            LineSearch::Wolfe => strong_wolfe(line_eval, &d, f, &g),
            LineSearch::Armijo => armijo(line_eval, &d, f, &g),
        };
        let Some(hit) = hit else {
            if fresh_reset {
                break; // no decrease even along steepest descent: done
            }
            // The accumulated approximation went stale; retry once from a
            // rescaled identity before giving up.
            let scale = 1.0 / norm2(&g).max(1e-300);
            h_inv.reset(scale);
            fresh_reset = true;
            continue;
        };

        let s: Vec<f64> = d.iter().map(|di| hit.step * di).collect();
        let y: Vec<f64> = hit.g.iter().zip(&g).map(|(gn, go)| gn - go).collect();
        let sy = super::dot(&s, &y);
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += si;
        }
        f = hit.f;
        g = hit.g;
        iterations += 1;

        // Curvature guard keeps the approximation positive definite.
        if sy > 1e-12 {
            if fresh_reset {
                // Shanno-Phua scaling before the first update after a reset.
                let yy = super::dot(&y, &y);
                if yy > 0.0 {
                    h_inv.reset(sy / yy);
                }
                fresh_reset = false;
            }
            h_inv.update(&s, &y, sy);
        }
        converged = inf_norm(&g) <= opts.grad_tol;
    }

    let state = map.unpack(&x).expect("dimension fixed by the DOF map");
    let theta = volume_fraction(&state.alpha, 0.05);
    Ok(SolveReport {
        state,
        energy: f,
        norm: inf_norm(&g),
        iterations,
        theta,
        converged,
        dof_count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::make_grid;
    use crate::solve::init_microstructure;

    #[test]
    fn stationary_start_converges_immediately() {
        let grid = make_grid(101).unwrap();
        let p = Params { mu: 1.0, mu_c: 1.0, l_c: 0.0, gamma: 0.8, alpha_d: 0.0 };
        let init = ShearState::homogeneous(&grid, 0.8, (0.4_f64).atan());
        let bc = BoundarySpec::consistent(0.8, true);
        let r = minimize_bfgs(&init, &p, &bc, Kind::Full, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 2, "iterations {}", r.iterations);
        assert!((r.energy - 0.331868).abs() <= 1e-6, "energy {}", r.energy);
    }

    #[test]
    fn zero_shear_minimizes_to_zero_state() {
        let grid = make_grid(31).unwrap();
        let p = Params { mu: 1.0, mu_c: 0.5, l_c: 0.0, gamma: 0.0, alpha_d: 0.0 };
        let init = ShearState::zero(&grid);
        let bc = BoundarySpec::consistent(0.0, true);
        let r = minimize_bfgs(&init, &p, &bc, Kind::Full, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.energy.abs() <= 1e-15);
    }

    #[test]
    fn energy_is_monotone_across_iteration_prefixes() {
        let grid = make_grid(31).unwrap();
        let p = Params { mu: 1.0, mu_c: 0.0, l_c: 0.0, gamma: 0.8, alpha_d: 0.1 };
        let bc = BoundarySpec::dirichlet(0.8, 0.1, true);
        let init = init_microstructure(&grid, 0.8, 0.5, 11);
        let mut prev = f64::INFINITY;
        for k in 1..10 {
            let opts = SolveOptions { max_iters: k, ..Default::default() };
            let r = minimize_bfgs(&init, &p, &bc, Kind::Reduced, &opts).unwrap();
            assert!(r.energy <= prev + 1e-14, "energy rose at prefix {k}");
            prev = r.energy;
        }
    }

    #[test]
    fn small_full_consistent_run_reaches_band_near_infimum() {
        let grid = make_grid(101).unwrap();
        let p = Params { mu: 1.0, mu_c: 0.0, l_c: 0.0, gamma: 0.8, alpha_d: 0.0 };
        let bc = BoundarySpec::consistent(0.8, true);
        let init = ShearState::homogeneous(&grid, 0.8, 0.0);
        let r = minimize_bfgs(&init, &p, &bc, Kind::Full, &SolveOptions::default()).unwrap();
        assert!(r.converged, "norm {}", r.norm);
        assert!(r.energy >= 0.32 - 1e-12 && r.energy < 0.3205, "energy {}", r.energy);
    }
}
