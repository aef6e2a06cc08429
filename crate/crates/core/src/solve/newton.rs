//! Jacobian-free Newton-GMRES for the algebraic limit system
//! (`l_c = mu_c = 0`).
//!
//! Unknowns follow the `2N - 3` convention: interior slopes of `u` with one
//! eliminated by the symmetry constraint (`u_{N-2} = gamma - u_1`), plus
//! `alpha` at every node. The nonlinear function stacks the two angle
//! boundary equations, the pointwise cubic angle equation at interior nodes,
//! and the pointwise slope equation at the nodes `1..N-3`; its Frechet
//! derivative is probed by forward differences inside restarted GMRES.

use super::gmres::{gmres, GmresOptions};
use super::{inf_norm, norm2, SolveOptions, SolveReport};
use crate::analysis::volume_fraction;
use crate::model::{self, Params, ReducedForm, ShearState};
use crate::{Error, Result};

struct LimitSystem<'a> {
    p: &'a Params,
    n: usize,
    h: f64,
    grid: crate::model::Grid,
}

impl<'a> LimitSystem<'a> {
    fn dof_count(&self) -> usize {
        2 * self.n - 3
    }

    fn unpack(&self, x: &[f64]) -> ShearState {
        let n = self.n;
        let mut u = vec![0.0; n];
        u[1..n - 2].copy_from_slice(&x[..n - 3]);
        u[n - 2] = self.p.gamma - x[0];
        u[n - 1] = self.p.gamma;
        let alpha = x[n - 3..].to_vec();
        ShearState { grid: self.grid.clone(), u, alpha }
    }

    fn pack(&self, state: &ShearState) -> Vec<f64> {
        let n = self.n;
        let mut x = Vec::with_capacity(self.dof_count());
        x.extend_from_slice(&state.u[1..n - 2]);
        x.extend_from_slice(&state.alpha);
        x
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let h = self.h;
        let alpha_d = self.p.alpha_d;
        let mut u = vec![0.0; n];
        u[1..n - 2].copy_from_slice(&x[..n - 3]);
        u[n - 2] = self.p.gamma - x[0];
        u[n - 1] = self.p.gamma;
        let alpha = &x[n - 3..];

        // Nodal slopes: first-order at the boundary, central inside.
        let mut pr = vec![0.0; n];
        pr[0] = (u[1] - u[0]) / h;
        for i in 1..n - 1 {
            pr[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        }
        pr[n - 1] = (u[n - 1] - u[n - 2]) / h;

        let zeta = (1.0 + alpha_d * alpha_d) * pr[0] - alpha_d.powi(3);

        let mut g = Vec::with_capacity(self.dof_count());
        g.push(alpha[0] - alpha_d);
        for i in 1..n - 1 {
            g.push(alpha[i] * (alpha[i] - pr[i]) * (alpha[i] - 0.5 * pr[i]));
        }
        g.push(alpha[n - 1] - alpha_d);
        for j in 1..n - 2 {
            g.push((pr[j] - zeta) * (pr[j] + pr[j].powi(3) / 8.0 - zeta));
        }
        g
    }
}

/// Solves the discrete algebraic system by a damped Newton iteration with
/// finite-difference GMRES for the linear steps. The volume fraction is
/// carried by the initial state (build it with
/// [`init_microstructure`](super::init_microstructure)); `theta` is the
/// requested fraction and is reported back measured from the final state.
pub fn solve_newton_gmres(
    init: &ShearState,
    p: &Params,
    theta: f64,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    p.validate()?;
    if p.l_c != 0.0 || p.mu_c != 0.0 {
        return Err(Error::InvalidParams("the limit system requires l_c = 0 and mu_c = 0"));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfDomain("theta must lie in [0, 1]"));
    }
    let n = init.grid.n;
    if n < 5 {
        return Err(Error::TooFewNodes { needed: 5, got: n });
    }
    let sys = LimitSystem { p, n, h: init.grid.h, grid: init.grid.clone() };

    // Project the seed onto the stable root branches of the cubic angle
    // equation: alpha = 0 where the seed carries the zero phase, alpha = u'
    // elsewhere. Seeds sitting exactly on the repulsive middle branch
    // alpha = u'/2 would otherwise be kept there by the Newton iteration.
    let mut seed = init.clone();
    {
        let pr = crate::discretize::diff(&seed.u, &seed.grid);
        for (a, pi) in seed.alpha.iter_mut().zip(&pr) {
            if *a != 0.0 {
                *a = *pi;
            }
        }
    }

    let mut x = sys.pack(&seed);
    let mut r = sys.residual(&x);
    let mut rnorm = inf_norm(&r);
    let mut r2 = norm2(&r);
    let mut iterations = 0usize;
    let mut converged = rnorm <= opts.grad_tol;
    // Levenberg shift against singular Jacobians (degenerate seeds sit on
    // multiple-root manifolds of the cubic factors); zero once Newton is in
    // the basin.
    let mut nu = 0.0_f64;

    while !converged && iterations < opts.max_iters {
        let x_norm = norm2(&x);
        let base = opts.fd_delta.unwrap_or_else(|| f64::EPSILON.sqrt() * (1.0 + x_norm));

        let mut accepted = false;
        for _attempt in 0..8 {
            let shift = nu;
            let matvec = |v: &[f64]| -> Vec<f64> {
                let vnorm = norm2(v);
                if vnorm == 0.0 {
                    return vec![0.0; v.len()];
                }
                let delta = base / vnorm;
                let shifted: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi + delta * vi).collect();
                let rs = sys.residual(&shifted);
                rs.iter()
                    .zip(&r)
                    .zip(v)
                    .map(|((a, b), vi)| (a - b) / delta + shift * vi)
                    .collect()
            };
            let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let dim = rhs.len();
            // The algebraic Jacobians are small but stiff; give the Krylov
            // space room up to the full dimension.
            let restart = opts.gmres_restart.max(dim.min(512)).min(dim);
            let gm_opts = GmresOptions {
                restart,
                max_iters: (40 * restart).max(4 * dim),
                tol: opts.gmres_tol,
            };
            let lin = gmres(matvec, &rhs, &vec![0.0; dim], &gm_opts);

            // Damped update with sufficient decrease of the residual 2-norm.
            let mut lambda = 1.0;
            while lambda > 1e-10 {
                let xt: Vec<f64> = x.iter().zip(&lin.x).map(|(xi, di)| xi + lambda * di).collect();
                let rt = sys.residual(&xt);
                let rt2 = norm2(&rt);
                if rt2 <= (1.0 - 1e-4 * lambda) * r2 {
                    x = xt;
                    rnorm = inf_norm(&rt);
                    r = rt;
                    r2 = rt2;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if accepted {
                nu = if lambda == 1.0 { nu / 4.0 } else { nu };
                if nu < 1e-12 {
                    nu = 0.0;
                }
                break;
            }
            // Step rejected: raise the shift and rebuild the direction.
            nu = if nu == 0.0 { 1e-4 * (1.0 + r2) } else { 10.0 * nu };
            if nu > 1e6 {
                break;
            }
        }
        iterations += 1;
        if !accepted {
            break; // stagnation: return the best iterate
        }
        converged = rnorm <= opts.grad_tol;
    }

    let state = sys.unpack(&x);
    let energy = model::energy_reduced(&state, p, ReducedForm::Wred3);
    let measured = volume_fraction(&state.alpha, 0.05);
    let _ = theta;
    Ok(SolveReport {
        state,
        energy,
        norm: rnorm,
        iterations,
        theta: measured,
        converged,
        dof_count: sys.dof_count(),
    })
}
