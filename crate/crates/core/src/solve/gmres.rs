//! Restarted GMRES on a matrix-free linear operator.

use super::{dot, norm2};

#[derive(Debug, Clone)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iters: usize,
    /// Relative residual target `|A x - b| <= tol * |b|`.
    pub tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { restart: 30, max_iters: 1000, tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub converged: bool,
    /// Total Arnoldi steps across restarts.
    pub iterations: usize,
    /// Relative residual of the returned iterate.
    pub residual: f64,
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if a.abs() > b.abs() {
        let t = b / a;
        let c = 1.0 / (1.0 + t * t).sqrt();
        (c, c * t)
    } else {
        let t = a / b;
        let s = 1.0 / (1.0 + t * t).sqrt();
        (s * t, s)
    }
}

/// Solves `A x = rhs` with the operator given as a closure. Returns the best
/// iterate with a convergence flag; a lucky breakdown of the Arnoldi process
/// is treated as convergence.
pub fn gmres<F>(matvec: F, rhs: &[f64], x0: &[f64], opts: &GmresOptions) -> GmresResult
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = rhs.len();
    assert_eq!(x0.len(), n, "initial guess must match rhs dimension");
    let m = opts.restart.max(1).min(n);
    let bnorm = norm2(rhs).max(f64::MIN_POSITIVE);
    let mut x = x0.to_vec();
    let mut total_iters = 0usize;

    loop {
        let ax = matvec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm2(&r);
        if beta / bnorm <= opts.tol {
            return GmresResult { x, converged: true, iterations: total_iters, residual: beta / bnorm };
        }
        if total_iters >= opts.max_iters {
            return GmresResult { x, converged: false, iterations: total_iters, residual: beta / bnorm };
        }

        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|a| a / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;

        let mut k_done = 0usize;
        let mut breakdown = false;
        for k in 0..m {
            total_iters += 1;
            let mut w = matvec(&v[k]);
            for j in 0..=k {
                h[j][k] = dot(&w, &v[j]);
                for (wi, vi) in w.iter_mut().zip(&v[j]) {
                    *wi -= h[j][k] * vi;
                }
            }
            h[k + 1][k] = norm2(&w);
            if h[k + 1][k] > 1e-300 {
                for wi in w.iter_mut() {
                    *wi /= h[k + 1][k];
                }
                v.push(w);
            } else {
                breakdown = true;
            }

            for j in 0..k {
                let tmp = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = tmp;
            }
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            cs[k] = c;
            sn[k] = s;
            h[k][k] = c * h[k][k] + s * h[k + 1][k];
            h[k + 1][k] = 0.0;
            let tmp = c * g[k] + s * g[k + 1];
            g[k + 1] = -s * g[k] + c * g[k + 1];
            g[k] = tmp;

            k_done = k + 1;
            if g[k_done].abs() / bnorm <= opts.tol || breakdown || total_iters >= opts.max_iters {
                break;
            }
        }

        // Back substitution for the Krylov coefficients.
        let mut y = vec![0.0; k_done];
        for i in (0..k_done).rev() {
            let mut sum = g[i];
            for j in i + 1..k_done {
                sum -= h[i][j] * y[j];
            }
            y[i] = sum / h[i][i];
        }
        for j in 0..k_done {
            for (xi, vi) in x.iter_mut().zip(&v[j]) {
                *xi += y[j] * vi;
            }
        }
        if breakdown {
            let ax = matvec(&x);
            let res = norm2(&rhs.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>()) / bnorm;
            return GmresResult { x, converged: res <= opts.tol, iterations: total_iters, residual: res };
        }
    }
}
