//! Line searches for the quasi-Newton minimizer.

use super::dot;

pub(crate) const C1: f64 = 1e-4;
pub(crate) const C2: f64 = 0.9;

/// Rounding slack for energy comparisons: near a minimizer the true decrease
/// along a step drops below the evaluation noise of the objective, and the
/// sufficient-decrease test must not reject such steps (approximate-Wolfe
/// acceptance in the sense of Hager-Zhang).
fn f_noise(f0: f64) -> f64 {
    32.0 * f64::EPSILON * (1.0 + f0.abs())
}

pub(crate) struct LineSearchHit {
    pub step: f64,
    pub f: f64,
    pub g: Vec<f64>,
}

struct Probe {
    a: f64,
    phi: f64,
    dphi: f64,
    g: Vec<f64>,
}

/// Minimizer of the cubic through `(x1, f1, g1)` and `(x2, f2, g2)`, clamped
/// to the bracket.
fn cubic_interpolate(x1: f64, f1: f64, g1: f64, x2: f64, f2: f64, g2: f64) -> f64 {
    let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    let d2sq = d1 * d1 - g1 * g2;
    if d2sq >= 0.0 {
        let d2 = d2sq.sqrt();
        let min_pos = if x1 <= x2 {
            x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
        } else {
            x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2))
        };
        if min_pos.is_finite() {
            return min_pos.clamp(lo, hi);
        }
    }
    0.5 * (lo + hi)
}

/// Strong Wolfe search (bracket then zoom, cubic interpolation). `eval`
/// returns `(f, grad)` at `x + a d`. Returns `None` when no acceptable step
/// exists within the evaluation budget.
pub(crate) fn strong_wolfe<F>(
    mut eval: F,
    d: &[f64],
    f0: f64,
    g0: &[f64],
) -> Option<LineSearchHit>
where
    F: FnMut(f64) -> (f64, Vec<f64>),
{
    let dphi0 = dot(g0, d);
    if dphi0 >= 0.0 {
        return None;
    }
    let probe = |a: f64, eval: &mut F| -> Probe {
        let (phi, g) = eval(a);
        let dphi = dot(&g, d);
        Probe { a, phi, dphi, g }
    };

    let mut prev = Probe { a: 0.0, phi: f0, dphi: dphi0, g: g0.to_vec() };
    let mut a = 1.0;
    let a_max = 1e6;
    let tol = f_noise(f0);

    for i in 0..25 {
        let cur = probe(a, &mut eval);
        if !cur.phi.is_finite()
            || cur.phi > f0 + C1 * cur.a * dphi0 + tol
            || (i > 0 && cur.phi >= prev.phi + tol)
        {
            return zoom(eval, d, f0, dphi0, prev, cur);
        }
        if cur.dphi.abs() <= -C2 * dphi0 {
            return Some(LineSearchHit { step: cur.a, f: cur.phi, g: cur.g });
        }
        if cur.dphi >= 0.0 {
            return zoom(eval, d, f0, dphi0, cur, prev);
        }
        a = (2.0 * cur.a).min(a_max);
        prev = cur;
        if prev.a >= a_max {
            break;
        }
    }
    // Ran off the bracket; accept the last sufficient-decrease point if any.
    if prev.a > 0.0 && prev.phi <= f0 + C1 * prev.a * dphi0 {
        return Some(LineSearchHit { step: prev.a, f: prev.phi, g: prev.g });
    }
    None
}

fn zoom<F>(
    mut eval: F,
    d: &[f64],
    f0: f64,
    dphi0: f64,
    mut lo: Probe,
    mut hi: Probe,
) -> Option<LineSearchHit>
where
    F: FnMut(f64) -> (f64, Vec<f64>),
{
    let tol = f_noise(f0);
    for _ in 0..30 {
        let width = (hi.a - lo.a).abs();
        if width <= 1e-16 * (1.0 + lo.a.abs()) {
            break;
        }
        let mut a = cubic_interpolate(lo.a, lo.phi, lo.dphi, hi.a, hi.phi, hi.dphi);
        let (bl, bh) = if lo.a < hi.a { (lo.a, hi.a) } else { (hi.a, lo.a) };
        let margin = 0.1 * width;
        if !a.is_finite() || a < bl + margin || a > bh - margin {
            a = 0.5 * (lo.a + hi.a);
        }
        let (phi, g) = eval(a);
        let dphi = dot(&g, d);
        let cand = Probe { a, phi, dphi, g };
        // Approximate-Wolfe acceptance: within evaluation noise of f0 the
        // curvature condition alone decides.
        if cand.phi <= f0 + tol && cand.dphi.abs() <= -C2 * dphi0 {
            return Some(LineSearchHit { step: cand.a, f: cand.phi.min(f0), g: cand.g });
        }
        if !cand.phi.is_finite()
            || cand.phi > f0 + C1 * cand.a * dphi0 + tol
            || cand.phi >= lo.phi + tol
        {
            hi = cand;
        } else {
            if cand.dphi.abs() <= -C2 * dphi0 {
                return Some(LineSearchHit { step: cand.a, f: cand.phi, g: cand.g });
            }
            if cand.dphi * (hi.a - lo.a) >= 0.0 {
                hi = lo;
            }
            lo = cand;
        }
    }
    if lo.a > 0.0 && lo.phi < f0 {
        return Some(LineSearchHit { step: lo.a, f: lo.phi, g: lo.g });
    }
    None
}

/// Backtracking Armijo search.
pub(crate) fn armijo<F>(mut eval: F, d: &[f64], f0: f64, g0: &[f64]) -> Option<LineSearchHit>
where
    F: FnMut(f64) -> (f64, Vec<f64>),
{
    let dphi0 = dot(g0, d);
    if dphi0 >= 0.0 {
        return None;
    }
    let mut a = 1.0;
    for _ in 0..50 {
        let (phi, g) = eval(a);
        if phi.is_finite() && phi <= f0 + C1 * a * dphi0 {
            return Some(LineSearchHit { step: a, f: phi, g });
        }
        a *= 0.5;
    }
    None
}
