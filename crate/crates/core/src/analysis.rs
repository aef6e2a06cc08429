//! Microstructure diagnostics: volume fractions, Young-measure histograms,
//! rescaled deformation, sawtooth metrics, and energy-gap reporting.

use crate::discretize::{BcKind, BoundarySpec};
use crate::model::{self, Field, Kind, Params, ShearState};
use crate::residual::stress_field;

/// Nodes excluded at each end for plateau statistics (first and last 5%).
fn boundary_layer(n: usize) -> usize {
    (n / 20).max(1)
}

/// Volume fraction of the `alpha = 0` phase: fraction of cells whose value
/// (taken at the left node) lies within `tol` of zero.
pub fn volume_fraction(alpha: &[f64], tol: f64) -> f64 {
    let cells = alpha.len() - 1;
    let hits = alpha[..cells].iter().filter(|a| a.abs() <= tol).count();
    hits as f64 / cells as f64
}

/// Histogram of the nodal angles against the limiting atomic measure
/// `theta delta_0 + (1 - theta) delta_gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungHistogram {
    pub bin_edges: Vec<f64>,
    /// Node fractions per bin; sums to one.
    pub masses: Vec<f64>,
    /// Mass near the zero atom, measured like [`volume_fraction`].
    pub theta_hat: f64,
    /// Fraction of non-boundary-layer nodes within `tol` of `{0, gamma}`.
    pub concentration: f64,
}

pub fn young_histogram(alpha: &[f64], gamma: f64, bins: usize, tol: f64) -> YoungHistogram {
    assert!(bins >= 2, "histogram needs at least two bins");
    let n = alpha.len();
    let lo = alpha.iter().cloned().fold(f64::INFINITY, f64::min) - tol;
    let hi = alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + tol;
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut masses = vec![0.0; bins];
    for &a in alpha {
        let idx = (((a - lo) / width) as usize).min(bins - 1);
        masses[idx] += 1.0 / n as f64;
    }
    let layer = boundary_layer(n);
    let interior = &alpha[layer..n - layer];
    let near_atoms =
        interior.iter().filter(|a| a.abs() <= tol || (*a - gamma).abs() <= tol).count();
    YoungHistogram {
        bin_edges,
        masses,
        theta_hat: volume_fraction(alpha, tol),
        concentration: near_atoms as f64 / interior.len() as f64,
    }
}

/// Rescaled deformation `gamma x + N (u(x) - gamma x)` with `N` the node
/// count; amplifies the sawtooth so it is visible next to `gamma x`.
pub fn u_scale(state: &ShearState, gamma: f64) -> Field {
    let n = state.grid.n as f64;
    state
        .u
        .iter()
        .zip(&state.grid.nodes)
        .map(|(u, z)| gamma * z + n * (u - gamma * z))
        .collect()
}

/// Plateau level of the angle field: median over the non-boundary-layer nodes.
pub fn alpha_level(alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let layer = boundary_layer(n);
    let mut interior: Vec<f64> = alpha[layer..n - layer].to_vec();
    interior.sort_by(|a, b| a.total_cmp(b));
    let m = interior.len();
    if m % 2 == 1 {
        interior[m / 2]
    } else {
        0.5 * (interior[m / 2 - 1] + interior[m / 2])
    }
}

/// One-dimensional 2-means clustering; returns the (sorted) centers and the
/// assignment of each value to the nearer center.
fn two_means(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-9 {
        let center = 0.5 * (lo + hi);
        return (vec![center], vec![0; values.len()]);
    }
    let mut c = [lo, hi];
    let mut assign = vec![0usize; values.len()];
    for _ in 0..50 {
        for (i, v) in values.iter().enumerate() {
            assign[i] = usize::from((v - c[1]).abs() < (v - c[0]).abs());
        }
        let mut sums = [0.0; 2];
        let mut counts = [0usize; 2];
        for (i, v) in values.iter().enumerate() {
            sums[assign[i]] += v;
            counts[assign[i]] += 1;
        }
        let mut moved = 0.0;
        for k in 0..2 {
            if counts[k] > 0 {
                let next = sums[k] / counts[k] as f64;
                moved += (next - c[k]).abs();
                c[k] = next;
            }
        }
        if moved < 1e-14 {
            break;
        }
    }
    (vec![c[0], c[1]], assign)
}

/// Sawtooth and stress diagnostics of a computed state.
#[derive(Debug, Clone, PartialEq)]
pub struct MicrostructureReport {
    /// Volume fraction of the zero phase.
    pub theta: f64,
    /// Interior mass near the atoms `{0, gamma}`.
    pub concentration: f64,
    /// The one or two dominant cell-slope values.
    pub slope_levels: Vec<f64>,
    /// Number of switches between the slope clusters along the interval.
    pub sign_changes: usize,
    /// `max |tau - mean(tau)|` of the nodal stress field.
    pub stress_spread: f64,
    /// Energy of the state minus the energy of the homogeneous shear at the
    /// best constant angle feasible for `bc`.
    pub energy_gap: f64,
}

/// Feasible constant angle of the homogeneous reference for a constraint set.
pub fn reference_angle(bc: &BoundarySpec) -> f64 {
    match bc.kind {
        BcKind::DirichletAlpha => bc.alpha_d,
        BcKind::Consistent => (0.5 * bc.gamma).atan(),
        BcKind::ConsistentReduced => 0.5 * bc.gamma,
    }
}

pub fn microstructure_report(
    state: &ShearState,
    p: &Params,
    bc: &BoundarySpec,
    kind: Kind,
    atom_tol: f64,
) -> MicrostructureReport {
    let g = &state.grid;
    let hist = young_histogram(&state.alpha, bc.gamma, 32, atom_tol);

    let slopes: Vec<f64> =
        state.u.windows(2).map(|w| (w[1] - w[0]) / g.h).collect();
    let (slope_levels, assign) = two_means(&slopes);
    let sign_changes = if slope_levels.len() < 2 {
        0
    } else {
        assign.windows(2).filter(|w| w[0] != w[1]).count()
    };

    let tau = stress_field(state, p, kind);
    let mean = tau.iter().sum::<f64>() / tau.len() as f64;
    let stress_spread = tau.iter().fold(0.0_f64, |m, t| m.max((t - mean).abs()));

    let reference = ShearState::homogeneous(g, bc.gamma, reference_angle(bc));
    let energy_gap = model::energy(state, p, kind) - model::energy(&reference, p, kind);

    MicrostructureReport {
        theta: hist.theta_hat,
        concentration: hist.concentration,
        slope_levels,
        sign_changes,
        stress_spread,
        energy_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::make_grid;

    #[test]
    fn volume_fraction_extremes() {
        let alpha = vec![0.0; 24];
        assert_eq!(volume_fraction(&alpha, 0.05), 1.0);
        let alpha = vec![0.8; 24];
        assert_eq!(volume_fraction(&alpha, 0.05), 0.0);
    }

    #[test]
    fn histogram_of_constant_field() {
        let alpha = vec![0.0; 40];
        let h = young_histogram(&alpha, 0.8, 8, 0.05);
        assert!((h.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let occupied: Vec<&f64> = h.masses.iter().filter(|m| **m > 0.0).collect();
        assert_eq!(occupied.len(), 1);
        assert!((h.concentration - 1.0).abs() < 1e-12);
        assert!((h.theta_hat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_mass_sums_to_one() {
        let g = make_grid(59).unwrap();
        let alpha: Vec<f64> = g.nodes.iter().map(|z| (13.0 * z).sin()).collect();
        let h = young_histogram(&alpha, 0.8, 16, 0.05);
        assert!((h.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((h.theta_hat - volume_fraction(&alpha, 0.05)).abs() < 1e-15);
    }

    #[test]
    fn uniform_ramp_concentration_matches_counting_oracle() {
        let g = make_grid(401).unwrap();
        let gamma = 0.8;
        let tol = 0.05;
        let alpha: Vec<f64> = g.nodes.iter().map(|z| gamma * z).collect();
        let h = young_histogram(&alpha, gamma, 16, tol);
        // Direct counting over the same interior window.
        let layer = (g.n / 20).max(1);
        let interior = &alpha[layer..g.n - layer];
        let expected = interior
            .iter()
            .filter(|a| a.abs() <= tol || (*a - gamma).abs() <= tol)
            .count() as f64
            / interior.len() as f64;
        assert!((h.concentration - expected).abs() < 1e-12);
        // For a uniform profile the mass near the atoms is 2 tol / gamma,
        // reduced by the excluded boundary windows.
        let layer_frac = layer as f64 / g.n as f64;
        let closed_form = 2.0 * (tol / gamma - layer_frac) / (1.0 - 2.0 * layer_frac);
        assert!((h.concentration - closed_form).abs() < 0.01, "{}", h.concentration);
    }

    #[test]
    fn u_scale_identity_and_amplification() {
        let g = make_grid(23).unwrap();
        let state = ShearState::homogeneous(&g, 0.8, 0.0);
        let s = u_scale(&state, 0.8);
        for (a, b) in s.iter().zip(&state.u) {
            assert!((a - b).abs() < 1e-12);
        }
        // A perturbation of size c/N is amplified back to c.
        let c = 0.3;
        let mut state = ShearState::homogeneous(&g, 0.8, 0.0);
        for u in state.u.iter_mut() {
            *u += c / g.n as f64;
        }
        let s = u_scale(&state, 0.8);
        for (v, z) in s.iter().zip(&g.nodes) {
            assert!((v - (0.8 * z + c)).abs() < 1e-10);
        }
    }

    #[test]
    fn u_scale_inverts_exactly() {
        let g = make_grid(59).unwrap();
        let state = {
            let u = g.nodes.iter().map(|z| 0.8 * z + 0.01 * (9.0 * z).sin()).collect();
            ShearState::new(g.clone(), u, vec![0.0; g.n]).unwrap()
        };
        let s = u_scale(&state, 0.8);
        for i in 0..g.n {
            let back = (s[i] - 0.8 * g.nodes[i]) / g.n as f64 + 0.8 * g.nodes[i];
            assert!((back - state.u[i]).abs() <= 1e-14);
        }
    }

    #[test]
    fn report_on_stationary_homogeneous_state() {
        let g = make_grid(101).unwrap();
        let gamma = 0.8;
        let p = Params { mu: 1.0, mu_c: 1.0, l_c: 0.0, gamma, alpha_d: 0.0 };
        let bc = BoundarySpec::consistent(gamma, true);
        let state = ShearState::homogeneous(&g, gamma, (0.5 * gamma).atan());
        let r = microstructure_report(&state, &p, &bc, Kind::Full, 0.05);
        assert_eq!(r.sign_changes, 0);
        assert!(r.energy_gap.abs() <= 1e-12);
        assert!(r.stress_spread <= 1e-12);
        assert_eq!(r.slope_levels.len(), 1);
    }

    #[test]
    fn alpha_level_is_plateau_median() {
        let g = make_grid(101).unwrap();
        let mut alpha = vec![0.7610; g.n];
        // Boundary wiggles do not move the level.
        alpha[0] = 0.2;
        alpha[1] = 0.5;
        alpha[100] = 0.1;
        assert!((alpha_level(&alpha) - 0.7610).abs() < 1e-12);
    }
}
