//! Grid construction, finite differences, trapezoidal quadrature, and
//! boundary-condition/DOF management for all constraint sets.
//!
//! Two difference operators coexist. The public [`diff`] uses second-order
//! one-sided stencils at the endpoints and serves the coupling conditions
//! and diagnostics. The energy path ([`diff_energy`]) uses first-order
//! endpoint slopes: with trapezoidal weights its adjoint telescopes exactly,
//! so the discrete quadrature of any derivative field reproduces
//! `u(1) - u(0)` and constant-stress states are exact stationary points.

use crate::model::{Field, Grid, ShearState};
use crate::{Error, Result};

/// Uniform grid on `[0, 1]` with `n` nodes. Rejects `n < 3`.
pub fn make_grid(n: usize) -> Result<Grid> {
    if n < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: n });
    }
    let h = 1.0 / (n - 1) as f64;
    let nodes = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    Ok(Grid { n, h, nodes })
}

/// Discrete derivative: central differences at interior nodes, second-order
/// one-sided at the endpoints. Exact for affine fields everywhere and for
/// quadratics at interior nodes.
pub fn diff(f: &[f64], g: &Grid) -> Field {
    assert_eq!(f.len(), g.n, "field length must match grid");
    let n = g.n;
    let h = g.h;
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Derivative used inside the discrete energy: central at interior nodes,
/// first-order one-sided at the endpoints. Exact for affine fields, and its
/// trapezoidal quadrature telescopes to `f(1) - f(0)` exactly.
pub fn diff_energy(f: &[f64], g: &Grid) -> Field {
    assert_eq!(f.len(), g.n, "field length must match grid");
    let n = g.n;
    let h = g.h;
    let mut d = vec![0.0; n];
    d[0] = (f[1] - f[0]) / h;
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
    d
}

/// Adjoint of [`diff_energy`]: accumulates `D^T q` into `out`.
pub(crate) fn add_diff_energy_adjoint(q: &[f64], g: &Grid, out: &mut [f64]) {
    let n = g.n;
    let h = g.h;
    out[0] -= q[0] / h;
    out[1] += q[0] / h;
    for i in 1..n - 1 {
        out[i - 1] -= q[i] / (2.0 * h);
        out[i + 1] += q[i] / (2.0 * h);
    }
    out[n - 2] -= q[n - 1] / h;
    out[n - 1] += q[n - 1] / h;
}

/// Second-order one-sided boundary slopes `(u'(0), u'(1))`; these define the
/// consistent coupling conditions.
pub fn boundary_slopes(f: &[f64], g: &Grid) -> (f64, f64) {
    let n = g.n;
    let h = g.h;
    let left = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    let right = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    (left, right)
}

/// Repeated trapezoidal rule `h (f_0/2 + f_1 + ... + f_{n-2} + f_{n-1}/2)`.
pub fn trapezoid(density: &[f64], g: &Grid) -> f64 {
    assert_eq!(density.len(), g.n, "field length must match grid");
    let n = g.n;
    let inner: f64 = density[1..n - 1].iter().sum();
    g.h * (0.5 * density[0] + inner + 0.5 * density[n - 1])
}

/// Which constraint set the unknowns live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    /// `alpha(0) = alpha(1) = alpha_d` prescribed.
    DirichletAlpha,
    /// Consistent coupling `u'(0) = 2 tan(alpha(0))`, `u'(1) = 2 tan(alpha(1))`.
    Consistent,
    /// Reduced coupling `u'(0) = 2 alpha(0)`, `u'(1) = 2 alpha(1)`.
    ConsistentReduced,
}

/// Boundary conditions: `u(0) = 0` and `u(1) = gamma` always hold; the kind
/// selects the angle constraints, and `symmetry` additionally enforces
/// `u'(0) = u'(1)` through the first-order boundary slopes (eliminating one
/// slope DOF rather than penalizing).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub kind: BcKind,
    pub symmetry: bool,
    pub alpha_d: f64,
    pub gamma: f64,
}

impl BoundarySpec {
    pub fn dirichlet(gamma: f64, alpha_d: f64, symmetry: bool) -> Self {
        Self { kind: BcKind::DirichletAlpha, symmetry, alpha_d, gamma }
    }

    pub fn consistent(gamma: f64, symmetry: bool) -> Self {
        Self { kind: BcKind::Consistent, symmetry, alpha_d: 0.0, gamma }
    }

    pub fn consistent_reduced(gamma: f64, symmetry: bool) -> Self {
        Self { kind: BcKind::ConsistentReduced, symmetry, alpha_d: 0.0, gamma }
    }

    /// Boundary angle implied by the boundary slope under this constraint set.
    fn derived_alpha(&self, slope: f64) -> f64 {
        match self.kind {
            BcKind::DirichletAlpha => self.alpha_d,
            BcKind::Consistent => (0.5 * slope).atan(),
            BcKind::ConsistentReduced => 0.5 * slope,
        }
    }

    /// `d(alpha_boundary)/d(slope)` for the chain rule.
    fn derived_alpha_slope(&self, slope: f64) -> f64 {
        match self.kind {
            BcKind::DirichletAlpha => 0.0,
            BcKind::Consistent => 2.0 / (4.0 + slope * slope),
            BcKind::ConsistentReduced => 0.5,
        }
    }

    /// Largest violation of the constraint identities by `state`.
    pub fn max_defect(&self, state: &ShearState) -> f64 {
        let g = &state.grid;
        let n = g.n;
        let mut d: f64 = state.u[0].abs().max((state.u[n - 1] - self.gamma).abs());
        let (p0, p1) = boundary_slopes(&state.u, g);
        match self.kind {
            BcKind::DirichletAlpha => {
                d = d.max((state.alpha[0] - self.alpha_d).abs());
                d = d.max((state.alpha[n - 1] - self.alpha_d).abs());
            }
            BcKind::Consistent => {
                d = d.max((2.0 * state.alpha[0].tan() - p0).abs());
                d = d.max((2.0 * state.alpha[n - 1].tan() - p1).abs());
            }
            BcKind::ConsistentReduced => {
                d = d.max((2.0 * state.alpha[0] - p0).abs());
                d = d.max((2.0 * state.alpha[n - 1] - p1).abs());
            }
        }
        if self.symmetry {
            let s0 = (state.u[1] - state.u[0]) / g.h;
            let s1 = (state.u[n - 1] - state.u[n - 2]) / g.h;
            d = d.max((s0 - s1).abs());
        }
        d
    }
}

/// Packs the free unknowns of a [`BoundarySpec`] into a flat vector and back.
///
/// Layout: `[u_1 .. u_{n-2}]` (dropping `u_{n-2}` when symmetry eliminates
/// it) followed by `[alpha_1 .. alpha_{n-2}]`. Boundary angles of the
/// consistent sets are synthesized from the completed `u`, so every `unpack`
/// output is feasible.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub bc: BoundarySpec,
    grid: Grid,
    n_u: usize,
    n_alpha: usize,
}

impl DofMap {
    pub fn new(bc: BoundarySpec, grid: &Grid) -> Result<Self> {
        let needed = if bc.symmetry { 5 } else { 3 };
        if grid.n < needed {
            return Err(Error::TooFewNodes { needed, got: grid.n });
        }
        let n_u = grid.n - 2 - usize::from(bc.symmetry);
        let n_alpha = grid.n - 2;
        Ok(Self { bc, grid: grid.clone(), n_u, n_alpha })
    }

    /// Number of free degrees of freedom.
    pub fn count(&self) -> usize {
        self.n_u + self.n_alpha
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Extracts the free unknowns of a feasible state.
    pub fn pack(&self, state: &ShearState) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.count());
        x.extend_from_slice(&state.u[1..1 + self.n_u]);
        x.extend_from_slice(&state.alpha[1..1 + self.n_alpha]);
        x
    }

    /// Rebuilds a feasible state: constrained entries are synthesized from
    /// the free ones.
    pub fn unpack(&self, x: &[f64]) -> Result<ShearState> {
        if x.len() != self.count() {
            return Err(Error::LengthMismatch { expected: self.count(), found: x.len() });
        }
        let n = self.grid.n;
        let mut u = vec![0.0; n];
        u[1..1 + self.n_u].copy_from_slice(&x[..self.n_u]);
        if self.bc.symmetry {
            // u'(0) = u'(1) with first-order slopes: u_1 - u_0 = u_{n-1} - u_{n-2}.
            u[n - 2] = self.bc.gamma - x[0];
        }
        u[n - 1] = self.bc.gamma;

        let mut alpha = vec![0.0; n];
        alpha[1..1 + self.n_alpha].copy_from_slice(&x[self.n_u..]);
        let (p0, p1) = boundary_slopes(&u, &self.grid);
        alpha[0] = self.bc.derived_alpha(p0);
        alpha[n - 1] = self.bc.derived_alpha(p1);
        ShearState::new(self.grid.clone(), u, alpha)
    }

    /// Chains raw nodal gradients (every nodal value treated independent)
    /// through the constraint eliminations, returning the gradient in packed
    /// coordinates.
    pub fn pack_gradient(&self, state: &ShearState, gu_raw: &[f64], ga_raw: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let h = self.grid.h;
        let mut gu = gu_raw.to_vec();

        // Derived boundary angles depend on the second-order boundary slopes.
        let (p0, p1) = boundary_slopes(&state.u, &self.grid);
        let phi0 = self.bc.derived_alpha_slope(p0);
        let phi1 = self.bc.derived_alpha_slope(p1);
        // d p0 / d(u_1, u_2) = (4, -1)/(2h); d p1 / d(u_{n-2}, u_{n-3}) = (-4, 1)/(2h).
        gu[1] += ga_raw[0] * phi0 * 2.0 / h;
        gu[2] += ga_raw[0] * phi0 * (-0.5) / h;
        gu[n - 2] += ga_raw[n - 1] * phi1 * (-2.0) / h;
        gu[n - 3] += ga_raw[n - 1] * phi1 * 0.5 / h;

        if self.bc.symmetry {
            // u_{n-2} = gamma - u_1.
            let g_elim = gu[n - 2];
            gu[1] -= g_elim;
        }

        let mut packed = Vec::with_capacity(self.count());
        packed.extend_from_slice(&gu[1..1 + self.n_u]);
        packed.extend_from_slice(&ga_raw[1..1 + self.n_alpha]);
        packed
    }

    /// Lays a packed gradient back out as nodal fields with zeros at the
    /// constrained slots.
    pub fn scatter_gradient(&self, packed: &[f64]) -> (Field, Field) {
        let n = self.grid.n;
        let mut gu = vec![0.0; n];
        let mut ga = vec![0.0; n];
        gu[1..1 + self.n_u].copy_from_slice(&packed[..self.n_u]);
        ga[1..1 + self.n_alpha].copy_from_slice(&packed[self.n_u..]);
        (gu, ga)
    }
}

/// Free-function views of the [`DofMap`] round trip.
pub fn dof_pack(state: &ShearState, bc: &BoundarySpec) -> Result<Vec<f64>> {
    Ok(DofMap::new(bc.clone(), &state.grid)?.pack(state))
}

pub fn dof_unpack(x: &[f64], bc: &BoundarySpec, grid: &Grid) -> Result<ShearState> {
    DofMap::new(bc.clone(), grid)?.unpack(x)
}
