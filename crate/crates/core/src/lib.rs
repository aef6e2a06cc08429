//! 1D simple shear in geometrically nonlinear Cosserat (micropolar) elasticity.
//!
//! The library covers the full pipeline for the unit-interval shear problem
//! with deformation `u` and microrotation angle `alpha`:
//!
//! * [`model`] — energy integrands (exact and reduced, in all published
//!   representations), discrete energies and analytic gradients, the
//!   Allen-Cahn potential split and a 3D Biot-tensor cross-check,
//! * [`analytic`] — the closed-form minimizer catalogue (`alpha_1..alpha_4`),
//!   second-variation tests, critical couple modulus and scaling checks,
//! * [`residual`] — Euler-Lagrange residuals, force stress tensors and the
//!   zero-length-scale algebraic limit system,
//! * [`discretize`] — grids, difference operators, trapezoidal quadrature and
//!   boundary-condition/DOF management,
//! * [`solve`] — dense BFGS minimization with strong-Wolfe line search,
//!   Jacobian-free Newton-GMRES for the algebraic system, restarted GMRES,
//!   and seeded microstructure initialization,
//! * [`analysis`] — volume fractions, Young-measure histograms, rescaled
//!   deformations and sawtooth diagnostics.
//!
//! All operations are pure functions of their inputs; nothing in this crate
//! holds global mutable state, so values can be shared freely across threads.

pub mod analysis;
pub mod analytic;
pub mod discretize;
pub mod model;
pub mod residual;
pub mod solve;

pub use analysis::{MicrostructureReport, YoungHistogram};
pub use discretize::{make_grid, BcKind, BoundarySpec, DofMap};
pub use model::{Field, FullForm, Grid, Kind, Params, PotentialSplit, ReducedForm, ShearState};
pub use residual::{ElResidual, ZetaConstant};
pub use solve::{LineSearch, SolveOptions, SolveReport};

/// Errors produced by constructors and operations with nontrivial domains.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid needs at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("field length {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{0}")]
    OutOfDomain(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("Legendre condition 2*mu + (mu_c - mu)*sqrt(gamma^2 + 4) > 0 violated")]
    LegendreViolated,
}

pub type Result<T> = std::result::Result<T, Error>;
