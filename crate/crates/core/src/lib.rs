//! Numerical laboratory for quantum mechanics in flow (Madelung) variables.
//!
//! The crate analyses 2D wave fields through their density and velocity
//! instead of the wave function: it detects vortices and measures their
//! winding (the loop quantization of the phase), classifies nodes by the
//! radial exponent of the density (finite, vanishing or divergent density
//! Laplacian), verifies the energy-density balance of the rotationally
//! invariant solution family, applies subquantum core regularizations, and
//! evolves discontinuous states on the circle spectrally to exhibit the
//! wave-function/flow-variable mismatch for non-integer winding.
//!
//! With the `parallel` feature (default) the per-point kernels run on rayon;
//! without it everything falls back to sequential loops with identical
//! results.

pub mod alpha;
pub mod angle;
pub mod circle;
pub mod error;
pub mod exec;
pub mod field;
pub mod flow;
pub mod grid;
pub mod io;
pub mod loops;
pub mod ops;
pub mod synth;
pub mod vortex;

pub use alpha::{
    alpha_fields, alpha_scan, balance_residual, penalty_balance_at_core, regularize_flow,
    shift_density, AlphaModel, AlphaScanRow, Annulus, BalanceReport, PenaltyForm,
};
pub use circle::{
    density_drift, evolve_density, flow_stationary_check, fourier_project, CircleDensity,
    CircleState, DriftReport, StationaryCheck,
};
pub use error::{Error, Result};
pub use field::{ComplexField2D, FieldStats, ScalarField2D, VectorField2D};
pub use flow::{
    default_eps_rho, kinematic_fields, polar_compose, polar_decompose, q_from_sqrt_form,
    stationary_residuals, FlowFields, StationaryResidualReport,
};
pub use grid::Grid2D;
pub use loops::{line_integral, Loop};
pub use ops::{curl2d, divergence, gradient, laplacian};
pub use synth::{generate, Envelope, SynthKind, SynthOutput, SynthSpec, VortexZero};
pub use vortex::{
    assess_regularity, beta_exponents, circulation, classify_regularity, detect_nodes, factor_out,
    loop_winding, BetaExponents, FactorOut, NodeReport, Regularity, RegularityAssessment,
    RegularityConfig,
};
