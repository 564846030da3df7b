//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: stencils need at least 3x3 points, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("grid spacing must be positive and finite, got dx={dx}, dy={dy}")]
    InvalidSpacing { dx: f64, dy: f64 },

    #[error("array length {actual} does not match grid size {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("negative density {value} at flat index {index}")]
    NegativeDensity { value: f64, index: usize },

    #[error("a closed loop needs at least 3 vertices, got {0}")]
    DegenerateLoop(usize),

    #[error("loop sample ({x}, {y}) leaves the grid interior")]
    LoopOutsideGrid { x: f64, y: f64 },

    #[error("sample point ({x}, {y}) is outside the grid")]
    SampleOutsideGrid { x: f64, y: f64 },

    #[error(
        "loop path touches masked points: {count} offending samples, first few: {samples:?}"
    )]
    MaskedPath {
        count: usize,
        samples: Vec<(f64, f64)>,
    },

    #[error("wave function vanishes on the loop path at ({x}, {y})")]
    ZeroOnPath { x: f64, y: f64 },

    #[error(
        "phase accumulated {value:.6} windings, not within {tolerance} of an integer \
         (loop undersampled or crossing a node?)"
    )]
    NonIntegerWinding { value: f64, tolerance: f64 },

    #[error("node has zero winding; nothing to factor out")]
    NoNode,

    #[error("residual winding {residual} around node after factoring out m={removed}")]
    ResidualWinding { residual: i32, removed: i32 },

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("no unmasked points available for {0}")]
    EmptyRegion(String),

    #[error("kinematic fields (v, u, Q) not computed yet")]
    MissingKinematicFields,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Format(#[from] serde_json::Error),
}
