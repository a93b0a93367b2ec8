//! Error type shared by all operators.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CrtError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field has {got} values but grid holds {want} samples")]
    LengthMismatch { got: usize, want: usize },

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("grids do not match: {0}")]
    ShapeMismatch(String),

    #[error("spatial dimension {m} unsupported (need 1 <= m <= {max})")]
    UnsupportedDimension { m: usize, max: usize },

    #[error("half-opening angle {phi} outside (0, pi/2)")]
    InvalidAngle { phi: f64 },

    #[error(
        "support reaches the grid boundary on axis {axis}; \
         pad that axis by at least {needed_cells} zero cell(s) before transforming"
    )]
    SupportTouchesBoundary { axis: usize, needed_cells: usize },

    #[error("weight 1/|y| is not integrable over a 1-dimensional vertex; need m >= 2")]
    WeightNonIntegrable,

    #[error("symbol requires Im(sigma) < 0, got {im}")]
    SigmaNotDamped { im: f64 },

    #[error("operator needs phi = pi/4 here; rescale coordinates first (got phi = {phi})")]
    AngleNotQuarterPi { phi: f64 },

    #[error("grid too small: axis {axis} has {count} samples, need at least {need}")]
    GridTooSmall {
        axis: usize,
        count: usize,
        need: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("quadrature for {what} did not reach tolerance {tol} (best {best})")]
    QuadratureDiverged { what: String, tol: f64, best: f64 },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, CrtError>;
