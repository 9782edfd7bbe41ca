use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H_ij - conj(H_ji)| = {max_asymmetry:e} (scale {scale:e})")]
    NotHermitian { max_asymmetry: f64, scale: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inverse temperature must be finite and positive, got {0}")]
    InvalidBeta(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid projector family: {0}")]
    InvalidProjectors(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(
        "well escapes the grid for mode {mode} at coupling eigenvalue {cluster_value}: \
         half-width {half_width:.4} < 4 x thermal width {thermal_width:.4}"
    )]
    WellEscape {
        mode: usize,
        cluster_value: f64,
        half_width: f64,
        thermal_width: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver failed to converge")]
    EigenFailure,
}
