//! Error types shared by every module.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, TeqError>;

/// Everything that can go wrong while validating inputs or running the
/// numerics. Each variant maps to a stable machine-readable code via
/// [`TeqError::code`] so the CLI can emit structured errors.
#[derive(Debug, Error)]
pub enum TeqError {
    #[error("matrix is not unitary: max deviation {deviation:.3e} exceeds {eps:.3e}")]
    NotUnitary { deviation: f64, eps: f64 },

    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds {eps:.3e}")]
    NotHermitian { deviation: f64, eps: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64, eps: f64 },

    #[error("vector is not unit norm: |v| = {norm} deviates by more than {eps:.3e}")]
    NotUnitVector { norm: f64, eps: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid POVM: {}", violations.join("; "))]
    InvalidPovm { violations: Vec<String> },

    #[error("states are linearly dependent: sigma_min(Phi) = {sigma_min:.3e} <= {eps:.3e}")]
    LinearlyDependentStates { sigma_min: f64, eps: f64 },

    #[error("generator does not have order {expected}: U^{failed_power} is within {deviation:.3e} of identity")]
    GeneratorOrder {
        expected: usize,
        failed_power: usize,
        deviation: f64,
    },

    #[error("USD invariant violated: {what} off by {magnitude:.3e}")]
    UsdInvariant { what: &'static str, magnitude: f64 },

    #[error("eigensolver failed to converge on {dim}x{dim} matrix ({what})")]
    NumericFailure { dim: usize, what: &'static str },

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("all element costs are zero: time split is degenerate")]
    DegenerateSplit,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl TeqError {
    /// Stable machine-readable error code used in the CLI's stderr JSON.
    pub fn code(&self) -> &'static str {
        match self {
            TeqError::NotUnitary { .. } => "not_unitary",
            TeqError::NotHermitian { .. } => "not_hermitian",
            TeqError::NotPsd { .. } => "not_psd",
            TeqError::NotUnitVector { .. } => "not_unit_vector",
            TeqError::DimensionMismatch { .. } => "dimension_mismatch",
            TeqError::InvalidPovm { .. } => "invalid_povm",
            TeqError::LinearlyDependentStates { .. } => "linearly_dependent_states",
            TeqError::GeneratorOrder { .. } => "generator_order",
            TeqError::UsdInvariant { .. } => "usd_invariant",
            TeqError::NumericFailure { .. } => "numeric_failure",
            TeqError::OutOfRange { .. } => "out_of_range",
            TeqError::DegenerateSplit => "degenerate_split",
            TeqError::InvalidInput(_) => "invalid_input",
            TeqError::Io(_) => "io",
        }
    }

    /// True for errors caused by bad input rather than internal failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, TeqError::NumericFailure { .. } | TeqError::Io(_))
    }
}
