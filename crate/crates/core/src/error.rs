//! Error type shared across the crate.
//!
//! Errors fall into two broad classes that the CLI maps onto distinct exit
//! codes: configuration errors (bad parameters, unknown presets, malformed
//! input files) and runtime failures (an integration that lost trace or
//! hermiticity beyond tolerance, or a state that stopped being physical).

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An operator or state had the wrong shape for the context it was used in.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A physical or numerical parameter was out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The memory kernel was queried with a source time later than the field time.
    #[error("kernel queried with source time s={s} after field time t={t}")]
    KernelTimeOrder { t: f64, s: f64 },

    /// The delta kernel denotes the memoryless limit and has no pointwise value.
    #[error("delta kernel has no pointwise value; it denotes the memoryless limit")]
    DeltaKernelPointwise,

    /// An input matrix failed a density-matrix sanity check.
    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    /// A state eigenvalue was negative far beyond numerical noise.
    #[error("state eigenvalue {value:.3e} is below the physical tolerance -1e-4")]
    UnphysicalEigenvalue { value: f64 },

    /// The imaginary part of a nominally real expectation value was too large.
    #[error("expectation value has imaginary residue {residue:.3e} (limit {limit:.1e})")]
    ImaginaryResidue { residue: f64, limit: f64 },

    /// The integrator exceeded a trace or hermiticity drift tolerance.
    #[error("integrator aborted at step {step} (t={t:.6}): {reason}")]
    IntegratorAbort { step: usize, t: f64, reason: String },

    /// A named scenario preset does not exist.
    #[error("unknown preset '{name}'; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    /// Partial trace was asked to keep an empty set of subsystems.
    #[error("partial trace must keep at least one subsystem")]
    EmptyKeep,

    /// A tail-window statistic was requested over a window with no samples.
    #[error("tail window [{lo}, {hi}] contains no samples")]
    EmptyWindow { lo: f64, hi: f64 },

    /// A sweep point failed; wraps the underlying error with its coordinates.
    #[error("sweep '{param}' at value {value}: {source}")]
    SweepPoint {
        param: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    /// A configuration file or flag combination could not be resolved.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure while reading config or writing results.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A dense eigendecomposition failed to converge.
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl Error {
    /// True for errors that indicate bad user input rather than a runtime failure.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::KernelTimeOrder { .. }
            | Error::DeltaKernelPointwise
            | Error::InvalidState(_)
            | Error::UnknownPreset { .. }
            | Error::EmptyKeep
            | Error::EmptyWindow { .. }
            | Error::Config(_) => true,
            Error::SweepPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
