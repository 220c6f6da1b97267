//! Error types shared across the crate.

use thiserror::Error;

/// Errors surfaced by spectral operators, solvers and I/O.
#[derive(Debug, Error)]
pub enum MkgError {
    /// A Fourier symbol is singular at an occupied mode and no convention
    /// covers it (e.g. `1/|ξ|²` against a field with nonzero mean).
    #[error("singular symbol at occupied mode {mode:?} (|coeff| = {amplitude:.3e})")]
    SingularSymbol { mode: Vec<i64>, amplitude: f64 },

    /// An occupied space-time mode lies inside the cone guard band, so the
    /// wave-operator inverse is not defined there.
    #[error("cone resonance at (tau, xi) = ({tau:.6}, {xi:?}): ||tau|-|xi|| = {gap:.3e} < guard {guard:.3e}")]
    ConeResonance {
        tau: f64,
        xi: Vec<i64>,
        gap: f64,
        guard: f64,
    },

    /// A spatial frequency parallel to the sector direction survived the
    /// small-angle cutoff, so `Δ_{ω⊥}` cannot be inverted.
    #[error("frequency {xi:?} parallel to sector direction survived the small-angle cutoff")]
    ParallelFrequency { xi: Vec<i64> },

    /// Time step violates the stability bound for the leapfrog stepper.
    #[error("CFL violation: dt = {dt:.3e} exceeds bound {bound:.3e}")]
    CflViolation { dt: f64, bound: f64 },

    /// An elliptic solve was requested against a source with nonzero mean.
    #[error("nonzero-mean source for elliptic solve (mean amplitude {amplitude:.3e})")]
    NonzeroMeanSource { amplitude: f64 },

    /// Requested rescaling factor does not map onto a companion grid.
    #[error("no companion grid for scaling factor {lambda}")]
    CompanionGridUnavailable { lambda: f64 },

    /// Inputs to the parametrix assembly are not localized as required.
    #[error("localization violation: {0}")]
    LocalizationViolation(String),

    /// Strichartz exponents outside the admissible range.
    #[error("inadmissible Strichartz pair (q, r) = ({q}, {r}): 1/q + (3/2)/r > 3/4")]
    InadmissibleExponents { q: f64, r: f64 },

    /// Too few time samples for a finite-difference diagnostic.
    #[error("need at least {needed} time samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    /// Grid mismatch between operands.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Configuration text failed to parse or validate.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    /// Snapshot format violation.
    #[error("snapshot format error: {0}")]
    Snapshot(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, MkgError>;
