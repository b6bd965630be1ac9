use thiserror::Error;

/// Failures raised by the gate, channel and scenario layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    /// `|⟨f|i⟩|` vanishes, so the modular value ratio is undefined.
    #[error("pre- and postselection are orthogonal (|<f|i>| = {overlap:e})")]
    OrthogonalSelection { overlap: f64 },

    /// Postselection never succeeds; there is no normalized output state.
    #[error("postselection success probability is zero (p = {probability:e})")]
    ZeroProbability { probability: f64 },

    #[error("regime {regime} hierarchy violated: {detail}")]
    HierarchyViolation { regime: String, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
