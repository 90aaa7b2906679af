use thiserror::Error;

/// Errors surfaced by mesh construction, calculus operations and the
/// spectral machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh construction: {0}")]
    MeshConstruction(String),

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("cochains live on different complexes")]
    ComplexMismatch,

    #[error("cochains carry different Lie algebras")]
    AlgebraMismatch,

    #[error("operation not defined for degree {degree} on an {n}-complex: {reason}")]
    DegreeOutOfRange {
        degree: usize,
        n: usize,
        reason: &'static str,
    },

    #[error("slot mismatch: {0}")]
    SlotMismatch(String),

    #[error(
        "spectral gap ambiguity: no clear kernel separation \
         (candidate split {candidate}, ratio {ratio:.3e} < required {required:.3e})"
    )]
    SpectralGap {
        candidate: usize,
        ratio: f64,
        required: f64,
    },

    #[error("obstructed: nontrivial cohomology class, periods {periods:?}")]
    NontrivialClass { periods: Vec<f64> },

    #[error("model construction: {0}")]
    ModelConstruction(String),

    #[error("operator composition residual {residual:.3e} above threshold for pair {pair}")]
    CompositionResidual { pair: String, residual: f64 },

    #[error("linear solver did not converge: {0}")]
    SolverFailure(String),

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;
