use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate lattice: symplectic area {area:e} is below {threshold:e}")]
    DegenerateLattice { area: f64, threshold: f64 },

    #[error("{r} is not invertible modulo {n}")]
    NotInvertible { r: i64, n: i64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// The transmissivity is not of the form q/(q + p d1 d2) with coprime Bézout data.
    #[error("inadmissible transmissivity: {0}")]
    Inadmissible(String),

    #[error("problem size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("gauge factorization violated: {0}")]
    FactorizationViolated(String),

    /// Corrected amplitudes still carry gauge entanglement with the logical labels.
    #[error("residual gauge after correction: {0}")]
    ResidualGauge(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
