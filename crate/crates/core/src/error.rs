use thiserror::Error;

/// Errors raised when inputs violate the structural invariants of a game,
/// distribution, or dilemma specification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),

    #[error("stochastic dominance violated for player {player} at t = {at}")]
    DominanceViolation { player: usize, at: f64 },

    #[error("type-strategy map does not match distribution: {0}")]
    DomainMismatch(String),

    #[error("negative residual mass {value} at atom {index} of the dominating distribution")]
    NegativeResidual { index: usize, value: f64 },

    #[error("invalid dilemma: {0}")]
    InvalidDilemma(String),

    #[error("belief β is required for {0}")]
    MissingBelief(&'static str),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid PD payoffs: {0}")]
    InvalidPayoffs(String),

    #[error("{0} requires a continuous tolerance CDF")]
    NotContinuous(&'static str),

    #[error("grid must have at least {min} points, got {got}")]
    DegenerateGrid { min: usize, got: usize },

    #[error("game is not a symmetric 2x2 game: {0}")]
    NotSymmetric2x2(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
