use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probabilities: {0}")]
    Probability(String),
    #[error("market admits arbitrage: no strictly positive state-price vector exists")]
    Arbitrage,
    #[error("market is redundant: return matrix has rank {rank} < {assets} assets")]
    Redundancy { rank: usize, assets: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("scenario generation failed: {0}")]
    Generation(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("objective unbounded below: {0}")]
    UnboundedBelow(String),
    #[error("budget identity violated: shares cost {cost}, wealth {wealth}")]
    Budget { cost: f64, wealth: f64 },
    #[error("dimension {0} not supported (at most 2 assets)")]
    Dimension(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Probability(_) => "ProbabilityError",
            Error::Arbitrage => "ArbitrageError",
            Error::Redundancy { .. } => "RedundancyError",
            Error::Shape(_) => "ShapeError",
            Error::Generation(_) => "GenerationError",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::Domain(_) => "DomainError",
            Error::NoRoot(_) => "NoRoot",
            Error::UnboundedBelow(_) => "UnboundedBelow",
            Error::Budget { .. } => "BudgetError",
            Error::Dimension(_) => "DimensionError",
            Error::Precondition(_) => "PreconditionError",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::Infeasible(_) => "InfeasibleError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}
