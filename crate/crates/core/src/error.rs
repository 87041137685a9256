use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FkError {
    #[error("block does not close up into a periodic orbit (gap {gap})")]
    NotPeriodic { gap: f64 },

    #[error("bad quasi-orbit schedule: {0}")]
    BadSchedule(String),

    #[error("horizon {needed} exceeds available length {available}")]
    HorizonTooShort { needed: usize, available: usize },

    #[error("brute-force matching limited to n <= {max}, got {n}")]
    BruteTooLarge { n: usize, max: usize },

    #[error("word lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("matches have different horizons: {0} vs {1}")]
    HorizonMismatch(usize, usize),

    #[error("support of size {size} exceeds limit {max}")]
    SupportTooLarge { size: usize, max: usize },

    #[error("transport problem with {entries} cost entries exceeds limit {max}")]
    ProblemTooLarge { entries: usize, max: usize },

    #[error("marginals are not probability vectors (masses {left} and {right})")]
    InfeasibleMarginals { left: f64, right: f64 },

    #[error("not a good approximation: best achievable kappa {best_kappa} at this gamma")]
    NotGoodApproximation { best_kappa: f64 },

    #[error("invalid periods: {0}")]
    InvalidPeriods(String),

    #[error("budget infeasible at level {level}: {constraint}")]
    BudgetInfeasible { level: usize, constraint: String },

    #[error("no weight for symbol {0}")]
    MissingWeight(u8),

    #[error("no adequate match: gap {gap} is not below delta {delta}")]
    NoAdequateMatch { gap: f64, delta: f64 },

    #[error("no grid cut avoids boundary-adjacent sample mass")]
    NoGoodCut,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, FkError>;
