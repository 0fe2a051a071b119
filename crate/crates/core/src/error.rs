use thiserror::Error;

pub type Result<T, E = StpError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StpError {
    #[error("invalid shape: {0}")]
    BadShape(String),
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("enumeration of {needed} subsets exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("columns are not unit-normalized (column {0})")]
    NotNormalized(usize),
    #[error("candidate {0} is dependent on earlier basis elements")]
    DependentInput(usize),
    #[error("basis does not span the signal (residual {0:e})")]
    InsufficientBasis(f64),
    #[error("not a BIBD: {0}")]
    NotBibd(String),
    #[error("cannot place a 1 of column {col} within {budget} rows")]
    NotExpandable { col: usize, budget: usize },
    #[error("diagonal entries must be positive and pairwise distinct: {0}")]
    BadDiag(String),
    #[error("column {col} has degree {degree}, embedding has {rows} rows")]
    DegreeMismatch { col: usize, degree: usize, rows: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("entry {value} at index {index} violates {kind} matrix constraint")]
    BadEntry {
        kind: &'static str,
        index: usize,
        value: f64,
    },
    #[error("no support meets the residual bound")]
    NoSolution,
    #[error("at least two distinct sparse solutions fit the measurement")]
    NotUnique,
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl StpError {
    /// Stable variant name, echoed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            StpError::BadShape(_) => "BadShape",
            StpError::NonFinite(_) => "NonFinite",
            StpError::ZeroVector => "ZeroVector",
            StpError::ZeroColumn(_) => "ZeroColumn",
            StpError::BudgetExceeded { .. } => "BudgetExceeded",
            StpError::NotNormalized(_) => "NotNormalized",
            StpError::DependentInput(_) => "DependentInput",
            StpError::InsufficientBasis(_) => "InsufficientBasis",
            StpError::NotBibd(_) => "NotBibd",
            StpError::NotExpandable { .. } => "NotExpandable",
            StpError::BadDiag(_) => "BadDiag",
            StpError::DegreeMismatch { .. } => "DegreeMismatch",
            StpError::Unsupported(_) => "Unsupported",
            StpError::BadEntry { .. } => "BadEntry",
            StpError::NoSolution => "NoSolution",
            StpError::NotUnique => "NotUnique",
            StpError::Parse(_) => "Parse",
            StpError::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for StpError {
    fn from(e: std::io::Error) -> Self {
        StpError::Io(e.to_string())
    }
}
