use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid base {0}: must be at least 2")]
    InvalidBase(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    #[error("state counts differ: {0} vs {1}")]
    StateCountMismatch(usize, usize),

    #[error("operation has {0} states; a GEN/PROP/KILL classification needs exactly 2")]
    NotBinaryState(usize),

    #[error("symbol {0} acts as negation (0 -> 1, 1 -> 0)")]
    NegationPresent(usize),

    #[error("matrix dimension {0} exceeds the supported maximum of {1}")]
    DimensionTooLarge(usize, usize),

    #[error("seed has {got} terms but the recurrence needs {need}")]
    SeedTooShort { got: usize, need: usize },

    #[error("recurrence produced a negative term at index {0}")]
    NegativeTerm(usize),

    #[error("enumeration of {words} words exceeds the budget of {budget}")]
    BudgetExceeded { words: String, budget: u64 },

    #[error("symbol {symbol} at position {position} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange {
        position: usize,
        symbol: usize,
        alphabet: usize,
    },

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("mu must lie strictly between 0 and 1, got {0}")]
    InvalidMu(String),

    #[error("no interior root: {0}")]
    NoInteriorRoot(String),

    #[error("tolerance not met: residual {residual:e} > {tol:e}")]
    ToleranceNotMet { residual: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation spec: {0}")]
    Spec(String),

    #[error("malformed output: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name, used on stderr by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidDecomposition(_) => "InvalidDecomposition",
            Error::InvalidBase(_) => "InvalidBase",
            Error::NotPrime(_) => "NotPrime",
            Error::NotApplicable(_) => "NotApplicable",
            Error::InvalidOperation(_) => "InvalidOperation",
            Error::StateCountMismatch(..) => "StateCountMismatch",
            Error::NotBinaryState(_) => "NotBinaryState",
            Error::NegationPresent(_) => "NegationPresent",
            Error::DimensionTooLarge(..) => "DimensionTooLarge",
            Error::SeedTooShort { .. } => "SeedTooShort",
            Error::NegativeTerm(_) => "NegativeTerm",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::SymbolOutOfRange { .. } => "SymbolOutOfRange",
            Error::DegenerateChain(_) => "DegenerateChain",
            Error::DegenerateDistribution(_) => "DegenerateDistribution",
            Error::InvalidMu(_) => "InvalidMu",
            Error::NoInteriorRoot(_) => "NoInteriorRoot",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Spec(_) => "SpecError",
            Error::Parse(_) => "ParseError",
        }
    }
}
