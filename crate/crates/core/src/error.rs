use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value must be positive")]
    NonPositive,

    #[error("table is not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("piece {0} does not satisfy its slope identity")]
    SlopeMismatch(usize),
    #[error("slope of piece {0} is not a power of tau")]
    NotTauPower(usize),
    #[error("{0} does not lie in Z[tau]")]
    NotInRing(String),
    #[error("malformed table: {0}")]
    BadTable(String),
    #[error("point lies outside the domain of the map")]
    OutOfDomain,
    #[error("range of the first map does not match the domain of the second")]
    DomainMismatch,
    #[error("map is not an element of F_tau")]
    NotFtau,
    #[error("lift does not have degree one (g(1) - g(0) = {0})")]
    DegreeNotOne(String),
    #[error("trees have {0} and {1} leaves")]
    LeafCountMismatch(usize, usize),
    #[error("shift {0} is out of range for {1} leaves")]
    BadShift(i64, usize),

    #[error("piece count {0} exceeds the configured cap {1}")]
    PowerBudgetExceeded(usize, usize),
    #[error("search budget exhausted: {0}")]
    SearchBudgetExceeded(String),

    #[error("bad tuple: {0}")]
    BadTuple(String),
    #[error("element must not be the identity")]
    IdentityInput,
    #[error("no room in target: {0}")]
    NoRoomInTarget(String),

    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(Box<Error>),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

impl Error {
    /// Budget exhaustion is inconclusive rather than wrong input.
    pub fn is_budget(&self) -> bool {
        match self {
            Error::PowerBudgetExceeded(..) | Error::SearchBudgetExceeded(_) => true,
            Error::Validation(inner) => inner.is_budget(),
            _ => false,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::NonPositive => "NonPositive",
            Error::NotIncreasing(_) => "NotIncreasing",
            Error::SlopeMismatch(_) => "SlopeMismatch",
            Error::NotTauPower(_) => "NotTauPower",
            Error::NotInRing(_) => "NotInRing",
            Error::BadTable(_) => "BadTable",
            Error::OutOfDomain => "OutOfDomain",
            Error::DomainMismatch => "DomainMismatch",
            Error::NotFtau => "NotFtau",
            Error::DegreeNotOne(_) => "DegreeNotOne",
            Error::LeafCountMismatch(..) => "LeafCountMismatch",
            Error::BadShift(..) => "BadShift",
            Error::PowerBudgetExceeded(..) => "PowerBudgetExceeded",
            Error::SearchBudgetExceeded(_) => "SearchBudgetExceeded",
            Error::BadTuple(_) => "BadTuple",
            Error::IdentityInput => "IdentityInput",
            Error::NoRoomInTarget(_) => "NoRoomInTarget",
            Error::Syntax { .. } => "SyntaxError",
            Error::Type(_) => "TypeError",
            Error::Schema(_) => "SchemaError",
            Error::Validation(_) => "ValidationError",
            Error::Certificate(_) => "CertificateError",
        }
    }
}
