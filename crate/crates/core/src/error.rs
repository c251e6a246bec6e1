use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("radius exhausted: {0}")]
    RadiusExhausted(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("no certificate after {iterations} iterations: bracket [{lower}, {upper}]")]
    NoCertificate {
        lower: f64,
        upper: f64,
        iterations: usize,
    },

    #[error("function undefined on product {0}")]
    UndefinedProduct(String),

    #[error("carrier mismatch: {0} vs {1}")]
    CarrierMismatch(String, String),

    #[error("window too small: halfwidth {halfwidth} < {needed}")]
    WindowTooSmall { halfwidth: usize, needed: usize },

    #[error("radius budget violated: {0}")]
    BudgetViolated(String),

    #[error("well-definedness failure: consistency residual {0:e}")]
    WellDefinedness(f64),

    #[error("inconsistency between {what}: {a} vs {b}")]
    Inconsistent { what: String, a: f64, b: f64 },

    #[error("uncertified input witness: residual {0:e}")]
    UncertifiedWitness(f64),

    #[error("malformed witness: {0}")]
    MalformedWitness(String),

    #[error("actions do not commute: {0}")]
    ActionsDoNotCommute(String),

    #[error("not a fundamental domain: {0}")]
    NotFundamentalDomain(String),

    #[error("action does not preserve weights: {0}")]
    WeightNotPreserved(String),

    #[error("not a group action: {0}")]
    NotAnAction(String),

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("not a transversal: {0}")]
    NotTransversal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for solver failures that still carry a usable bracket.
    pub fn is_no_certificate(&self) -> bool {
        matches!(self, Error::NoCertificate { .. })
    }
}
