use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown species `{name}` at line {line}")]
    UnknownSpecies { line: usize, name: String },

    #[error("duplicate rate label r{index} at line {line}")]
    DuplicateRate { line: usize, index: usize },

    #[error("rate labels must be a permutation of r1..r{count}: {message}")]
    RateLabels { count: usize, message: String },

    #[error("network is not a sequestration network K(m,n)")]
    NotSequestration,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("derived rate r{index} = {value} is not positive ({equality})")]
    NonPositiveRate {
        index: usize,
        value: f64,
        equality: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("Newton did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonMaxIter { iterations: usize, residual: f64 },

    #[error("Newton iterate left the positive orthant after {halvings} step halvings")]
    LeftPositiveOrthant { halvings: usize },

    #[error("continuation stalled at eps = {failed_eps:e}; last good eps = {last_good_eps:e}")]
    ContinuationStalled { last_good_eps: f64, failed_eps: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("invalid number `{0}`")]
    Number(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
