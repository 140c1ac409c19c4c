use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("dimension {0} is not a positive multiple of 4")]
    Dimension(usize),

    #[error("invalid hypercomplex structure: {}", .0.join(", "))]
    InvalidStructure(Vec<String>),

    #[error("complex structure {0} is not integrable")]
    NotIntegrable(String),

    #[error("structure equations fail d^2 = 0 at generator e^{0}")]
    Jacobi(usize),

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("bidegree mismatch: expected {expected:?}, found {found:?}")]
    BidegreeMismatch {
        expected: (usize, usize),
        found: Vec<(usize, usize)>,
    },

    #[error("form is not real in the sense J(conj η) = η")]
    NotReal,

    #[error("form is not strictly positive")]
    NotPositive,

    #[error("form is not quaternionic Gauduchon")]
    NotGauduchon,

    #[error("no holomorphic SL(n,H) form: {0}")]
    NoPhi(String),

    #[error("linear system is underdetermined: {0}")]
    Underdetermined(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown instance family {0:?}")]
    UnknownInstance(String),

    #[error("unknown HKT criterion {0:?}")]
    UnknownCriterion(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal consistency violation: {0}")]
    Consistency(String),
}

impl Error {
    /// Process exit code for the CLI: 3 for engine consistency violations, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Consistency(_) | Error::Underdetermined(_) => 3,
            _ => 2,
        }
    }
}
