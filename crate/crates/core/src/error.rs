use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("projective dimension must be at least 1 (got {0})")]
    InvalidDimension(usize),
    #[error("degree must be at least 1 (got {0})")]
    InvalidDegree(u32),
    #[error("the zero vector is not a one-parameter subgroup")]
    ZeroVector,
    #[error("weight vector has total weight {0}, expected 0")]
    NonZeroWeight(i64),
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("exponent vector {0:?} is not a monomial of the simplex")]
    NotInSimplex(Vec<u32>),
    #[error("support must be nonempty")]
    EmptySupport,
    #[error("objects belong to different simplex contexts")]
    ContextMismatch,
    #[error("search bound must be positive")]
    InvalidBound,
    #[error("{0}")]
    Unsupported(String),
    #[error("polynomials are defined over different coefficient fields")]
    FieldMismatch,
    #[error("polynomials have different numbers of variables ({0} vs {1})")]
    VariableCountMismatch(usize, usize),
    #[error("ideal is not homogeneous")]
    NonHomogeneous,
    #[error("generator list is empty")]
    NoGenerators,
    #[error("substitution matrix is singular")]
    SingularSubstitution,
    #[error("malformed inclusion chain: {0}")]
    MalformedChain(String),
    #[error("family id {0} is out of range")]
    UnknownFamily(usize),
    #[error("malformed rational `{0}`")]
    MalformedRational(String),
    #[error("exponent {0:?} appears more than once")]
    DuplicateExponent(Vec<u32>),
    #[error("exponent {exponent:?} has weight {got}, expected {expected}")]
    WeightMismatch { exponent: Vec<u32>, expected: u32, got: u32 },
    #[error("exponent {exponent:?} has {got} entries, expected {expected}")]
    ArityMismatch { exponent: Vec<u32>, expected: usize, got: usize },
    #[error("coefficient of {0:?} is zero")]
    ZeroCoefficient(Vec<u32>),
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("resource limit exceeded: {0}")]
    ResourceExhausted(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code for each variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid-dimension",
            Error::InvalidDegree(_) => "invalid-degree",
            Error::ZeroVector => "zero-vector",
            Error::NonZeroWeight(_) => "nonzero-weight",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::NotInSimplex(_) => "not-in-simplex",
            Error::EmptySupport => "empty-support",
            Error::ContextMismatch => "context-mismatch",
            Error::InvalidBound => "invalid-bound",
            Error::Unsupported(_) => "unsupported",
            Error::FieldMismatch => "field-mismatch",
            Error::VariableCountMismatch(..) => "variable-count-mismatch",
            Error::NonHomogeneous => "non-homogeneous",
            Error::NoGenerators => "no-generators",
            Error::SingularSubstitution => "singular-substitution",
            Error::MalformedChain(_) => "malformed-chain",
            Error::UnknownFamily(_) => "unknown-family",
            Error::MalformedRational(_) => "malformed-rational",
            Error::DuplicateExponent(_) => "duplicate-exponent",
            Error::WeightMismatch { .. } => "weight-mismatch",
            Error::ArityMismatch { .. } => "arity-mismatch",
            Error::ZeroCoefficient(_) => "zero-coefficient",
            Error::MalformedDocument(_) => "malformed-document",
            Error::Io(_) => "io",
            Error::ResourceExhausted(_) => "resource-exhausted",
            Error::Internal(_) => "internal",
        }
    }
}
