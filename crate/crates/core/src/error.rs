use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by the module that raises them; the CLI serializes
/// the variant name as the machine-readable error kind.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // field / linear algebra
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field of order {p}^{e} exceeds the configured bound {bound}")]
    FieldTooLarge { p: u64, e: u32, bound: u64 },
    #[error("matrix is singular")]
    Singular,
    #[error("ambient dimension or field mismatch: {0}")]
    AmbientMismatch(String),
    #[error("the given subspaces cover the whole space")]
    UnionCoversSpace,
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("matrix does not act as the given scalar on W")]
    NotScalarOnW,
    #[error("U and W are not complementary")]
    NotComplement,
    #[error("invalid field element: {0}")]
    InvalidElement(String),

    // words
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("substituted element for x{0} is singular")]
    SingularInput(usize),
    #[error("word has no critical constants")]
    AlreadyStrong,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("word is not reduced at index {index}: {reason}")]
    NotReduced { index: usize, reason: String },
    #[error("degenerate ambient dimension n = {0}; need n >= 2")]
    DegenerateDimension(usize),

    // witness
    #[error("witness hypotheses violated: {}", .0.join(", "))]
    HypothesisViolation(Vec<String>),
    #[error("could not avoid the excluded subspaces at step ({i}, {j})")]
    AvoidanceImpossible { i: usize, j: usize },
    #[error("independence invariant broken for x{var} sign {sign} at step ({i}, {j})")]
    IndependenceBroken { var: usize, sign: i8, i: usize, j: usize },
    #[error("cannot fix determinant for x{0}: no free basis row")]
    DeterminantUnfixable(usize),
    #[error("witness failed verification for pair {0}")]
    VerificationFailed(usize),

    // image analysis
    #[error("word too short: length {0}, need at least 2")]
    TooShort(usize),
    #[error("hypotheses fail: {0}")]
    HypothesesFail(String),
    #[error("word is singular")]
    SingularWord,

    // identity search
    #[error("group too large: {0}")]
    GroupTooLarge(String),
    #[error("word is trivial in G * F_r")]
    TrivialWord,
    #[error("evaluation budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("free word is empty")]
    EmptyWord,
    #[error("constant {0} is not an element of the group")]
    ConstantNotInGroup(usize),

    // tower
    #[error("cannot embed from level {from} down to level {to}")]
    LevelDecrease { from: u32, to: u32 },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    // io
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    /// Stable variant name, used as the `kind` field of CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::DegreeZero => "DegreeZero",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::Singular => "Singular",
            Error::AmbientMismatch(_) => "AmbientMismatch",
            Error::UnionCoversSpace => "UnionCoversSpace",
            Error::DependentInput => "DependentInput",
            Error::NotScalarOnW => "NotScalarOnW",
            Error::NotComplement => "NotComplement",
            Error::InvalidElement(_) => "InvalidElement",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularInput(_) => "SingularInput",
            Error::AlreadyStrong => "AlreadyStrong",
            Error::NotInvertible => "NotInvertible",
            Error::NotReduced { .. } => "NotReduced",
            Error::DegenerateDimension(_) => "DegenerateDimension",
            Error::HypothesisViolation(_) => "HypothesisViolation",
            Error::AvoidanceImpossible { .. } => "AvoidanceImpossible",
            Error::IndependenceBroken { .. } => "IndependenceBroken",
            Error::DeterminantUnfixable(_) => "DeterminantUnfixable",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::TooShort(_) => "TooShort",
            Error::HypothesesFail(_) => "HypothesesFail",
            Error::SingularWord => "SingularWord",
            Error::GroupTooLarge(_) => "GroupTooLarge",
            Error::TrivialWord => "TrivialWord",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::EmptyWord => "EmptyWord",
            Error::ConstantNotInGroup(_) => "ConstantNotInGroup",
            Error::LevelDecrease { .. } => "LevelDecrease",
            Error::LevelMismatch(..) => "LevelMismatch",
            Error::Parse(_) => "ParseError",
            Error::Validation(_) => "ValidationError",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
