use thiserror::Error;

/// Errors raised by the library. Each variant maps onto a stable
/// machine-readable kind string (see [`Error::kind`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("declared degree {declared} is below the polynomial degree {actual}")]
    InvalidDeclaredDegree { declared: usize, actual: usize },

    #[error("roots of the zero polynomial are undefined")]
    UndefinedRoots,

    #[error("division by the zero rational function")]
    DivideByZero,

    #[error("Verblunsky coefficient alpha_{index} has modulus {modulus} >= 1")]
    InvalidVerblunsky { index: usize, modulus: f64 },

    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    #[error("point {index} is not on the unit circle (|x| = {modulus})")]
    InvalidSupport { index: usize, modulus: f64 },

    #[error("sequence holds degree {available}, degree {required} was requested")]
    InsufficientSequence { required: usize, available: usize },

    #[error("a discrete measure has no weight derivative")]
    NoDerivative,

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("integrand has a pole on the unit circle at {re}{im:+}i")]
    SingularIntegrand { re: f64, im: f64 },

    #[error("evaluation point is within {distance:e} of the unit circle")]
    NearSingularEvaluation { distance: f64 },

    #[error("quadrature grid size {0} must be a power of two >= 1024")]
    InvalidGrid(usize),

    #[error("beta and tau must differ")]
    DegeneratePair,

    #[error("h_n(z; beta; beta) vanishes identically")]
    DegenerateH,

    #[error("beta = 0 is not supported by the second-order equation")]
    UnsupportedBetaZero,

    #[error("every sample point lies on a pole of the equation")]
    MalformedOde,

    #[error("degenerate Lame data: {0}")]
    Degenerate(String),

    #[error("generator at {re}{im:+}i collides with input point {index}")]
    GeneratorCollidesWithPoint { index: usize, re: f64, im: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("point sets are not disjoint")]
    NotDisjoint,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDeclaredDegree { .. } => "invalid-declared-degree",
            Error::UndefinedRoots => "undefined-roots",
            Error::DivideByZero => "divide-by-zero",
            Error::InvalidVerblunsky { .. } => "invalid-verblunsky",
            Error::DegenerateMeasure(_) => "degenerate-measure",
            Error::InvalidSupport { .. } => "invalid-support",
            Error::InsufficientSequence { .. } => "insufficient-sequence",
            Error::NoDerivative => "no-derivative",
            Error::InvalidWeight(_) => "invalid-weight",
            Error::SingularIntegrand { .. } => "singular-integrand",
            Error::NearSingularEvaluation { .. } => "near-singular-evaluation",
            Error::InvalidGrid(_) => "invalid-grid",
            Error::DegeneratePair => "degenerate-pair",
            Error::DegenerateH => "degenerate-h",
            Error::UnsupportedBetaZero => "unsupported-beta-zero",
            Error::MalformedOde => "malformed-ode",
            Error::Degenerate(_) => "degenerate",
            Error::GeneratorCollidesWithPoint { .. } => "generator-collides-with-point",
            Error::InvalidConfiguration(_) => "invalid-configuration",
            Error::NotDisjoint => "not-disjoint",
            Error::InvalidInput(_) => "invalid-input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
