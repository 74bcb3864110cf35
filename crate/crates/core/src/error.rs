use thiserror::Error;

/// Errors raised by the library. Every variant maps to a stable CLI exit class.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent {0} (must be > -1)")]
    InvalidExponent(f64),
    #[error("degenerate interval [{0}, {1}]")]
    DegenerateInterval(f64, f64),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("point {0} lies on the support")]
    OnSupport(String),
    #[error("adaptive quadrature diverged: {0}")]
    Divergent(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("supports overlap: {0}")]
    OverlappingSupports(String),
    #[error("invalid ray: {0}")]
    InvalidRay(String),
    #[error("nonpositive weight: {0}")]
    NonpositiveWeight(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("nonpositive input: {0}")]
    NonpositiveInput(String),
    #[error("singular system (condition estimate {cond:e})")]
    SingularSystem { cond: f64 },
    #[error("|n| = {n} exceeds degree cap {cap}")]
    DegreeCapExceeded { n: usize, cap: usize },
    #[error("zero count mismatch on interval {j}: found {found}, expected {expected}")]
    ZeroCountMismatch { j: usize, found: usize, expected: usize },
    #[error("varying density changes sign on interval {0}")]
    SignNotConstant(usize),
    #[error("invalid input polynomials: {0}")]
    InvalidInputPolynomials(String),
    #[error("singular Gram matrix at degree {0}")]
    GramSingular(usize),
    #[error("singular bimoment matrix at degree {0}")]
    BimomentSingular(usize),
    #[error("ray not realizable at k = {0}")]
    NonrealizableRay(usize),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("{}", format_schema(.0))]
    Schema(Vec<String>),
}

fn format_schema(errs: &[String]) -> String {
    let mut s = format!("{} schema error(s)", errs.len());
    for e in errs {
        s.push_str("\n  ");
        s.push_str(e);
    }
    s
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
