use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("point lies on a branch cut and needs an upper or lower side: {0}")]
    BranchSide(String),
    #[error("precision cap of {cap} bits reached; last two values {low} and {high} disagree")]
    PrecisionCap { cap: u32, low: String, high: String },
    #[error("zero search grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("quadrature did not reach tolerance: {0}")]
    Quadrature(String),
    #[error("Newton iteration failed after {iterations} steps at alpha={alpha}, beta={beta} (residuals {r0:e}, {r1:e})")]
    Newton { iterations: usize, alpha: f64, beta: f64, r0: f64, r1: f64 },
    #[error("point is outside the region accepted by this formula: {0}")]
    Region(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
