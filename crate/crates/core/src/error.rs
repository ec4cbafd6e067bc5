use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("trajectory blew up at sigma = {sigma}")]
    BlowUp { sigma: f64 },

    #[error("no requested event before sigma_max = {max_sigma}")]
    NoEvent { max_sigma: f64 },

    #[error("wrong boundary case: {0}")]
    WrongCase(String),

    #[error("trajectory never crossed z = 0")]
    NoZeroCrossing,

    #[error("inadmissible parameters: c_o^2 = {c0_sq} >= {bound}")]
    Inadmissible { c0_sq: f64, bound: f64 },

    #[error("no root found in the bracket")]
    NoRoot,

    #[error("Newton iteration diverged after {iterations} iterations")]
    Diverged { iterations: usize },

    #[error("quadrature error estimate {estimate:e} exceeds threshold {threshold:e}")]
    QuadratureFailure { estimate: f64, threshold: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
