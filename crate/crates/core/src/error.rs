use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` must be finite and positive, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("n = {n} is not a bound state for lambda = {lambda} (highest admissible n is {max})")]
    NotBound { n: u32, lambda: f64, max: u32 },

    #[error("magnetic quantum number |m| = {m} exceeds l = {l}")]
    MagneticOutOfRange { m: i32, l: u32 },

    #[error("Jacobi polynomial P_{degree} overflowed at x = {x}")]
    JacobiOverflow { degree: u32, x: f64 },

    #[error("unsupported Gauss-Legendre order {0} (expected 1..=512)")]
    UnsupportedOrder(usize),

    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error(
        "quadrature did not converge after {panels} panels: value {value:e}, error estimate {error:e}"
    )]
    NoConvergence {
        panels: usize,
        value: f64,
        error: f64,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("unknown table id {0} (expected 1..=15)")]
    UnknownTable(u8),

    #[error("malformed fixture table_{table:02}.csv: {reason}")]
    MalformedFixture { table: u8, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
