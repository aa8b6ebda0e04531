use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("jet carries {found} pressure, expected {expected}")]
    PressureKind {
        expected: crate::PressureKind,
        found: crate::PressureKind,
    },

    #[error("branch error: {0}")]
    Branch(String),

    #[error("domain error at {at}: {reason}")]
    Domain { at: f64, reason: String },

    #[error("argument outside supported range: {0}")]
    Range(String),

    #[error("singular point at x = {at}")]
    Singularity { at: f64 },

    #[error("complex Bessel order: nu^2 = {nu_squared}")]
    ComplexOrder { nu_squared: f64 },

    #[error("requested accuracy not reached: error estimate {estimate:e} > tolerance {tol:e}")]
    Accuracy { estimate: f64, tol: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("position inversion failed: {0}")]
    Inversion(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solution diverged at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    #[error("convergence order undefined: {0}")]
    Order(String),

    #[error("generator {generator} is not admitted by these parameters")]
    NotApplicable { generator: crate::symmetry::GeneratorTag },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
