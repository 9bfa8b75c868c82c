use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("packet tail {tail:e} exceeds {limit:e} of peak at the domain boundary")]
    TailViolation { tail: f64, limit: f64 },

    #[error("singular map: {0}")]
    SingularMap(String),

    #[error("map mixes t' with x: requires prior knowledge of full wavefunction")]
    NeedsFullWavefunction,

    #[error("matrix is not hermitian (max deviation {deviation:e}, tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension cap exceeded: required {required}, allowed {allowed}")]
    DimensionCap { required: usize, allowed: usize },

    #[error("the potential is explicitly odd in this dynamics, found even part {max_even:e}")]
    NotOdd { max_even: f64 },

    #[error("unsupported dynamics: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
