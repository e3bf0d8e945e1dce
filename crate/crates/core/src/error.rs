use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain on which the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("imaginary-time evolution did not converge after {iterations} steps (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The field became non-finite during real-time propagation.
    #[error("condensate collapsed at t = {time}")]
    Collapse { time: f64 },

    #[error("wavefunctions live on different grids")]
    GridMismatch,

    /// No sign change of the stability criterion inside the search bracket.
    /// Carries the coarse `(T_f, ln Delta)` scan used to look for one.
    #[error("criterion not bracketed in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64, scan: Vec<(f64, f64)> },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
