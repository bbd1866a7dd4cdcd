use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register of {requested} qubits exceeds the cap of {cap}")]
    RegisterCap { requested: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Kraus set is not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("filter operator norm {norm} exceeds 1")]
    InvalidFilter { norm: f64 },

    /// The recurrence cannot raise the fidelity: N * lambda_0 >= 1.
    #[error("W state not distillable (N={parties}, d={d}, w={w}); need w > {threshold}")]
    NotDistillable {
        parties: usize,
        d: f64,
        w: f64,
        threshold: f64,
    },

    /// The unfiltered reference scheme does not converge, so no ratio exists.
    #[error("ratio undefined for N={parties}, d={d}: NRWM-only regime (d >= 1/(N+1))")]
    RatioUndefined { parties: usize, d: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {error:.3e} after {intervals} intervals"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Short machine-readable tag used in sweep status columns.
    pub fn status_tag(&self) -> &'static str {
        match self {
            Error::RegisterCap { .. } => "register-cap",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NotTracePreserving { .. } => "not-trace-preserving",
            Error::InvalidFilter { .. } => "invalid-filter",
            Error::NotDistillable { .. } => "not-distillable",
            Error::RatioUndefined { .. } => "nrwm-only",
            Error::Domain(_) => "domain",
            Error::Quadrature { .. } => "quadrature",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
