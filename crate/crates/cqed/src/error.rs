//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // netlist / circuit
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid value on line {line}: {message}")]
    Value { line: usize, message: String },
    #[error("bad circuit topology: {0}")]
    Topology(String),
    #[error("unsupported topology for transmon-resonator reduction: {0}")]
    UnsupportedTopology(String),

    // waveguide
    #[error("frequency {omega} rad/s hits ladder pole {pole} rad/s")]
    Pole { omega: f64, pole: f64 },

    // quantizer / rabi
    #[error("charge-basis truncation too small: edge-state weight {weight:.3e} in level {level}")]
    Truncation { level: usize, weight: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),

    // normal modes
    #[error("coupled system is unstable: {0}")]
    Instability(String),
    #[error("regime preconditions grossly violated: {0}")]
    Regime(String),

    // designer
    #[error("no feasible design point; best margin {best_margin:.3e}")]
    NoFeasiblePoint { best_margin: f64 },

    // electromech
    #[error("bias beyond pull-in: {0}")]
    PullIn(String),
    #[error("regime ambiguous between {a} and {b} (scales within a factor 2)")]
    AmbiguousRegime { a: String, b: String },

    // spectro
    #[error("invalid subsystem dimensions: {0}")]
    Dimension(String),
    #[error("singular Liouvillian (estimated null-space dimension {null_dim:?})")]
    SingularLiouvillian { null_dim: Option<usize> },

    // fitkit
    #[error("no periodicity found in calibration sweep")]
    PeriodNotFound,
    #[error("fit did not converge; best objective {best_objective:.6e}")]
    NonConvergence { best_objective: f64 },

    // I/O and CLI plumbing
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    /// Stable machine-readable error kind for structured CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::Value { .. } => "value",
            Error::Topology(_) => "topology",
            Error::UnsupportedTopology(_) => "unsupported_topology",
            Error::Pole { .. } => "pole",
            Error::Truncation { .. } => "truncation",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::ConvergenceFailure(_) => "convergence_failure",
            Error::Instability(_) => "instability",
            Error::Regime(_) => "regime",
            Error::NoFeasiblePoint { .. } => "no_feasible_point",
            Error::PullIn(_) => "pull_in",
            Error::AmbiguousRegime { .. } => "ambiguous_regime",
            Error::Dimension(_) => "dimension",
            Error::SingularLiouvillian { .. } => "singular_liouvillian",
            Error::PeriodNotFound => "period_not_found",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Usage(_) => "usage",
        }
    }
}
