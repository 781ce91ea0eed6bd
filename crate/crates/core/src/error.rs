use thiserror::Error;

use crate::hilbert::HilbertError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),

    #[error("parameter `{name}` = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("inconsistent visibility budget: V45 = {v45} exceeds classical visibility {v_c1}")]
    InconsistentBudget { v45: f64, v_c1: f64 },

    #[error("classical visibility {0} must lie in (0, 1]")]
    InvalidClassicalVisibility(f64),

    #[error("degenerate correlation: no coincidences at theta1 = {theta1}, theta2 = {theta2}")]
    DegenerateCorrelation { theta1: f64, theta2: f64 },

    #[error("fit underdetermined: {0} distinct analyzer angles, at least 3 required")]
    Underdetermined(usize),

    #[error("degenerate fit: offset {0} is not positive")]
    DegenerateFit(f64),

    #[error(
        "fringe has period 90° (chi2 {chi2_90:.3} vs {chi2_180:.3} for 180°); check the basis convention"
    )]
    PeriodMismatch { chi2_180: f64, chi2_90: f64 },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Hilbert(_) => "E_STATE",
            Error::OutOfRange { .. } => "E_RANGE",
            Error::InconsistentBudget { .. } | Error::InvalidClassicalVisibility(_) => "E_BUDGET",
            Error::DegenerateCorrelation { .. } => "E_DEGENERATE",
            Error::Underdetermined(_) | Error::DegenerateFit(_) | Error::PeriodMismatch { .. } => {
                "E_FIT"
            }
            Error::UnknownGate(_) => "E_GATE",
            Error::InvalidConfig(_) | Error::Schema { .. } => "E_SCHEMA",
            Error::Io { .. } => "E_IO",
            Error::Csv(_) | Error::Json(_) => "E_OUTPUT",
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange { name, value });
    }
    Ok(())
}
