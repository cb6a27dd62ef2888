use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure carries a reason code as the first word of its message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("SyntaxError at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("DomainError {0}")]
    Domain(String),

    #[error("NonCommutingFields {0}")]
    NonCommutingFields(String),

    #[error("QueerAtPoint field {field} has nonzero second-order part at {point}")]
    QueerAtPoint { field: usize, point: String },

    #[error("WitnessNotFound {0}")]
    WitnessNotFound(String),

    #[error("AxiomViolation {axiom} for f={f}, g={g}, h={h} at {point}")]
    AxiomViolation {
        axiom: String,
        f: String,
        g: String,
        h: String,
        point: String,
    },

    #[error("ToleranceExceeded block {block}: error {error:e} > {tolerance:e}")]
    ToleranceExceeded {
        block: String,
        error: f64,
        tolerance: f64,
    },
}

impl Error {
    pub fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// The machine-greppable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::Domain(_) => "DomainError",
            Error::NonCommutingFields(_) => "NonCommutingFields",
            Error::QueerAtPoint { .. } => "QueerAtPoint",
            Error::WitnessNotFound(_) => "WitnessNotFound",
            Error::AxiomViolation { .. } => "AxiomViolation",
            Error::ToleranceExceeded { .. } => "ToleranceExceeded",
        }
    }

    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Syntax { .. })
    }
}
