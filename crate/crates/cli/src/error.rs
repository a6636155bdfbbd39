//! Error classes and their exit codes.

use thiserror::Error;
use vlab_core::bifurcation::BifurcationError;
use vlab_core::dynamics::DynamicsError;
use vlab_core::equilibrium::EquilibriumError;
use vlab_core::field::FieldError;
use vlab_core::lattice::LatticeError;
use vlab_core::topology::TopologyError;

/// Exit code for malformed input, bad parameters or unwritable outputs.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit code for non-convergence, degeneracies and collisions.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Self::Numerical(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Validation(_) => "validation",
            Self::Numerical(_) => "numerical",
        }
    }

    /// One-line JSON object written to standard error.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> Self {
        match e {
            TopologyError::Params(_) | TopologyError::WindowOutsideCore { .. } => Self::Validation(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<BifurcationError> for CliError {
    fn from(e: BifurcationError) -> Self {
        match e {
            BifurcationError::Topology(t) => t.into(),
            BifurcationError::Degenerate { .. } | BifurcationError::Invalid(_) => Self::Validation(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<DynamicsError<f64>> for CliError {
    fn from(e: DynamicsError<f64>) -> Self {
        match e {
            DynamicsError::Invalid(_) | DynamicsError::MissingReference(_) => Self::Validation(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}
