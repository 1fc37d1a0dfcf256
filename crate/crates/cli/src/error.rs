use orienteer_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Capacity(String),
    #[error("verification failed: {}", .0.join("; "))]
    Verification(Vec<String>),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Malformed(_) => "malformed-input",
            Self::Infeasible(_) => "infeasible",
            Self::Capacity(_) => "capacity",
            Self::Verification(_) => "verification-failure",
            Self::Unsupported(_) => "unsupported",
            Self::Io(_) => "io",
            Self::Internal(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Malformed(_) | Self::Unsupported(_) => 2,
            Self::Infeasible(_) => 3,
            Self::Capacity(_) => 4,
            Self::Verification(_) => 5,
            Self::Io(_) | Self::Internal(_) => 1,
        }
    }

    /// One-line machine-readable form for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidInput(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::Degenerate(_) => Self::Malformed(msg),
            CoreError::Infeasible(_) => Self::Infeasible(msg),
            CoreError::Capacity { .. } => Self::Capacity(msg),
            CoreError::SamplingFailure { .. } | CoreError::Internal(_) => Self::Internal(msg),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Malformed(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
