use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] duality_core::Error),
}

impl LabError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        use duality_core::Error as E;
        match self {
            Self::Config(_) => "E_CONFIG",
            Self::Io { .. } | Self::Csv(_) => "E_IO",
            Self::Json(_) => "E_JSON",
            Self::Core(e) => match e {
                E::Envelope(_) => "E_ENVELOPE",
                E::SolverFailed { .. } => "E_SOLVER",
                E::Precondition(_) => "E_PRECONDITION",
                E::Parse(_) => "E_PARSE",
                E::Json(_) => "E_JSON",
                _ => "E_INPUT",
            },
        }
    }

    /// `error[CODE]: message` on a single line.
    pub fn one_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error[{}]: {}", self.code(), msg)
    }
}
