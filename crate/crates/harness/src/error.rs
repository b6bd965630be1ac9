use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVALID_INPUT: i32 = 2;
    pub const ORTHOGONAL_SELECTION: i32 = 3;
    pub const ZERO_PROBABILITY: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] modgate_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        use modgate_core::Error as E;
        match self {
            HarnessError::Core(E::OrthogonalSelection { .. }) => exit::ORTHOGONAL_SELECTION,
            HarnessError::Core(E::ZeroProbability { .. }) => exit::ZERO_PROBABILITY,
            HarnessError::Core(_) | HarnessError::Config(_) => exit::INVALID_INPUT,
            HarnessError::Io(_) => exit::IO,
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => HarnessError::Io(io),
            other => HarnessError::Config(format!("{other:?}")),
        }
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Io(e.into())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
