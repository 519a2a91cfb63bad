use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] gfdm_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} trials failed")]
    TooManyFailures { failed: usize, total: usize },
}

impl SimError {
    /// 1 for anything that stops a campaign from starting, 2 for the
    /// failed-trial threshold.
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::TooManyFailures { .. } => 2,
            SimError::Core(gfdm_core::Error::Numerical(_) | gfdm_core::Error::Singular { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
