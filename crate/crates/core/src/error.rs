use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    /// Too few receive dimensions to leave a noise subspace.
    #[error("infeasible configuration: {signal_dim} signal dimensions leave no noise subspace in {observation_dim} observations")]
    Infeasible {
        signal_dim: usize,
        observation_dim: usize,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("singular {what} (condition number {condition:.3e})")]
    Singular { what: String, condition: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
