use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] tde_core::Error),

    #[error("stationary iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("stationary iteration entered a two-cycle: {0}")]
    TwoCycle(String),

    #[error("expectation failed: {0}")]
    Expectation(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use tde_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(E::InvalidArgument(_) | E::ZeroMass) => 2,
            CliError::Core(E::BlowUp { .. }) => 3,
            CliError::Core(E::Saturation { .. }) => 4,
            CliError::Core(E::Overflow { .. }) | CliError::NonConvergence(_) => 5,
            CliError::TwoCycle(_) => 6,
            CliError::Expectation(_) => 7,
        }
    }
}
