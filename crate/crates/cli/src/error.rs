use quanto_collocation::Error;

/// Process exit codes.
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CALIBRATION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("calibration failed: {0}")]
    Calibration(Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Csv(_) => EXIT_INPUT,
            CliError::Calibration(_) => EXIT_CALIBRATION,
            CliError::Core(e) => match e {
                Error::InvalidInput(_) | Error::Schema { .. } | Error::Arbitrage { .. } | Error::TailCoverage { .. } => {
                    EXIT_INPUT
                }
                Error::OutOfDomain { .. } | Error::TailUnderflow(_) | Error::PriceBounds { .. } => EXIT_DOMAIN,
                Error::UnattainableForward { .. } | Error::NonMonotoneForward | Error::NoConvergence(_) => {
                    EXIT_CALIBRATION
                }
            },
        }
    }
}
