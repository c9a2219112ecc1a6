use bvis_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const INVALID_WATCHPOINTS: i32 = 3;
    pub const BUDGET: i32 = 4;
    pub const VERIFICATION: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("work budget exceeded: {work} walker-steps requested, limit {limit} (raise --max-work)")]
    Budget { work: u128, limit: u64 },
    #[error("failed to write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::DuplicateWatchpoint { .. }
                | Error::NotMutuallyVisible { .. }
                | Error::TooManyWatchpoints { .. } => exit::INVALID_WATCHPOINTS,
                Error::Capacity(_) => exit::BUDGET,
                _ => exit::USAGE,
            },
            CliError::Usage(_) => exit::USAGE,
            CliError::Budget { .. } => exit::BUDGET,
            CliError::Output(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
