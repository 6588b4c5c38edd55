//! File formats, randomized verification suites and the `ruq` command line
//! on top of [`ruq_core`].

pub mod cli;
pub mod io;
pub mod suites;

pub use cli::run;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] ruq_core::Error),
}

impl CliError {
    /// 2 for usage and out-of-domain parameters, 3 for bad or unreadable
    /// input.
    pub fn exit_code(&self) -> i32 {
        use ruq_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Input(_) => 3,
            CliError::Core(e) => match e {
                E::Usage(_) | E::Parameter(_) | E::Range { .. } | E::InvalidMask | E::Unsupported(_) => 2,
                E::Parse { .. } | E::Validation(_) | E::UndefinedConditional(_) | E::Resource(_) | E::NoInverse => 3,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
