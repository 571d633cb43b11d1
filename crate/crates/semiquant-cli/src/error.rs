use semiquant::SemiquantError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read config file {path}: {source}")]
    ConfigRead {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config file: {0}")]
    ConfigParse(#[from] toml::de::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("ambiguous pairing of level n={n} at E={energy}: nearest reference error {error:e}, next gap {gap:e}")]
    AmbiguousPairing { n: i64, energy: f64, error: f64, gap: f64 },
    #[error(transparent)]
    Library(#[from] SemiquantError),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Process exit status for a configuration problem.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status for a numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::AmbiguousPairing { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

pub fn missing(what: &str) -> CliError {
    CliError::Config(format!("missing required value `{what}`"))
}
