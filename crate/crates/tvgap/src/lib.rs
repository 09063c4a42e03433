//! File formats, report serialization and subcommands behind the `tvgap`
//! command-line tool.

pub mod commands;
pub mod report;
pub mod selftest;
pub mod system;

pub use commands::{run, Command, Options, Outcome};
pub use system::{parse_system, SystemDescription};

/// Exit status for malformed or inconsistent input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status when a numerical certificate fails.
pub const EXIT_CERTIFICATE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Certificate(_) => EXIT_CERTIFICATE,
        }
    }
}

impl From<tvgap_core::Error> for CliError {
    fn from(e: tvgap_core::Error) -> Self {
        use tvgap_core::Error as E;
        match e {
            E::EmptyHorizon
            | E::ZeroBlockDim { .. }
            | E::DimensionMismatch(_)
            | E::NotCausal(_)
            | E::InvalidArgument(_)
            | E::RootOnUnitCircle(_) => CliError::Validation(e.to_string()),
            _ => CliError::Certificate(e.to_string()),
        }
    }
}
