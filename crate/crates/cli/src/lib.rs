//! Configuration loading and subcommands for the `rlcm` binary.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{run, Cli, Command, Outcome};
pub use config::{ConfigFile, MorphismFile, SystemConfig, VerifyConfig};
pub use error::CliError;

/// Pretty-printed JSON with sorted keys, so identical runs give identical bytes.
pub fn render(outcome: &Outcome) -> String {
    serde_json::to_string_pretty(&outcome.output).expect("JSON output")
}
