//! Experiment harness for the arena workspace: game selection, seeded
//! runs of the three learning rules, CSV trace and JSON summary emission,
//! algorithm comparisons, parameter sweeps, and equilibrium verification.
//!
//! The `arena` binary is a thin wrapper over this library; everything a
//! subcommand does is callable (and tested) as a function here.

pub mod config;
pub mod gamesel;
pub mod metrics;
pub mod presets;
pub mod runner;
pub mod verify;

use std::fmt;

/// Errors surfaced to the CLI; all map to exit code 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "{msg}"),
            Self::Io(e) => write!(f, "io error: {e}"),
            Self::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Json(e)
    }
}

impl From<arena_core::game::GameError> for CliError {
    fn from(e: arena_core::game::GameError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<arena_core::models::ModelError> for CliError {
    fn from(e: arena_core::models::ModelError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<arena_core::dynamics::DynamicsError> for CliError {
    fn from(e: arena_core::dynamics::DynamicsError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<arena_core::equilibria::EquilibriaError> for CliError {
    fn from(e: arena_core::equilibria::EquilibriaError) -> Self {
        Self::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
