//! Experiment presets and the sweep runner.

pub mod config;
pub mod sweep;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{preset, preset_names, Backend, ExperimentConfig, LeadershipSpec, RosterSpec};
pub use sweep::{build_agents, build_gateway, game_setup, record_path, run_one, run_sweep, SweepReport};

use crate::gateway::GatewayError;
use crate::metrics::AggregateError;
use crate::orchestrator::{OrchestratorError, RecordError};
use crate::schema::LoadError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("backend unavailable: {0}")]
    Backend(#[from] GatewayError),
    #[error(transparent)]
    Orchestrator(#[from] OrchestratorError),
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
