//! Port of Mars simulator: game engine, agents, prompts, model gateway,
//! orchestration, metrics and experiment sweeps.

pub mod agents;
pub mod cli;
pub mod experiments;
pub mod game;
pub mod gateway;
pub mod metrics;
pub mod orchestrator;
pub mod prompts;
pub mod schema;
