//! Drives games round by round and keeps their logs.

pub mod record;
pub mod replay;
pub mod runner;
pub mod trace;

pub use record::{
    Applied, BackendInfo, EntryKind, OutcomeEntry, PhaseEntry, RecordError, RecordHeader, RecordLine, RecordWriter,
    RunRecord,
};
pub use replay::{replay, ReplayError, ReplayFacilitator, ReplayPolicy, ReplayReport};
pub use runner::{assign_roles, majority, policy_rng, role_rng, route_trade, run_game, GameSetup, OrchestratorError};
pub use trace::{validate_trace, TraceError};
