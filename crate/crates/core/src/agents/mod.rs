//! Personas, the decision types every phase produces, and the policy contract.

pub mod decision;
pub mod persona;
pub mod policy;
pub mod scripted;

use thiserror::Error;

pub use decision::{AgentDecision, GoalChoice, Proposal};
pub use persona::{
    svo_category, CulturalGroup, LeadershipVariant, Persona, PersonaKind, SvoCategory, COOPERATIVE_TRAITS,
    SELFISH_TRAITS,
};
pub use policy::{Exchange, Facilitator, MeetingOutcome, PlayerView, Policy, Reply};
pub use scripted::{ScriptedFacilitator, ScriptedPolicy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("SVO angle {0} is outside [-90, 90]")]
    AngleOutOfRange(f64),
    #[error("invalid persona: {0}")]
    InvalidPersona(String),
}
