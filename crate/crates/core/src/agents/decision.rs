use serde::{Deserialize, Serialize};

use crate::game::{Bundle, InfluenceKind, Role};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalChoice {
    /// Keep the current plan.
    Same,
    /// Switch to (or start with) the card with this id.
    Card(String),
}

/// A trade a player wants to make.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposal {
    pub offer: Bundle,
    pub request: Bundle,
    /// Explicit recipient, when the player named one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<Role>,
}

/// The typed outcome of one phase decision, as logged in run records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AgentDecision {
    EventChoice { event: String, option: usize },
    HealthPlan { coins: u32 },
    GoalChoice { goal: GoalChoice },
    ResourcePurchase { items: Vec<(InfluenceKind, u32)> },
    TradeProposal { proposal: Option<Proposal> },
    TradeResponse { accept: bool },
    Completion { cards: Vec<String> },
    Discard { card: Option<String> },
}
