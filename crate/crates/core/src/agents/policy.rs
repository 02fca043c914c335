use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::decision::{GoalChoice, Proposal};
use super::persona::{LeadershipVariant, Persona};
use crate::game::{EventCard, InfluenceKind, PlayerState, Prices, Role, RoundLedger, Thresholds, TradeOffer};

/// One model call: the prompt sent and the text that came back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub prompt: String,
    pub response: String,
}

/// A decision together with how it was reached.
#[derive(Clone, Debug, PartialEq)]
pub struct Reply<T> {
    pub value: T,
    pub rationale: String,
    pub exchanges: Vec<Exchange>,
    /// The phase's fallback decision was used.
    pub fallback: bool,
}

impl<T> Reply<T> {
    pub fn new(value: T, rationale: impl Into<String>) -> Reply<T> {
        Reply {
            value,
            rationale: rationale.into(),
            exchanges: Vec::new(),
            fallback: false,
        }
    }
}

/// Public rules a player is told about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RulesView {
    pub prices: Prices,
    pub decay: i64,
    pub coin_budget: u32,
    pub thresholds: Thresholds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeadershipView {
    pub variant: LeadershipVariant,
    pub leader: Role,
}

/// Everything one player may see when deciding. Built fresh for every call.
#[derive(Clone, Debug, Serialize)]
pub struct PlayerView {
    pub role: Role,
    pub persona: Persona,
    pub me: PlayerState,
    pub round: u32,
    pub health: i64,
    /// Health after decay, which fixed this round's event count.
    pub round_start_health: i64,
    pub events: Vec<EventCard>,
    pub meeting_held: bool,
    pub leadership: Option<LeadershipView>,
    pub last_round: Option<RoundLedger>,
    pub rules: RulesView,
    /// All players in seat order.
    pub roster: Vec<(Role, Persona)>,
}

impl PlayerView {
    pub fn price(&self, kind: InfluenceKind) -> Option<u32> {
        self.rules.prices.price(self.role, kind)
    }
}

/// The per-player decision contract. Implementations never touch game state.
pub trait Policy: Send {
    fn event_choice(&mut self, view: &PlayerView, event: &EventCard) -> Reply<usize>;
    fn health_plan(&mut self, view: &PlayerView) -> Reply<u32>;
    /// Initial choice when `view.me.goal_plan` is unset, otherwise a re-plan.
    fn goal_choice(&mut self, view: &PlayerView) -> Reply<GoalChoice>;
    fn purchases(&mut self, view: &PlayerView) -> Reply<Vec<(InfluenceKind, u32)>>;
    fn trade_offer(&mut self, view: &PlayerView) -> Reply<Option<Proposal>>;
    fn trade_response(&mut self, view: &PlayerView, offer: &TradeOffer) -> Reply<bool>;
    /// Card ids to complete this round, in order.
    fn completions(&mut self, view: &PlayerView, rng: &mut ChaCha8Rng) -> Reply<Vec<String>>;
    fn discard(&mut self, view: &PlayerView) -> Reply<Option<String>>;
    /// What this player says at the planning meeting; `None` stays silent.
    fn meeting_utterance(&mut self, _view: &PlayerView) -> Option<String> {
        None
    }
    /// An unrecoverable failure (e.g. rejected credentials) seen since the
    /// last check. The game is aborted when this returns `Some`.
    fn take_fatal(&mut self) -> Option<String> {
        None
    }
}

/// Result of the planning meeting: one discussion and one summary step.
#[derive(Clone, Debug, PartialEq)]
pub struct MeetingOutcome {
    pub discussion: Reply<String>,
    /// Summaries by seat.
    pub summaries: Reply<[String; 5]>,
}

/// Runs the group-level meeting calls.
pub trait Facilitator: Send {
    fn meeting(&mut self, views: &[PlayerView], policies: &mut [Box<dyn Policy>]) -> MeetingOutcome;
    fn take_fatal(&mut self) -> Option<String> {
        None
    }
}
