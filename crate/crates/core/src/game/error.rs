use thiserror::Error;

use super::economy::{InfluenceKind, Role};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("roster must hold 5 players, got {0}")]
    RosterSize(usize),
    #[error("role {0} appears more than once in the roster")]
    DuplicateRole(Role),
    #[error("{role}'s pile has {have} cards, fewer than the hand size {need}")]
    DeckTooSmall { role: Role, have: usize, need: usize },
    #[error("invalid deck: {0}")]
    InvalidDeck(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("the game is over")]
    Terminal,
    #[error("operation not allowed before the round has begun")]
    RoundNotStarted,
    #[error("the round has already begun")]
    RoundInProgress,
    #[error("the game has not finished")]
    MidGame,
    #[error("health must be positive to draw events, got {0}")]
    NonPositiveHealth(i64),
    #[error("{role} cannot purchase {kind}; it is trade-only")]
    NotPurchasable { role: Role, kind: InfluenceKind },
    #[error("{role} needs {need} coins but has {have}")]
    InsufficientCoins { role: Role, need: u32, have: u32 },
    #[error("{role} lacks the influence for card {card}")]
    Unaffordable { role: Role, card: String },
    #[error("{role} holds no card {card}")]
    UnknownCard { role: Role, card: String },
    #[error("{0} cannot trade with themselves")]
    SelfTrade(Role),
    #[error("trades must move at least one unit each way")]
    ZeroQuantityTrade,
    #[error("event {0} is not among this round's pending events")]
    EventNotPending(String),
    #[error("event {0} requires a decision choice")]
    MissingDecisionChoice(String),
    #[error("event {event}: option {choice} does not exist")]
    InvalidDecisionChoice { event: String, choice: usize },
    #[error("event {0} takes no decision")]
    UnexpectedDecisionChoice(String),
}
