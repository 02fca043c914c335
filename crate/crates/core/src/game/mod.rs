//! Rules engine: economy, decks and the round state machine.

pub mod cards;
pub mod config;
pub mod economy;
pub mod error;
pub mod state;

pub use cards::{validate_event_deck, validate_pile, AccomplishmentCard, EventCard, EventDecision, EventOption};
pub use config::{AccomplishmentSource, GameConfig, Thresholds, TiePolicy};
pub use economy::{influence_price, Access, Bundle, InfluenceKind, Prices, Role};
pub use error::GameError;
pub use state::{
    events_to_draw, FinalOutcome, GameState, Outcome, PlayerState, RoundLedger, RoundPhase, RoundStart, TradeOffer,
    TradeRecord,
};
