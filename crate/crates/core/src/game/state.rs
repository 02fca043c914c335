//! The rules engine proper.
//!
//! A round runs `begin_round` (decay, coin reset, event draw), optional
//! event decisions, health investment, `close_investment`, purchases, trades,
//! accomplishments and finally `end_round`. Health is a signed quantity while
//! a round is open: decay and events may push it to or below zero, and the
//! colony collapses only if health is still non-positive once investment has
//! closed (or when it drops to zero afterwards).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::cards::{
    default_event_deck, generate_pile, AccomplishmentCard, EffectTarget, EventCard, KindSelector, ResourceChange,
    ResourceEffect,
};
use super::config::{AccomplishmentSource, GameConfig, Thresholds, TiePolicy};
use super::economy::{Bundle, InfluenceKind, Role};
use super::error::GameError;
use crate::metrics::{classify_trade, TradeClass};

/// Number of events drawn at a given (positive) health under the default thresholds.
pub fn events_to_draw(health: i64) -> Result<u32, GameError> {
    Thresholds::default().events_for(health)
}

impl Thresholds {
    pub fn events_for(&self, health: i64) -> Result<u32, GameError> {
        if health <= 0 {
            return Err(GameError::NonPositiveHealth(health));
        }
        Ok(if health > self.hi {
            1
        } else if health >= self.lo {
            2
        } else {
            3
        })
    }
}

/// A draw pile. Contents are fixed between reshuffles; draws advance a cursor.
#[derive(Clone, Debug, Serialize)]
pub struct Deck<T> {
    cards: Vec<T>,
    cursor: usize,
    #[serde(skip)]
    commitment: String,
}

impl<T: Serialize> Deck<T> {
    fn new(cards: Vec<T>) -> Self {
        let commitment = commit(&cards);
        Deck {
            cards,
            cursor: 0,
            commitment,
        }
    }

    pub fn remaining(&self) -> usize {
        self.cards.len() - self.cursor
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }
}

impl<T: Serialize + Clone> Deck<T> {
    fn draw(&mut self) -> Option<T> {
        let card = self.cards.get(self.cursor).cloned()?;
        self.cursor += 1;
        Some(card)
    }

    fn reshuffle(&mut self, rng: &mut ChaCha8Rng) {
        self.cards.shuffle(rng);
        self.cursor = 0;
        self.commitment = commit(&self.cards);
    }
}

fn commit<T: Serialize>(cards: &[T]) -> String {
    let bytes = serde_json::to_vec(cards).expect("cards serialize");
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct PlayerState {
    pub role: Role,
    pub persona_id: String,
    pub coins: u32,
    pub influence: Bundle,
    pub hand: Vec<AccomplishmentCard>,
    pub points: u32,
    pub health_plan: Option<u32>,
    pub goal_plan: Option<String>,
    pub dirty_opportunities: u32,
    pub dirty_claims: u32,
    /// Meeting summary carried into this round's prompts.
    pub meeting_summary: Option<String>,
    pile: Deck<AccomplishmentCard>,
    #[serde(skip)]
    counted_dirty: BTreeSet<String>,
}

impl PlayerState {
    pub fn card(&self, card_id: &str) -> Option<&AccomplishmentCard> {
        self.hand.iter().find(|c| c.id == card_id)
    }

    pub fn goal_card(&self) -> Option<&AccomplishmentCard> {
        self.goal_plan.as_deref().and_then(|id| self.card(id))
    }

    pub fn can_afford(&self, card: &AccomplishmentCard) -> bool {
        self.influence.covers(&card.cost)
    }

    pub fn pile_remaining(&self) -> usize {
        self.pile.remaining()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "state")]
pub enum Outcome {
    Running,
    Collapsed { round: u32 },
    Survived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundPhase {
    AwaitingStart,
    /// Round begun; the collapse checkpoint has not been reached.
    Open,
    /// Investment closed; any drop to zero collapses immediately.
    Settled,
}

/// A proposed exchange of influence between two players.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeOffer {
    pub proposer: Role,
    pub responder: Role,
    /// What the proposer gives.
    pub offer: Bundle,
    /// What the proposer asks for in return.
    pub request: Bundle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub proposer: Role,
    pub responder: Role,
    pub offer: Bundle,
    pub request: Bundle,
    pub class: TradeClass,
    pub accepted: bool,
    /// Set when either side lacked the goods and the trade was auto-rejected.
    pub infeasible: bool,
}

/// Per-round bookkeeping used for summaries and metrics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLedger {
    pub round: u32,
    pub health_spend: [u32; 5],
    pub purchases: [Bundle; 5],
    pub trades: Vec<TradeRecord>,
    pub completed: Vec<(Role, String)>,
    pub dirty_penalties: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DrawnEvent {
    pub card: EventCard,
    pub resolved: bool,
}

/// What `begin_round` did.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundStart {
    pub round: u32,
    pub health_after_decay: i64,
    pub events: Vec<EventCard>,
}

/// Result of a finished game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "result")]
pub enum FinalOutcome {
    Collapsed { round: u32 },
    Survived { winners: Vec<Role> },
}

impl FinalOutcome {
    pub fn survived(&self) -> bool {
        matches!(self, FinalOutcome::Survived { .. })
    }

    pub fn winners(&self) -> &[Role] {
        match self {
            FinalOutcome::Survived { winners } => winners,
            FinalOutcome::Collapsed { .. } => &[],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GameState {
    #[serde(skip)]
    config: GameConfig,
    seed: u64,
    round: u32,
    health: i64,
    round_start_health: i64,
    players: Vec<PlayerState>,
    event_deck: Deck<EventCard>,
    drawn_events: Vec<DrawnEvent>,
    communication_blocked: bool,
    phase: RoundPhase,
    outcome: Outcome,
    ledger: RoundLedger,
    previous_ledger: Option<RoundLedger>,
    rng: ChaCha8Rng,
}

impl GameState {
    /// Set up a game: shuffle decks, build piles and deal hands.
    pub fn new(config: GameConfig, seed: u64, roster: &[(Role, String)]) -> Result<GameState, GameError> {
        config.validate()?;
        if roster.len() != 5 {
            return Err(GameError::RosterSize(roster.len()));
        }
        let mut personas: [Option<String>; 5] = Default::default();
        for (role, persona) in roster {
            let slot = &mut personas[role.seat()];
            if slot.is_some() {
                return Err(GameError::DuplicateRole(*role));
            }
            *slot = Some(persona.clone());
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut events = if config.events_enabled {
            config.event_deck.clone().unwrap_or_else(default_event_deck)
        } else {
            Vec::new()
        };
        events.shuffle(&mut rng);

        let mut players = Vec::with_capacity(5);
        for role in Role::ALL {
            let mut pile = match &config.accomplishments {
                AccomplishmentSource::Generated {
                    pile_size,
                    dirty_fraction,
                } => generate_pile(role, *pile_size, *dirty_fraction, &mut rng),
                AccomplishmentSource::Explicit { piles } => {
                    let mut pile = piles.get(&role).cloned().unwrap_or_default();
                    pile.shuffle(&mut rng);
                    pile
                }
            };
            if pile.len() < config.hand_size {
                return Err(GameError::DeckTooSmall {
                    role,
                    have: pile.len(),
                    need: config.hand_size,
                });
            }
            let hand: Vec<AccomplishmentCard> = pile.drain(..config.hand_size).collect();
            // keep the dealt cards out of the pile but the pile order stable
            players.push(PlayerState {
                role,
                persona_id: personas[role.seat()].take().unwrap_or_default(),
                coins: config.coin_budget,
                influence: Bundle::EMPTY,
                hand,
                points: 0,
                health_plan: None,
                goal_plan: None,
                dirty_opportunities: 0,
                dirty_claims: 0,
                meeting_summary: None,
                pile: Deck::new(pile),
                counted_dirty: BTreeSet::new(),
            });
        }

        Ok(GameState {
            seed,
            round: 1,
            health: config.initial_health,
            round_start_health: config.initial_health,
            players,
            event_deck: Deck::new(events),
            drawn_events: Vec::new(),
            communication_blocked: false,
            phase: RoundPhase::AwaitingStart,
            outcome: Outcome::Running,
            ledger: RoundLedger {
                round: 1,
                ..RoundLedger::default()
            },
            previous_ledger: None,
            rng,
            config,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn health(&self) -> i64 {
        self.health
    }

    /// Health after this round's decay, before events and investment.
    pub fn round_start_health(&self) -> i64 {
        self.round_start_health
    }

    pub fn players(&self) -> &[PlayerState] {
        &self.players
    }

    pub fn player(&self, role: Role) -> &PlayerState {
        &self.players[role.seat()]
    }

    fn player_mut(&mut self, role: Role) -> &mut PlayerState {
        &mut self.players[role.seat()]
    }

    pub fn drawn_events(&self) -> &[DrawnEvent] {
        &self.drawn_events
    }

    pub fn pending_decisions(&self) -> impl Iterator<Item = &EventCard> {
        self.drawn_events.iter().filter(|d| !d.resolved).map(|d| &d.card)
    }

    pub fn communication_blocked(&self) -> bool {
        self.communication_blocked
    }

    pub fn phase(&self) -> RoundPhase {
        self.phase
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn is_running(&self) -> bool {
        self.outcome == Outcome::Running
    }

    pub fn ledger(&self) -> &RoundLedger {
        &self.ledger
    }

    pub fn previous_ledger(&self) -> Option<&RoundLedger> {
        self.previous_ledger.as_ref()
    }

    pub fn influence_price(&self, role: Role, kind: InfluenceKind) -> Option<u32> {
        self.config.prices().price(role, kind)
    }

    fn ensure_running(&self) -> Result<(), GameError> {
        if self.outcome != Outcome::Running {
            return Err(GameError::Terminal);
        }
        Ok(())
    }

    fn ensure_in_round(&self) -> Result<(), GameError> {
        self.ensure_running()?;
        if self.phase == RoundPhase::AwaitingStart {
            return Err(GameError::RoundNotStarted);
        }
        Ok(())
    }

    fn collapse(&mut self) {
        self.health = 0;
        self.outcome = Outcome::Collapsed { round: self.round };
    }

    fn adjust_health(&mut self, delta: i64) {
        self.health += delta;
        if self.phase == RoundPhase::Settled && self.health <= 0 {
            self.collapse();
        }
    }

    /// Apply decay, reset coins and draw this round's events.
    pub fn begin_round(&mut self) -> Result<RoundStart, GameError> {
        self.ensure_running()?;
        if self.phase != RoundPhase::AwaitingStart {
            return Err(GameError::RoundInProgress);
        }
        self.health -= self.config.decay;
        self.round_start_health = self.health;
        self.communication_blocked = false;
        self.drawn_events.clear();
        self.ledger = RoundLedger {
            round: self.round,
            ..RoundLedger::default()
        };
        let budget = self.config.coin_budget;
        for p in &mut self.players {
            p.coins = budget;
            p.health_plan = None;
            p.counted_dirty.clear();
        }
        self.phase = RoundPhase::Open;

        let mut events = Vec::new();
        if self.config.events_enabled && !self.event_deck.is_empty() {
            let count = self.config.thresholds.events_for(self.health).unwrap_or(3);
            for _ in 0..count {
                if self.event_deck.remaining() == 0 {
                    self.event_deck.reshuffle(&mut self.rng);
                }
                let card = self.event_deck.draw().expect("deck is non-empty");
                let deferred = card.decision.is_some();
                if !deferred {
                    self.apply_effects(card.health_delta, card.resource_effect.as_ref(), card.blocks_communication);
                }
                events.push(card.clone());
                self.drawn_events.push(DrawnEvent {
                    card,
                    resolved: !deferred,
                });
            }
        }
        Ok(RoundStart {
            round: self.round,
            health_after_decay: self.round_start_health,
            events,
        })
    }

    fn apply_effects(&mut self, health_delta: i64, effect: Option<&ResourceEffect>, blocks: bool) {
        if health_delta != 0 {
            self.adjust_health(health_delta);
        }
        if let Some(effect) = effect {
            for p in &mut self.players {
                if let EffectTarget::Role(r) = effect.target {
                    if r != p.role {
                        continue;
                    }
                }
                let kinds: Vec<InfluenceKind> = match effect.kind {
                    KindSelector::All => InfluenceKind::ALL.to_vec(),
                    KindSelector::Kind(k) => vec![k],
                };
                for k in kinds {
                    p.influence[k] = match effect.change {
                        ResourceChange::Wipe => 0,
                        ResourceChange::Delta(d) => (p.influence[k] as i64 + d as i64).max(0) as u32,
                    };
                }
            }
        }
        if blocks {
            self.communication_blocked = true;
        }
    }

    /// Resolve a decision-bearing event drawn this round.
    pub fn apply_event(&mut self, event_id: &str, choice: Option<usize>) -> Result<(), GameError> {
        self.ensure_in_round()?;
        let idx = self
            .drawn_events
            .iter()
            .position(|d| d.card.id == event_id && !d.resolved)
            .ok_or_else(|| GameError::EventNotPending(event_id.to_string()))?;
        let card = self.drawn_events[idx].card.clone();
        let option = match (&card.decision, choice) {
            (Some(_), None) => return Err(GameError::MissingDecisionChoice(card.id)),
            (None, Some(_)) => return Err(GameError::UnexpectedDecisionChoice(card.id)),
            (Some(d), Some(c)) => Some(d.options.get(c).cloned().ok_or(GameError::InvalidDecisionChoice {
                event: card.id.clone(),
                choice: c,
            })?),
            (None, None) => None,
        };
        self.drawn_events[idx].resolved = true;
        self.apply_effects(card.health_delta, card.resource_effect.as_ref(), card.blocks_communication);
        if let Some(opt) = option {
            if self.is_running() {
                self.apply_effects(opt.health_delta, opt.resource_effect.as_ref(), false);
            }
        }
        Ok(())
    }

    pub fn set_meeting_summary(&mut self, role: Role, summary: Option<String>) {
        self.player_mut(role).meeting_summary = summary;
    }

    pub fn set_health_plan(&mut self, role: Role, coins: u32) {
        let budget = self.config.coin_budget;
        self.player_mut(role).health_plan = Some(coins.min(budget));
    }

    pub fn set_goal_plan(&mut self, role: Role, card_id: Option<&str>) -> Result<(), GameError> {
        let p = self.player_mut(role);
        if let Some(id) = card_id {
            if p.card(id).is_none() {
                return Err(GameError::UnknownCard {
                    role,
                    card: id.to_string(),
                });
            }
        }
        p.goal_plan = card_id.map(str::to_string);
        Ok(())
    }

    /// Spend coins on health, one point per coin.
    pub fn invest_health(&mut self, role: Role, coins: u32) -> Result<(), GameError> {
        self.ensure_in_round()?;
        let p = self.player_mut(role);
        if coins > p.coins {
            return Err(GameError::InsufficientCoins {
                role,
                need: coins,
                have: p.coins,
            });
        }
        p.coins -= coins;
        self.ledger.health_spend[role.seat()] += coins;
        self.adjust_health(coins as i64);
        Ok(())
    }

    /// The collapse checkpoint: after this, health at or below zero is fatal.
    pub fn close_investment(&mut self) -> Result<Outcome, GameError> {
        self.ensure_in_round()?;
        self.phase = RoundPhase::Settled;
        if self.health <= 0 {
            self.collapse();
        }
        Ok(self.outcome)
    }

    pub fn purchase_influence(&mut self, role: Role, kind: InfluenceKind, qty: u32) -> Result<(), GameError> {
        self.ensure_in_round()?;
        let price = self
            .influence_price(role, kind)
            .ok_or(GameError::NotPurchasable { role, kind })?;
        let cost = price * qty;
        let p = self.player_mut(role);
        if cost > p.coins {
            return Err(GameError::InsufficientCoins {
                role,
                need: cost,
                have: p.coins,
            });
        }
        p.coins -= cost;
        p.influence[kind] += qty;
        self.ledger.purchases[role.seat()][kind] += qty;
        Ok(())
    }

    /// Whether both sides currently hold what the trade would move.
    pub fn trade_feasible(&self, offer: &TradeOffer) -> bool {
        self.player(offer.proposer).influence.covers(&offer.offer)
            && self.player(offer.responder).influence.covers(&offer.request)
    }

    /// Execute (or record the rejection of) a trade. Infeasible trades are
    /// auto-rejected and flagged; coins never move.
    pub fn settle_trade(&mut self, offer: &TradeOffer, accepted: bool) -> Result<TradeRecord, GameError> {
        self.ensure_in_round()?;
        if offer.proposer == offer.responder {
            return Err(GameError::SelfTrade(offer.proposer));
        }
        if offer.offer.is_empty() || offer.request.is_empty() {
            return Err(GameError::ZeroQuantityTrade);
        }
        let feasible = self.trade_feasible(offer);
        let executed = accepted && feasible;
        if executed {
            let a = offer.proposer.seat();
            let b = offer.responder.seat();
            let pa = self.players[a].influence.checked_sub(&offer.offer).expect("feasible");
            let pb = self.players[b].influence.checked_sub(&offer.request).expect("feasible");
            self.players[a].influence = pa;
            self.players[a].influence.add(&offer.request);
            self.players[b].influence = pb;
            self.players[b].influence.add(&offer.offer);
        }
        let record = TradeRecord {
            proposer: offer.proposer,
            responder: offer.responder,
            offer: offer.offer,
            request: offer.request,
            class: classify_trade(offer.offer.total(), offer.request.total()).expect("non-empty"),
            accepted: executed,
            infeasible: !feasible,
        };
        self.ledger.trades.push(record.clone());
        Ok(record)
    }

    /// Count every affordable dirty card currently in hand as an opportunity
    /// (once per card per round). Returns the new counts by seat.
    pub fn count_dirty_opportunities(&mut self) -> Result<[u32; 5], GameError> {
        self.ensure_in_round()?;
        let mut counts = [0u32; 5];
        for p in &mut self.players {
            let fresh: Vec<String> = p
                .hand
                .iter()
                .filter(|c| c.is_dirty() && p.influence.covers(&c.cost) && !p.counted_dirty.contains(&c.id))
                .map(|c| c.id.clone())
                .collect();
            counts[p.role.seat()] = fresh.len() as u32;
            p.dirty_opportunities += fresh.len() as u32;
            p.counted_dirty.extend(fresh);
        }
        Ok(counts)
    }

    fn take_from_hand(&mut self, role: Role, card_id: &str) -> Result<AccomplishmentCard, GameError> {
        let p = self.player_mut(role);
        let idx = p
            .hand
            .iter()
            .position(|c| c.id == card_id)
            .ok_or_else(|| GameError::UnknownCard {
                role,
                card: card_id.to_string(),
            })?;
        let card = p.hand.remove(idx);
        if let Some(next) = p.pile.draw() {
            p.hand.insert(idx, next);
        }
        if p.goal_plan.as_deref() == Some(card_id) {
            p.goal_plan = None;
        }
        Ok(card)
    }

    /// Pay for and claim a card; dirty cards cost health.
    pub fn complete_accomplishment(&mut self, role: Role, card_id: &str) -> Result<AccomplishmentCard, GameError> {
        self.ensure_in_round()?;
        let p = self.player(role);
        let card = p.card(card_id).ok_or_else(|| GameError::UnknownCard {
            role,
            card: card_id.to_string(),
        })?;
        if !p.can_afford(card) {
            return Err(GameError::Unaffordable {
                role,
                card: card_id.to_string(),
            });
        }
        let card = self.take_from_hand(role, card_id)?;
        let p = self.player_mut(role);
        p.influence = p.influence.checked_sub(&card.cost).expect("affordable");
        p.points += card.points;
        if card.is_dirty() {
            if p.counted_dirty.insert(card.id.clone()) {
                p.dirty_opportunities += 1;
            }
            p.dirty_claims += 1;
            self.ledger.dirty_penalties += card.health_penalty as i64;
            self.adjust_health(-(card.health_penalty as i64));
        }
        self.ledger.completed.push((role, card.id.clone()));
        Ok(card)
    }

    /// Swap a card for the next one in the player's pile. `None` is a no-op.
    pub fn discard_accomplishment(&mut self, role: Role, card_id: Option<&str>) -> Result<(), GameError> {
        self.ensure_in_round()?;
        if let Some(id) = card_id {
            self.take_from_hand(role, id)?;
        }
        Ok(())
    }

    /// Final collapse check, archive the ledger and advance the round.
    pub fn end_round(&mut self) -> Result<Outcome, GameError> {
        self.ensure_in_round()?;
        if self.health <= 0 {
            self.collapse();
            return Ok(self.outcome);
        }
        self.previous_ledger = Some(std::mem::take(&mut self.ledger));
        self.round += 1;
        self.ledger.round = self.round;
        self.phase = RoundPhase::AwaitingStart;
        if self.round > self.config.rounds {
            self.outcome = Outcome::Survived;
        }
        Ok(self.outcome)
    }

    pub fn finalize(&self) -> Result<FinalOutcome, GameError> {
        match self.outcome {
            Outcome::Running => Err(GameError::MidGame),
            Outcome::Collapsed { round } => Ok(FinalOutcome::Collapsed { round }),
            Outcome::Survived => {
                let best = self.players.iter().map(|p| p.points).max().unwrap_or(0);
                let winners: Vec<Role> = self.players.iter().filter(|p| p.points == best).map(|p| p.role).collect();
                let winners = match self.config.tie_policy {
                    TiePolicy::NoWinner if winners.len() > 1 => Vec::new(),
                    _ => winners,
                };
                Ok(FinalOutcome::Survived { winners })
            }
        }
    }

    /// SHA-256 over every field that can change during play. Pile contents are
    /// covered by a commitment fixed when the pile is built or reshuffled.
    pub fn digest(&self) -> [u8; 32] {
        #[derive(Serialize)]
        struct PlayerPrint<'a> {
            role: Role,
            persona: &'a str,
            coins: u32,
            influence: [u32; 5],
            hand: Vec<&'a str>,
            points: u32,
            health_plan: Option<u32>,
            goal: Option<&'a str>,
            dirty: (u32, u32),
            summary: Option<&'a str>,
            pile: (&'a str, usize),
        }
        #[derive(Serialize)]
        struct Print<'a> {
            seed: u64,
            round: u32,
            health: i64,
            round_start_health: i64,
            players: Vec<PlayerPrint<'a>>,
            events: (&'a str, usize),
            drawn: Vec<(&'a str, bool)>,
            blocked: bool,
            phase: RoundPhase,
            outcome: Outcome,
            ledger: &'a RoundLedger,
            rng_word: u128,
        }
        let print = Print {
            seed: self.seed,
            round: self.round,
            health: self.health,
            round_start_health: self.round_start_health,
            players: self
                .players
                .iter()
                .map(|p| PlayerPrint {
                    role: p.role,
                    persona: &p.persona_id,
                    coins: p.coins,
                    influence: p.influence.counts(),
                    hand: p.hand.iter().map(|c| c.id.as_str()).collect(),
                    points: p.points,
                    health_plan: p.health_plan,
                    goal: p.goal_plan.as_deref(),
                    dirty: (p.dirty_opportunities, p.dirty_claims),
                    summary: p.meeting_summary.as_deref(),
                    pile: (&p.pile.commitment, p.pile.cursor),
                })
                .collect(),
            events: (&self.event_deck.commitment, self.event_deck.cursor),
            drawn: self.drawn_events.iter().map(|d| (d.card.id.as_str(), d.resolved)).collect(),
            blocked: self.communication_blocked,
            phase: self.phase,
            outcome: self.outcome,
            ledger: &self.ledger,
            rng_word: self.rng.get_word_pos(),
        };
        let bytes = serde_json::to_vec(&print).expect("fingerprint serializes");
        Sha256::digest(bytes).into()
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.digest())
    }
}
