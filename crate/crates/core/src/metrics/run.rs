//! Per-game metrics, computed from the engine and recomputed from a log.

use serde::{Deserialize, Serialize};

use super::stats::{gini, TradeClass};
use crate::agents::Persona;
use crate::game::{FinalOutcome, GameState, Outcome, Role, RoundLedger};
use crate::orchestrator::record::{Applied, RunRecord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeCounts {
    pub fair: u32,
    pub generous: u32,
    pub selfish: u32,
}

impl TradeCounts {
    pub fn add(&mut self, class: TradeClass) {
        match class {
            TradeClass::Fair => self.fair += 1,
            TradeClass::Generous => self.generous += 1,
            TradeClass::Selfish => self.selfish += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.fair + self.generous + self.selfish
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerMetrics {
    pub role: Role,
    pub persona_id: String,
    /// Points held at the end of the game.
    pub points: u32,
    /// Points counted towards the group result: zero when the Port collapsed.
    pub points_all: u32,
    pub health_spend: u32,
    pub dirty_opportunities: u32,
    pub dirty_claims: u32,
    /// Proposals this player made, by class.
    pub trades: TradeCounts,
    pub proposals_rejected: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub survived: bool,
    pub collapse_round: Option<u32>,
    pub rounds_played: u32,
    pub final_health: i64,
    pub total_health_spend: u32,
    /// Gini of `points_all` across the five players.
    pub gini: f64,
    pub winners: Vec<Role>,
    /// Persona id of the designated leader, if any.
    pub leader: Option<String>,
    /// Seat order.
    pub players: Vec<PlayerMetrics>,
}

fn leader_of(roster: &[(Role, Persona)]) -> Option<String> {
    roster.iter().find(|(_, p)| p.leader).map(|(_, p)| p.id.clone())
}

fn finish(mut players: Vec<PlayerMetrics>, outcome: &FinalOutcome, rounds_played: u32, final_health: i64, leader: Option<String>) -> RunMetrics {
    let survived = outcome.survived();
    for p in &mut players {
        p.points_all = if survived { p.points } else { 0 };
    }
    let all: Vec<f64> = players.iter().map(|p| p.points_all as f64).collect();
    RunMetrics {
        survived,
        collapse_round: match outcome {
            FinalOutcome::Collapsed { round } => Some(*round),
            FinalOutcome::Survived { .. } => None,
        },
        rounds_played,
        final_health,
        total_health_spend: players.iter().map(|p| p.health_spend).sum(),
        gini: gini(&all).unwrap_or(0.0),
        winners: outcome.winners().to_vec(),
        leader,
        players,
    }
}

impl RunMetrics {
    /// From a finished game and the ledger of every round played.
    pub fn from_game(state: &GameState, ledgers: &[RoundLedger], roster: &[(Role, Persona)]) -> RunMetrics {
        let outcome = state.finalize().expect("game finished");
        let mut players: Vec<PlayerMetrics> = state
            .players()
            .iter()
            .map(|p| PlayerMetrics {
                role: p.role,
                persona_id: p.persona_id.clone(),
                points: p.points,
                points_all: 0,
                health_spend: 0,
                dirty_opportunities: p.dirty_opportunities,
                dirty_claims: p.dirty_claims,
                trades: TradeCounts::default(),
                proposals_rejected: 0,
            })
            .collect();
        for ledger in ledgers {
            for (seat, spend) in ledger.health_spend.iter().enumerate() {
                players[seat].health_spend += spend;
            }
            for t in &ledger.trades {
                let p = &mut players[t.proposer.seat()];
                p.trades.add(t.class);
                if !t.accepted {
                    p.proposals_rejected += 1;
                }
            }
        }
        let rounds_played = match state.outcome() {
            Outcome::Collapsed { round } => round,
            _ => ledgers.len() as u32,
        };
        finish(players, &outcome, rounds_played, state.health(), leader_of(roster))
    }

    /// Recompute from the log's entries alone. `None` for logs without a
    /// final outcome.
    pub fn from_record(record: &RunRecord) -> Option<RunMetrics> {
        let outcome = record.outcome.as_ref()?;
        let result = outcome.outcome.as_ref()?;
        let mut players: Vec<PlayerMetrics> = record
            .header
            .roster
            .iter()
            .map(|(role, persona)| PlayerMetrics {
                role: *role,
                persona_id: persona.id.clone(),
                points: 0,
                points_all: 0,
                health_spend: 0,
                dirty_opportunities: 0,
                dirty_claims: 0,
                trades: TradeCounts::default(),
                proposals_rejected: 0,
            })
            .collect();
        let mut rounds = 0;
        for e in &record.entries {
            rounds = rounds.max(e.round);
            match (&e.applied, e.role) {
                (Applied::Invested { coins, .. }, Some(role)) => players[role.seat()].health_spend += coins,
                (Applied::DirtyOpportunities { counts }, _) => {
                    for (seat, c) in counts.iter().enumerate() {
                        players[seat].dirty_opportunities += c;
                    }
                }
                (Applied::Completed { cards, .. }, Some(role)) => {
                    let p = &mut players[role.seat()];
                    for c in cards {
                        p.points += c.points;
                        if c.health_penalty > 0 {
                            p.dirty_claims += 1;
                        }
                        if c.counted_now {
                            p.dirty_opportunities += 1;
                        }
                    }
                }
                (Applied::TradeSettled { trade }, _) => {
                    let p = &mut players[trade.proposer.seat()];
                    p.trades.add(trade.class);
                    if !trade.accepted {
                        p.proposals_rejected += 1;
                    }
                }
                _ => {}
            }
        }
        Some(finish(
            players,
            result,
            rounds,
            outcome.final_health,
            leader_of(&record.header.roster),
        ))
    }
}
