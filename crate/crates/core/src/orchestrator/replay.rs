//! Re-running a logged game from its recorded decisions.

use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::record::{Applied, EntryKind, PhaseEntry, RecordError, RunRecord};
use super::runner::{run_game, GameSetup, OrchestratorError};
use crate::agents::{
    AgentDecision, Facilitator, GoalChoice, MeetingOutcome, PlayerView, Policy, Proposal, Reply,
};
use crate::game::{EventCard, InfluenceKind, Role, TradeOffer};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Chain(#[from] RecordError),
    #[error(transparent)]
    Setup(#[from] OrchestratorError),
    #[error("replay diverged at entry {seq}: logged {logged}, replayed {replayed}")]
    Diverged { seq: u64, logged: String, replayed: String },
    #[error("replay produced {replayed} entries, the log has {logged}")]
    Length { logged: usize, replayed: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub entries: usize,
    pub head: String,
}

fn reply_from<T>(entry: &PhaseEntry, value: T) -> Reply<T> {
    Reply {
        value,
        rationale: entry.rationale.clone(),
        exchanges: entry.exchanges.clone(),
        fallback: entry.fallback,
    }
}

/// Feeds one player's logged decisions back in order.
pub struct ReplayPolicy {
    queue: VecDeque<PhaseEntry>,
    diverged: Option<String>,
}

impl ReplayPolicy {
    pub fn new(record: &RunRecord, role: Role) -> ReplayPolicy {
        let queue = record
            .entries
            .iter()
            .filter(|e| e.role == Some(role) && e.decision.is_some())
            .cloned()
            .collect();
        ReplayPolicy { queue, diverged: None }
    }

    fn next<T>(&mut self, kind: EntryKind, fallback: T, pick: impl FnOnce(&AgentDecision) -> Option<T>) -> Reply<T> {
        match self.queue.pop_front() {
            Some(entry) if entry.kind == kind => {
                if let Some(value) = entry.decision.as_ref().and_then(pick) {
                    return reply_from(&entry, value);
                }
                self.diverged = Some(format!("entry {} has the wrong decision type", entry.seq));
            }
            Some(entry) => {
                self.diverged = Some(format!("expected {kind:?}, log has {:?} at {}", entry.kind, entry.seq));
            }
            None => self.diverged = Some(format!("log has no further {kind:?} decision")),
        }
        Reply::new(fallback, "replay diverged")
    }
}

impl Policy for ReplayPolicy {
    fn event_choice(&mut self, _view: &PlayerView, _event: &EventCard) -> Reply<usize> {
        self.next(EntryKind::EventChoice, 0, |d| match d {
            AgentDecision::EventChoice { option, .. } => Some(*option),
            _ => None,
        })
    }

    fn health_plan(&mut self, _view: &PlayerView) -> Reply<u32> {
        self.next(EntryKind::HealthPlan, 0, |d| match d {
            AgentDecision::HealthPlan { coins } => Some(*coins),
            _ => None,
        })
    }

    fn goal_choice(&mut self, _view: &PlayerView) -> Reply<GoalChoice> {
        self.next(EntryKind::GoalPlan, GoalChoice::Same, |d| match d {
            AgentDecision::GoalChoice { goal } => Some(goal.clone()),
            _ => None,
        })
    }

    fn purchases(&mut self, _view: &PlayerView) -> Reply<Vec<(InfluenceKind, u32)>> {
        self.next(EntryKind::Purchase, Vec::new(), |d| match d {
            AgentDecision::ResourcePurchase { items } => Some(items.clone()),
            _ => None,
        })
    }

    fn trade_offer(&mut self, _view: &PlayerView) -> Reply<Option<Proposal>> {
        self.next(EntryKind::TradeProposal, None, |d| match d {
            AgentDecision::TradeProposal { proposal } => Some(proposal.clone()),
            _ => None,
        })
    }

    fn trade_response(&mut self, _view: &PlayerView, _offer: &TradeOffer) -> Reply<bool> {
        self.next(EntryKind::TradeResponse, false, |d| match d {
            AgentDecision::TradeResponse { accept } => Some(*accept),
            _ => None,
        })
    }

    fn completions(&mut self, _view: &PlayerView, _rng: &mut ChaCha8Rng) -> Reply<Vec<String>> {
        self.next(EntryKind::Completion, Vec::new(), |d| match d {
            AgentDecision::Completion { cards } => Some(cards.clone()),
            _ => None,
        })
    }

    fn discard(&mut self, _view: &PlayerView) -> Reply<Option<String>> {
        self.next(EntryKind::Discard, None, |d| match d {
            AgentDecision::Discard { card } => Some(card.clone()),
            _ => None,
        })
    }

    fn take_fatal(&mut self) -> Option<String> {
        self.diverged.take()
    }
}

/// Feeds logged meetings back in order.
pub struct ReplayFacilitator {
    meetings: VecDeque<(PhaseEntry, PhaseEntry)>,
    diverged: Option<String>,
}

impl ReplayFacilitator {
    pub fn new(record: &RunRecord) -> ReplayFacilitator {
        let mut meetings = VecDeque::new();
        let mut discussion = None;
        for e in &record.entries {
            match e.kind {
                EntryKind::Discussion => discussion = Some(e.clone()),
                EntryKind::Summary => {
                    if let Some(d) = discussion.take() {
                        meetings.push_back((d, e.clone()));
                    }
                }
                _ => {}
            }
        }
        ReplayFacilitator {
            meetings,
            diverged: None,
        }
    }
}

impl Facilitator for ReplayFacilitator {
    fn meeting(&mut self, _views: &[PlayerView], _policies: &mut [Box<dyn Policy>]) -> MeetingOutcome {
        let Some((d, s)) = self.meetings.pop_front() else {
            self.diverged = Some("log has no further meeting".to_string());
            return MeetingOutcome {
                discussion: Reply::new(String::new(), ""),
                summaries: Reply::new(Default::default(), ""),
            };
        };
        let transcript = match &d.applied {
            Applied::Discussion { transcript } => transcript.clone(),
            _ => String::new(),
        };
        let summaries = match &s.applied {
            Applied::Summaries { summaries } => summaries.clone(),
            _ => Default::default(),
        };
        MeetingOutcome {
            discussion: reply_from(&d, transcript),
            summaries: reply_from(&s, summaries),
        }
    }

    fn take_fatal(&mut self) -> Option<String> {
        self.diverged.take()
    }
}

/// Check the chain, re-run the logged decisions through a fresh engine and
/// compare every link.
pub fn replay(record: &RunRecord) -> Result<ReplayReport, ReplayError> {
    record.verify_chain()?;
    let setup = GameSetup::from_header(&record.header);
    let mut policies: Vec<Box<dyn Policy>> = Role::ALL
        .iter()
        .map(|r| Box::new(ReplayPolicy::new(record, *r)) as Box<dyn Policy>)
        .collect();
    let mut facilitator = ReplayFacilitator::new(record);
    let again = run_game(&setup, &mut policies, &mut facilitator, None)?;
    for (logged, replayed) in record.entries.iter().zip(&again.entries) {
        if logged.chain != replayed.chain {
            return Err(ReplayError::Diverged {
                seq: logged.seq,
                logged: logged.chain.clone(),
                replayed: replayed.chain.clone(),
            });
        }
    }
    if record.entries.len() != again.entries.len() {
        return Err(ReplayError::Length {
            logged: record.entries.len(),
            replayed: again.entries.len(),
        });
    }
    let (logged, replayed) = (record.head(), again.head());
    if record.is_complete() && logged != replayed {
        return Err(ReplayError::Diverged {
            seq: record.entries.len() as u64,
            logged,
            replayed,
        });
    }
    Ok(ReplayReport {
        entries: record.entries.len(),
        head: logged,
    })
}
