use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::record::{
    genesis, link_outcome, link_phase, Applied, BackendInfo, CompletedCard, EntryKind, OutcomeEntry, PhaseEntry,
    RecordError, RecordHeader, RecordLine, RecordWriter, RunRecord, FORMAT_VERSION,
};
use crate::agents::persona::validate_group;
use crate::agents::policy::{LeadershipView, RulesView};
use crate::agents::{AgentDecision, AgentError, Facilitator, GoalChoice, Persona, PlayerView, Policy, Reply};
use crate::game::{GameConfig, GameError, GameState, InfluenceKind, Outcome, Role, RoundLedger, TradeOffer};
use crate::metrics::RunMetrics;

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("invalid setup: {0}")]
    Setup(String),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Record(#[from] RecordError),
}

/// Everything needed to play one game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSetup {
    pub experiment: String,
    pub config: GameConfig,
    pub seed: u64,
    /// Players in seat order.
    pub roster: Vec<(Role, Persona)>,
    pub communication: bool,
    pub backend: BackendInfo,
}

impl GameSetup {
    pub fn header(&self) -> RecordHeader {
        RecordHeader {
            format: FORMAT_VERSION,
            experiment: self.experiment.clone(),
            seed: self.seed,
            config: self.config.clone(),
            roster: self.roster.clone(),
            communication: self.communication,
            backend: self.backend.clone(),
        }
    }

    pub fn from_header(header: &RecordHeader) -> GameSetup {
        GameSetup {
            experiment: header.experiment.clone(),
            config: header.config.clone(),
            seed: header.seed,
            roster: header.roster.clone(),
            communication: header.communication,
            backend: header.backend.clone(),
        }
    }

    pub fn leadership(&self) -> Option<LeadershipView> {
        self.roster.iter().find(|(_, p)| p.leader).and_then(|(role, p)| {
            p.leadership_variant.map(|variant| LeadershipView { variant, leader: *role })
        })
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for role assignment, independent of the game's own stream.
pub fn role_rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 2)
}

/// Generator handed to policies (e.g. for dirty-card draws).
pub fn policy_rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 1)
}

/// Uniformly random bijection of personas to roles, in seat order.
pub fn assign_roles<R: Rng + ?Sized>(personas: &[Persona], rng: &mut R) -> Result<Vec<(Role, Persona)>, OrchestratorError> {
    if personas.len() != 5 {
        return Err(OrchestratorError::Setup(format!("need 5 personas, got {}", personas.len())));
    }
    let mut order: Vec<usize> = (0..5).collect();
    order.shuffle(rng);
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(seat, i)| (Role::from_seat(seat), personas[i].clone()))
        .collect())
}

/// Majority option; ties go to the lowest index.
pub fn majority(votes: &[usize], options: usize) -> usize {
    let mut counts = vec![0usize; options.max(1)];
    for v in votes {
        if *v < counts.len() {
            counts[*v] += 1;
        }
    }
    let best = counts.iter().copied().max().unwrap_or(0);
    counts.iter().position(|c| *c == best).unwrap_or(0)
}

/// Recipient of a trade: the named player, else the speciality owner of the
/// kind requested most (kind order breaks ties).
pub fn route_trade(proposer: Role, request: &crate::game::Bundle, to: Option<Role>) -> Option<Role> {
    let responder = match to {
        Some(r) => r,
        None => {
            let kind = request
                .iter()
                .max_by_key(|(k, q)| (*q, std::cmp::Reverse(k.index())))
                .map(|(k, _)| k)?;
            Role::speciality_owner(kind)
        }
    };
    (responder != proposer).then_some(responder)
}

enum Halt {
    Fatal(String),
    Game(GameError),
    Record(RecordError),
}

impl From<GameError> for Halt {
    fn from(e: GameError) -> Halt {
        Halt::Game(e)
    }
}

impl From<RecordError> for Halt {
    fn from(e: RecordError) -> Halt {
        Halt::Record(e)
    }
}

struct Runner<'a> {
    setup: &'a GameSetup,
    state: GameState,
    record: RunRecord,
    prev: String,
    seq: u64,
    writer: Option<&'a mut RecordWriter>,
    ledgers: Vec<RoundLedger>,
    rng: ChaCha8Rng,
    leadership: Option<LeadershipView>,
}

struct Meta {
    exchanges: Vec<crate::agents::Exchange>,
    rationale: String,
    fallback: bool,
}

impl<T> From<&Reply<T>> for Meta {
    fn from(r: &Reply<T>) -> Meta {
        Meta {
            exchanges: r.exchanges.clone(),
            rationale: r.rationale.clone(),
            fallback: r.fallback,
        }
    }
}

impl Meta {
    fn none() -> Meta {
        Meta {
            exchanges: Vec::new(),
            rationale: String::new(),
            fallback: false,
        }
    }
}

fn check_fatal(p: &mut dyn Policy) -> Result<(), Halt> {
    match p.take_fatal() {
        Some(msg) => Err(Halt::Fatal(msg)),
        None => Ok(()),
    }
}

impl<'a> Runner<'a> {
    fn push(
        &mut self,
        kind: EntryKind,
        role: Option<Role>,
        meta: Meta,
        decision: Option<AgentDecision>,
        applied: Applied,
    ) -> Result<(), RecordError> {
        self.push_at(self.state.round(), kind, role, meta, decision, applied)
    }

    fn push_at(
        &mut self,
        round: u32,
        kind: EntryKind,
        role: Option<Role>,
        meta: Meta,
        decision: Option<AgentDecision>,
        applied: Applied,
    ) -> Result<(), RecordError> {
        let mut entry = PhaseEntry {
            seq: self.seq,
            round,
            kind,
            role,
            exchanges: meta.exchanges,
            decision,
            rationale: meta.rationale,
            fallback: meta.fallback,
            applied,
            state_digest: self.state.digest_hex(),
            chain: String::new(),
        };
        entry.chain = link_phase(&self.prev, &entry);
        self.prev = entry.chain.clone();
        self.seq += 1;
        if let Some(w) = self.writer.as_deref_mut() {
            w.append(&RecordLine::Phase(entry.clone()))?;
        }
        self.record.entries.push(entry);
        Ok(())
    }

    fn view(&self, seat: usize, meeting_held: bool) -> PlayerView {
        let cfg = self.state.config();
        let (role, persona) = &self.setup.roster[seat];
        PlayerView {
            role: *role,
            persona: persona.clone(),
            me: self.state.player(*role).clone(),
            round: self.state.round(),
            health: self.state.health(),
            round_start_health: self.state.round_start_health(),
            events: self.state.drawn_events().iter().map(|d| d.card.clone()).collect(),
            meeting_held,
            leadership: self.leadership,
            last_round: self.state.previous_ledger().cloned(),
            rules: RulesView {
                prices: cfg.prices(),
                decay: cfg.decay,
                coin_budget: cfg.coin_budget,
                thresholds: cfg.thresholds,
            },
            roster: self.setup.roster.clone(),
        }
    }

    fn round(&mut self, policies: &mut [Box<dyn Policy>], facilitator: &mut dyn Facilitator) -> Result<(), Halt> {
        for role in Role::ALL {
            self.state.set_meeting_summary(role, None);
        }
        let start = self.state.begin_round()?;
        self.push(
            EntryKind::RoundStart,
            None,
            Meta::none(),
            None,
            Applied::RoundStarted {
                health_after_decay: start.health_after_decay,
                events: start.events.iter().map(|e| e.id.clone()).collect(),
                communication_blocked: self.state.communication_blocked(),
            },
        )?;

        // 1. event decisions
        let pending: Vec<_> = self.state.pending_decisions().cloned().collect();
        for event in pending {
            let n = event.decision.as_ref().map(|d| d.options.len()).unwrap_or(0);
            let mut votes = Vec::with_capacity(5);
            for (seat, policy) in policies.iter_mut().enumerate() {
                let view = self.view(seat, false);
                let reply = policy.event_choice(&view, &event);
                check_fatal(policy.as_mut())?;
                let mut meta = Meta::from(&reply);
                let option = if reply.value < n {
                    reply.value
                } else {
                    meta.fallback = true;
                    0
                };
                votes.push(option);
                self.push(
                    EntryKind::EventChoice,
                    Some(view.role),
                    meta,
                    Some(AgentDecision::EventChoice {
                        event: event.id.clone(),
                        option,
                    }),
                    Applied::Vote,
                )?;
            }
            let option = majority(&votes, n);
            self.state.apply_event(&event.id, Some(option))?;
            self.push(
                EntryKind::EventResolution,
                None,
                Meta::none(),
                None,
                Applied::EventResolved {
                    event: event.id.clone(),
                    option,
                    votes,
                },
            )?;
        }

        // 2. planning meeting
        let held = self.setup.communication && !self.state.communication_blocked();
        if held {
            let views: Vec<PlayerView> = (0..5).map(|s| self.view(s, false)).collect();
            let outcome = facilitator.meeting(&views, policies);
            if let Some(msg) = facilitator.take_fatal() {
                return Err(Halt::Fatal(msg));
            }
            self.push(
                EntryKind::Discussion,
                None,
                Meta::from(&outcome.discussion),
                None,
                Applied::Discussion {
                    transcript: outcome.discussion.value.clone(),
                },
            )?;
            for role in Role::ALL {
                self.state
                    .set_meeting_summary(role, Some(outcome.summaries.value[role.seat()].clone()));
            }
            self.push(
                EntryKind::Summary,
                None,
                Meta::from(&outcome.summaries),
                None,
                Applied::Summaries {
                    summaries: outcome.summaries.value.clone(),
                },
            )?;
        } else {
            let reason = if self.setup.communication {
                "communication blocked by an event"
            } else {
                "communication disabled"
            };
            self.push(
                EntryKind::MeetingSkipped,
                None,
                Meta::none(),
                None,
                Applied::MeetingSkipped {
                    reason: reason.to_string(),
                },
            )?;
        }

        // 3. health and goal plans
        for (seat, policy) in policies.iter_mut().enumerate() {
            let view = self.view(seat, held);
            let reply = policy.health_plan(&view);
            check_fatal(policy.as_mut())?;
            let coins = reply.value.min(view.me.coins);
            self.state.set_health_plan(view.role, coins);
            self.push(
                EntryKind::HealthPlan,
                Some(view.role),
                Meta::from(&reply),
                Some(AgentDecision::HealthPlan { coins: reply.value }),
                Applied::HealthPlanned { coins },
            )?;
        }
        for (seat, policy) in policies.iter_mut().enumerate() {
            let view = self.view(seat, held);
            let reply = policy.goal_choice(&view);
            check_fatal(policy.as_mut())?;
            let mut rejected = None;
            if let GoalChoice::Card(id) = &reply.value {
                if let Err(e) = self.state.set_goal_plan(view.role, Some(id)) {
                    rejected = Some(e.to_string());
                }
            }
            let goal = self.state.player(view.role).goal_plan.clone();
            self.push(
                EntryKind::GoalPlan,
                Some(view.role),
                Meta::from(&reply),
                Some(AgentDecision::GoalChoice {
                    goal: reply.value.clone(),
                }),
                Applied::GoalSet { goal, rejected },
            )?;
        }

        // 4. health investment, then purchases
        for role in Role::ALL {
            let p = self.state.player(role);
            let coins = p.health_plan.unwrap_or(0).min(p.coins);
            self.state.invest_health(role, coins)?;
            self.push(
                EntryKind::HealthInvestment,
                Some(role),
                Meta::none(),
                None,
                Applied::Invested {
                    coins,
                    health: self.state.health(),
                },
            )?;
        }
        let outcome = self.state.close_investment()?;
        self.push(
            EntryKind::InvestmentClose,
            None,
            Meta::none(),
            None,
            Applied::InvestmentClosed {
                health: self.state.health(),
                outcome,
            },
        )?;
        if !self.state.is_running() {
            return Ok(());
        }
        for (seat, policy) in policies.iter_mut().enumerate() {
            let view = self.view(seat, held);
            let reply = policy.purchases(&view);
            check_fatal(policy.as_mut())?;
            let mut items: Vec<(InfluenceKind, u32)> = Vec::new();
            let mut skipped = Vec::new();
            for (kind, qty) in &reply.value {
                if *qty == 0 {
                    continue;
                }
                match self.state.purchase_influence(view.role, *kind, *qty) {
                    Ok(()) => items.push((*kind, *qty)),
                    Err(e @ (GameError::NotPurchasable { .. } | GameError::InsufficientCoins { .. })) => {
                        skipped.push(e.to_string())
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            self.push(
                EntryKind::Purchase,
                Some(view.role),
                Meta::from(&reply),
                Some(AgentDecision::ResourcePurchase {
                    items: reply.value.clone(),
                }),
                Applied::Purchased { items, skipped },
            )?;
        }

        // 5. trades, one proposal per player in seat order
        for seat in 0..policies.len() {
            let view = self.view(seat, held);
            let reply = policies[seat].trade_offer(&view);
            check_fatal(policies[seat].as_mut())?;
            let decision = Some(AgentDecision::TradeProposal {
                proposal: reply.value.clone(),
            });
            let Some(proposal) = reply.value.clone() else {
                self.push(
                    EntryKind::TradeProposal,
                    Some(view.role),
                    Meta::from(&reply),
                    decision,
                    Applied::TradeSkipped {
                        reason: "no proposal".to_string(),
                    },
                )?;
                continue;
            };
            let responder = if proposal.offer.is_empty() || proposal.request.is_empty() {
                None
            } else {
                route_trade(view.role, &proposal.request, proposal.to)
            };
            let Some(responder) = responder else {
                self.push(
                    EntryKind::TradeProposal,
                    Some(view.role),
                    Meta::from(&reply),
                    decision,
                    Applied::TradeSkipped {
                        reason: "no valid trading partner".to_string(),
                    },
                )?;
                continue;
            };
            self.push(
                EntryKind::TradeProposal,
                Some(view.role),
                Meta::from(&reply),
                decision,
                Applied::TradeRouted { responder },
            )?;
            let offer = TradeOffer {
                proposer: view.role,
                responder,
                offer: proposal.offer,
                request: proposal.request,
            };
            if self.state.trade_feasible(&offer) {
                let rview = self.view(responder.seat(), held);
                let answer = policies[responder.seat()].trade_response(&rview, &offer);
                check_fatal(policies[responder.seat()].as_mut())?;
                let trade = self.state.settle_trade(&offer, answer.value)?;
                self.push(
                    EntryKind::TradeResponse,
                    Some(responder),
                    Meta::from(&answer),
                    Some(AgentDecision::TradeResponse { accept: answer.value }),
                    Applied::TradeSettled { trade },
                )?;
            } else {
                let trade = self.state.settle_trade(&offer, false)?;
                self.push(
                    EntryKind::TradeResponse,
                    Some(responder),
                    Meta::none(),
                    None,
                    Applied::TradeSettled { trade },
                )?;
            }
        }

        // 6. accomplishments and discards
        let counts = self.state.count_dirty_opportunities()?;
        self.push(
            EntryKind::DirtyCheck,
            None,
            Meta::none(),
            None,
            Applied::DirtyOpportunities { counts },
        )?;
        for (seat, policy) in policies.iter_mut().enumerate() {
            let view = self.view(seat, held);
            let reply = policy.completions(&view, &mut self.rng);
            check_fatal(policy.as_mut())?;
            let mut cards = Vec::new();
            let mut skipped = Vec::new();
            for id in &reply.value {
                let p = self.state.player(view.role);
                let ok = p.card(id).is_some_and(|c| p.can_afford(c));
                if !ok || !self.state.is_running() {
                    skipped.push(id.clone());
                    continue;
                }
                let before = p.dirty_opportunities;
                let card = self.state.complete_accomplishment(view.role, id)?;
                let counted_now = self.state.player(view.role).dirty_opportunities > before;
                cards.push(CompletedCard {
                    id: card.id,
                    points: card.points,
                    health_penalty: card.health_penalty,
                    counted_now,
                });
            }
            self.push(
                EntryKind::Completion,
                Some(view.role),
                Meta::from(&reply),
                Some(AgentDecision::Completion {
                    cards: reply.value.clone(),
                }),
                Applied::Completed {
                    cards,
                    skipped,
                    health: self.state.health(),
                    outcome: self.state.outcome(),
                },
            )?;
            if !self.state.is_running() {
                return Ok(());
            }
        }
        for (seat, policy) in policies.iter_mut().enumerate() {
            let view = self.view(seat, held);
            let reply = policy.discard(&view);
            check_fatal(policy.as_mut())?;
            let mut rejected = None;
            let mut card = None;
            if let Some(id) = &reply.value {
                match self.state.discard_accomplishment(view.role, Some(id)) {
                    Ok(()) => card = Some(id.clone()),
                    Err(e @ GameError::UnknownCard { .. }) => rejected = Some(e.to_string()),
                    Err(e) => return Err(e.into()),
                }
            }
            self.push(
                EntryKind::Discard,
                Some(view.role),
                Meta::from(&reply),
                Some(AgentDecision::Discard {
                    card: reply.value.clone(),
                }),
                Applied::Discarded { card, rejected },
            )?;
        }
        let round = self.state.round();
        let outcome = self.state.end_round()?;
        self.push_at(
            round,
            EntryKind::RoundEnd,
            None,
            Meta::none(),
            None,
            Applied::RoundEnded {
                health: self.state.health(),
                outcome,
            },
        )?;
        Ok(())
    }

    fn archive_ledger(&mut self) {
        let ledger = match self.state.outcome() {
            Outcome::Collapsed { .. } => self.state.ledger().clone(),
            _ => match self.state.previous_ledger() {
                Some(l) => l.clone(),
                None => return,
            },
        };
        if self.ledgers.last().map(|l| l.round) != Some(ledger.round) {
            self.ledgers.push(ledger);
        }
    }
}

fn validate_setup(setup: &GameSetup, policies: usize) -> Result<(), OrchestratorError> {
    if setup.roster.len() != 5 || policies != 5 {
        return Err(OrchestratorError::Setup(format!(
            "need 5 players and 5 policies, got {} and {policies}",
            setup.roster.len()
        )));
    }
    for (seat, (role, _)) in setup.roster.iter().enumerate() {
        if role.seat() != seat {
            return Err(OrchestratorError::Setup("roster must be in seat order".to_string()));
        }
    }
    let personas: Vec<Persona> = setup.roster.iter().map(|(_, p)| p.clone()).collect();
    validate_group(&personas)?;
    Ok(())
}

/// Play a game to the end. Failures after setup end the log with an
/// incomplete outcome entry rather than an error.
pub fn run_game(
    setup: &GameSetup,
    policies: &mut [Box<dyn Policy>],
    facilitator: &mut dyn Facilitator,
    mut writer: Option<&mut RecordWriter>,
) -> Result<RunRecord, OrchestratorError> {
    validate_setup(setup, policies.len())?;
    let ids: Vec<(Role, String)> = setup.roster.iter().map(|(r, p)| (*r, p.id.clone())).collect();
    let state = GameState::new(setup.config.clone(), setup.seed, &ids)?;
    let header = setup.header();
    if let Some(w) = writer.as_deref_mut() {
        w.append(&RecordLine::Header(header.clone()))?;
    }
    let mut runner = Runner {
        setup,
        prev: genesis(&header),
        record: RunRecord::new(header),
        state,
        seq: 0,
        writer,
        ledgers: Vec::new(),
        rng: policy_rng(setup.seed),
        leadership: setup.leadership(),
    };

    let mut error = None;
    while runner.state.is_running() {
        let result = runner.round(policies, facilitator);
        runner.archive_ledger();
        match result {
            Ok(()) => {}
            Err(Halt::Fatal(msg)) => {
                error = Some(msg);
                break;
            }
            Err(Halt::Game(e)) => {
                error = Some(e.to_string());
                break;
            }
            Err(Halt::Record(e)) => return Err(e.into()),
        }
    }

    let final_outcome = runner.state.finalize().ok();
    let metrics = final_outcome
        .as_ref()
        .map(|_| RunMetrics::from_game(&runner.state, &runner.ledgers, &setup.roster));
    let mut outcome = OutcomeEntry {
        seq: runner.seq,
        complete: error.is_none() && final_outcome.is_some(),
        error,
        outcome: final_outcome,
        final_health: runner.state.health(),
        metrics,
        chain: String::new(),
    };
    outcome.chain = link_outcome(&runner.prev, &outcome);
    if let Some(w) = runner.writer.as_deref_mut() {
        w.append(&RecordLine::Outcome(outcome.clone()))?;
    }
    runner.record.outcome = Some(outcome);
    Ok(runner.record)
}
