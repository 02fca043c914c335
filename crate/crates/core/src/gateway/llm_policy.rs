//! Players and the meeting facilitator backed by a chat model.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use super::client::{ChatRequest, Gateway, GatewayError};
use super::extract::{extract_tag, ExtractError};
use super::parse::{normalize, parse_decision, parse_event_option, ParseError};
use crate::agents::{AgentDecision, Exchange, Facilitator, GoalChoice, MeetingOutcome, PlayerView, Policy, Proposal, Reply};
use crate::game::{AccomplishmentCard, EventCard, InfluenceKind, Role, TradeOffer};
use crate::prompts::{Phase, PromptContext, Prompter};

pub const NO_SUMMARY: &str = "No summary available.";

/// Model settings shared by every call in a run.
#[derive(Clone, Debug)]
pub struct ModelSettings {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Prefix of every request tag.
    pub run_id: String,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            model: super::client::DEFAULT_MODEL.to_string(),
            temperature: 1.0,
            max_tokens: 2048,
            run_id: "run".to_string(),
        }
    }
}

/// Sends prompts, keeps every exchange, and tracks fatal gateway errors.
#[derive(Clone, Debug)]
struct Caller {
    gateway: Gateway,
    prompter: Arc<Prompter>,
    settings: ModelSettings,
    calls: u64,
    fatal: Option<String>,
}

impl Caller {
    fn request(&mut self, round: u32, phase: Phase, who: &str, prompt: &str) -> ChatRequest {
        self.calls += 1;
        ChatRequest {
            model: self.settings.model.clone(),
            prompt: prompt.to_string(),
            temperature: self.settings.temperature,
            max_tokens: self.settings.max_tokens,
            tag: format!("{}/r{round}/{phase}/{who}/{}", self.settings.run_id, self.calls),
        }
    }

    /// Call until `interpret` accepts the response or retries run out.
    fn ask<T>(
        &mut self,
        round: u32,
        phase: Phase,
        who: &str,
        prompt: Result<String, crate::prompts::RenderError>,
        fallback: T,
        mut interpret: impl FnMut(&str) -> Result<T, ParseError>,
    ) -> Reply<T> {
        let mut reply = Reply::new(fallback, String::new());
        reply.fallback = true;
        if self.fatal.is_some() {
            reply.rationale = "skipped after a fatal gateway error".to_string();
            return reply;
        }
        let prompt = match prompt {
            Ok(p) => p,
            Err(e) => {
                self.fatal = Some(format!("prompt rendering failed: {e}"));
                reply.rationale = e.to_string();
                return reply;
            }
        };
        let attempts = 1 + self.gateway.policy().max_parse_retries;
        for _ in 0..attempts {
            let request = self.request(round, phase, who, &prompt);
            let text = match self.gateway.complete(&request) {
                Ok(c) => c.text,
                Err(e) => {
                    self.fatal = Some(e.to_string());
                    reply.rationale = e.to_string();
                    return reply;
                }
            };
            reply.exchanges.push(Exchange {
                prompt: prompt.clone(),
                response: text.clone(),
            });
            match interpret(&text) {
                Ok(value) => {
                    reply.value = value;
                    reply.rationale = rationale(&text, phase);
                    reply.fallback = false;
                    return reply;
                }
                Err(e) => {
                    log::info!("{}: {e}; asking again", request.tag);
                    reply.rationale = e.to_string();
                }
            }
        }
        reply
    }

    fn free_text(&mut self, round: u32, phase: Phase, prompt: &str) -> Result<Exchange, GatewayError> {
        let request = self.request(round, phase, "group", prompt);
        let text = self.gateway.complete(&request)?.text;
        Ok(Exchange {
            prompt: prompt.to_string(),
            response: text,
        })
    }
}

/// Response text before the final answer tag.
fn rationale(text: &str, phase: Phase) -> String {
    let Some(tag) = phase.tag() else {
        return text.trim().to_string();
    };
    let open = format!("<{}>", tag.to_ascii_lowercase());
    match text.to_ascii_lowercase().rfind(&open) {
        Some(i) => text[..i].trim().to_string(),
        None => text.trim().to_string(),
    }
}

fn payload(text: &str, phase: Phase) -> Result<String, ParseError> {
    Ok(extract_tag(text, phase.tag().ok_or(ParseError::NoDecision(phase))?)?)
}

fn invalid(phase: Phase, payload: &str, reason: impl Into<String>) -> ParseError {
    ParseError::Grammar {
        phase,
        payload: payload.to_string(),
        reason: reason.into(),
    }
}

/// Card in `hand` named (or identified) by `title`.
pub fn find_card<'a>(hand: &'a [AccomplishmentCard], title: &str) -> Option<&'a AccomplishmentCard> {
    let wanted = normalize(title.trim_matches(['"', '\'', '.'])).to_lowercase();
    hand.iter()
        .find(|c| normalize(&c.name).to_lowercase() == wanted || c.id.to_lowercase() == wanted)
}

/// Completion rule for model-backed players: the goal card if affordable,
/// then affordable clean cards by descending points.
pub fn default_completions(view: &PlayerView) -> Vec<String> {
    let goal = view.me.goal_plan.as_deref();
    let mut have = view.me.influence;
    let mut picks = Vec::new();
    if let Some(card) = view.me.goal_card() {
        if have.covers(&card.cost) {
            have = have.checked_sub(&card.cost).expect("covered");
            picks.push(card.id.clone());
        }
    }
    let mut clean: Vec<&AccomplishmentCard> = view
        .me
        .hand
        .iter()
        .filter(|c| !c.is_dirty() && Some(c.id.as_str()) != goal)
        .collect();
    clean.sort_by(|a, b| b.points.cmp(&a.points).then_with(|| a.id.cmp(&b.id)));
    for card in clean {
        if have.covers(&card.cost) {
            have = have.checked_sub(&card.cost).expect("covered");
            picks.push(card.id.clone());
        }
    }
    picks
}

/// A player whose phase decisions come from a chat model.
#[derive(Clone, Debug)]
pub struct LlmPolicy {
    caller: Caller,
}

impl LlmPolicy {
    pub fn new(gateway: Gateway, prompter: Arc<Prompter>, settings: ModelSettings) -> LlmPolicy {
        LlmPolicy {
            caller: Caller {
                gateway,
                prompter,
                settings,
                calls: 0,
                fatal: None,
            },
        }
    }

    fn prompt(&self, phase: Phase, ctx: &PromptContext) -> Result<String, crate::prompts::RenderError> {
        self.caller.prompter.phase(phase, ctx)
    }
}

impl Policy for LlmPolicy {
    fn event_choice(&mut self, view: &PlayerView, event: &EventCard) -> Reply<usize> {
        let options = event.decision.as_ref().map(|d| d.options.clone()).unwrap_or_default();
        let prompt = self.prompt(Phase::Event, &PromptContext::from_view(view).with_event(event));
        self.caller.ask(view.round, Phase::Event, view.role.name(), prompt, 0, |text| {
            parse_event_option(&payload(text, Phase::Event)?, &options)
        })
    }

    fn health_plan(&mut self, view: &PlayerView) -> Reply<u32> {
        let prompt = self.prompt(Phase::HealthPlan, &PromptContext::from_view(view));
        let budget = view.me.coins;
        self.caller.ask(view.round, Phase::HealthPlan, view.role.name(), prompt, 0, |text| {
            let p = payload(text, Phase::HealthPlan)?;
            match parse_decision(Phase::HealthPlan, &p)? {
                AgentDecision::HealthPlan { coins } if coins <= budget => Ok(coins),
                _ => Err(invalid(Phase::HealthPlan, &p, format!("only {budget} coins available"))),
            }
        })
    }

    fn goal_choice(&mut self, view: &PlayerView) -> Reply<GoalChoice> {
        let phase = if view.me.goal_plan.is_some() {
            Phase::GoalReplan
        } else {
            Phase::GoalPlanInitial
        };
        let prompt = self.prompt(phase, &PromptContext::from_view(view));
        let hand = view.me.hand.clone();
        let has_goal = view.me.goal_plan.is_some();
        self.caller.ask(view.round, phase, view.role.name(), prompt, GoalChoice::Same, |text| {
            let p = payload(text, phase)?;
            match parse_decision(phase, &p)? {
                AgentDecision::GoalChoice { goal: GoalChoice::Same } if has_goal => Ok(GoalChoice::Same),
                AgentDecision::GoalChoice { goal: GoalChoice::Card(title) } => find_card(&hand, &title)
                    .map(|c| GoalChoice::Card(c.id.clone()))
                    .ok_or_else(|| invalid(phase, &p, "no such goal in hand")),
                _ => Err(invalid(phase, &p, "a goal must be named")),
            }
        })
    }

    fn purchases(&mut self, view: &PlayerView) -> Reply<Vec<(InfluenceKind, u32)>> {
        let prompt = self.prompt(Phase::Resource, &PromptContext::from_view(view));
        let v = view.clone();
        self.caller.ask(view.round, Phase::Resource, view.role.name(), prompt, Vec::new(), |text| {
            let p = payload(text, Phase::Resource)?;
            let AgentDecision::ResourcePurchase { items } = parse_decision(Phase::Resource, &p)? else {
                unreachable!("resource grammar yields purchases")
            };
            let mut cost = 0u32;
            for (kind, qty) in &items {
                let price = v
                    .price(*kind)
                    .ok_or_else(|| invalid(Phase::Resource, &p, format!("{kind} can only be traded for")))?;
                cost = cost.saturating_add(price.saturating_mul(*qty));
            }
            if cost > v.me.coins {
                return Err(invalid(Phase::Resource, &p, format!("costs {cost} coins, {} available", v.me.coins)));
            }
            Ok(items)
        })
    }

    fn trade_offer(&mut self, view: &PlayerView) -> Reply<Option<Proposal>> {
        let prompt = self.prompt(Phase::TradeOffer, &PromptContext::from_view(view));
        let me = view.role;
        self.caller.ask(view.round, Phase::TradeOffer, me.name(), prompt, None, |text| {
            let p = payload(text, Phase::TradeOffer)?;
            match parse_decision(Phase::TradeOffer, &p)? {
                AgentDecision::TradeProposal { proposal: Some(pr) } if pr.to == Some(me) => {
                    Err(invalid(Phase::TradeOffer, &p, "cannot trade with yourself"))
                }
                AgentDecision::TradeProposal { proposal } => Ok(proposal),
                _ => unreachable!("trade grammar yields proposals"),
            }
        })
    }

    fn trade_response(&mut self, view: &PlayerView, offer: &TradeOffer) -> Reply<bool> {
        let prompt = self.prompt(Phase::TradeAccept, &PromptContext::from_view(view).with_offer(offer));
        self.caller.ask(view.round, Phase::TradeAccept, view.role.name(), prompt, false, |text| {
            match parse_decision(Phase::TradeAccept, &payload(text, Phase::TradeAccept)?)? {
                AgentDecision::TradeResponse { accept } => Ok(accept),
                _ => unreachable!("accept grammar yields responses"),
            }
        })
    }

    fn completions(&mut self, view: &PlayerView, _rng: &mut ChaCha8Rng) -> Reply<Vec<String>> {
        Reply::new(default_completions(view), "goal first, then clean cards by points")
    }

    fn discard(&mut self, view: &PlayerView) -> Reply<Option<String>> {
        let prompt = self.prompt(Phase::Discard, &PromptContext::from_view(view));
        let hand = view.me.hand.clone();
        self.caller.ask(view.round, Phase::Discard, view.role.name(), prompt, None, |text| {
            let p = payload(text, Phase::Discard)?;
            match parse_decision(Phase::Discard, &p)? {
                AgentDecision::Discard { card: None } => Ok(None),
                AgentDecision::Discard { card: Some(title) } => find_card(&hand, &title)
                    .map(|c| Some(c.id.clone()))
                    .ok_or_else(|| invalid(Phase::Discard, &p, "no such goal in hand")),
                _ => unreachable!("discard grammar yields discards"),
            }
        })
    }

    fn take_fatal(&mut self) -> Option<String> {
        self.caller.fatal.take()
    }
}

/// Runs the planning meeting as one discussion call and one summary call.
#[derive(Clone, Debug)]
pub struct LlmFacilitator {
    caller: Caller,
}

impl LlmFacilitator {
    pub fn new(gateway: Gateway, prompter: Arc<Prompter>, settings: ModelSettings) -> LlmFacilitator {
        LlmFacilitator {
            caller: Caller {
                gateway,
                prompter,
                settings,
                calls: 0,
                fatal: None,
            },
        }
    }
}

fn partial_summaries(text: &str) -> [String; 5] {
    std::array::from_fn(|seat| match extract_tag(text, Role::from_seat(seat).name()) {
        Ok(s) => s,
        Err(ExtractError::Missing(_) | ExtractError::Unterminated(_) | ExtractError::EmptyTag) => {
            NO_SUMMARY.to_string()
        }
    })
}

impl Facilitator for LlmFacilitator {
    fn meeting(&mut self, views: &[PlayerView], _policies: &mut [Box<dyn Policy>]) -> MeetingOutcome {
        let round = views.first().map(|v| v.round).unwrap_or(0);
        let ctx = PromptContext::from_view(&views[0]);
        let mut discussion = Reply::new(String::new(), String::new());
        let prompt = self.caller.prompter.phase(Phase::Discussion, &ctx);
        match prompt.map_err(|e| e.to_string()).and_then(|p| {
            self.caller.free_text(round, Phase::Discussion, &p).map_err(|e| e.to_string())
        }) {
            Ok(ex) => {
                discussion.value = ex.response.clone();
                discussion.exchanges.push(ex);
            }
            Err(e) => {
                self.caller.fatal = Some(e.clone());
                discussion.rationale = e;
                discussion.fallback = true;
            }
        }
        let prompt = self
            .caller
            .prompter
            .phase(Phase::Summary, &ctx.with_meeting(&discussion.value));
        let fallback: [String; 5] = std::array::from_fn(|_| NO_SUMMARY.to_string());
        let mut last = String::new();
        let mut summaries = self.caller.ask(round, Phase::Summary, "group", prompt, fallback, |text| {
            last = text.to_string();
            super::parse::parse_player_summaries(text)
        });
        if summaries.fallback && !last.is_empty() {
            summaries.value = partial_summaries(&last);
        }
        MeetingOutcome { discussion, summaries }
    }

    fn take_fatal(&mut self) -> Option<String> {
        self.caller.fatal.take()
    }
}
