//! Prompt construction for every phase.

pub mod context;
pub mod render;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use context::{leadership_line, PromptContext};
pub use render::{RenderError, TemplateSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Event,
    Discussion,
    Summary,
    HealthPlan,
    GoalPlanInitial,
    GoalReplan,
    Resource,
    TradeOffer,
    TradeAccept,
    Discard,
}

impl Phase {
    pub const ALL: [Phase; 10] = [
        Phase::Event,
        Phase::Discussion,
        Phase::Summary,
        Phase::HealthPlan,
        Phase::GoalPlanInitial,
        Phase::GoalReplan,
        Phase::Resource,
        Phase::TradeOffer,
        Phase::TradeAccept,
        Phase::Discard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Event => "event",
            Phase::Discussion => "discussion",
            Phase::Summary => "summary",
            Phase::HealthPlan => "health_plan",
            Phase::GoalPlanInitial => "goal_plan_initial",
            Phase::GoalReplan => "goal_replan",
            Phase::Resource => "resource",
            Phase::TradeOffer => "trade_offer",
            Phase::TradeAccept => "trade_accept",
            Phase::Discard => "discard",
        }
    }

    /// XML tag the phase's answer is expected in; `None` for free text.
    pub fn tag(self) -> Option<&'static str> {
        match self {
            Phase::Event => Some("EVENT"),
            Phase::Discussion | Phase::Summary => None,
            Phase::HealthPlan => Some("HEALTH"),
            Phase::GoalPlanInitial | Phase::GoalReplan => Some("GOAL"),
            Phase::Resource => Some("RESOURCE"),
            Phase::TradeOffer => Some("TRADE"),
            Phase::TradeAccept => Some("ACCEPT"),
            Phase::Discard => Some("DISCARD"),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Phase {
    type Err = RenderError;
    fn from_str(s: &str) -> Result<Phase, RenderError> {
        Phase::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| RenderError::UnknownPhase(s.to_string()))
    }
}

/// Renders prompts from a template set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Prompter {
    pub templates: TemplateSet,
}

impl Prompter {
    pub fn new(templates: TemplateSet) -> Prompter {
        Prompter { templates }
    }

    pub fn general(&self, ctx: &PromptContext) -> Result<String, RenderError> {
        let slots = ctx.slots(self.templates.get("svo_info"));
        render::render(self.templates.get("general"), &slots)
    }

    /// General preamble followed by the phase's task and examples.
    pub fn phase(&self, phase: Phase, ctx: &PromptContext) -> Result<String, RenderError> {
        let slots = ctx.slots(self.templates.get("svo_info"));
        let general = render::render(self.templates.get("general"), &slots)?;
        let task = render::render(self.templates.get(phase.name()), &slots)?;
        Ok(format!("{general}\n{task}"))
    }
}

/// Render the general preamble with the default templates.
pub fn render_general(ctx: &PromptContext) -> Result<String, RenderError> {
    Prompter::default().general(ctx)
}

/// Render a full phase prompt with the default templates.
pub fn render_phase(phase: Phase, ctx: &PromptContext) -> Result<String, RenderError> {
    Prompter::default().phase(phase, ctx)
}
