use std::collections::BTreeMap;

use serde::Serialize;

use crate::agents::persona::{LeadershipVariant, PersonaKind};
use crate::agents::policy::PlayerView;
use crate::game::{AccomplishmentCard, Bundle, EventCard, Prices, Role, RoundLedger, Thresholds, TradeOffer};

/// Order in which players are listed in the meeting prompts.
pub const LISTING_ORDER: [Role; 5] = [
    Role::Pioneer,
    Role::Entrepreneur,
    Role::Researcher,
    Role::Politician,
    Role::Curator,
];

/// Leadership information shown to `viewer`, if any.
pub fn leadership_line(variant: LeadershipVariant, leader: Role, viewer: Role) -> Option<String> {
    let announced = format!("{leader} is the designated leader");
    match variant {
        LeadershipVariant::Vanilla if viewer == leader => {
            Some("You are the designated leader of the group; you may disclose this".to_string())
        }
        LeadershipVariant::Vanilla => None,
        LeadershipVariant::Announce => Some(announced),
        LeadershipVariant::Unaware if viewer == leader => None,
        LeadershipVariant::Unaware => Some(announced),
    }
}

fn leader_note(variant: LeadershipVariant) -> &'static str {
    match variant {
        LeadershipVariant::Vanilla => {
            " This player has been told privately that they are the designated leader and may disclose it."
        }
        LeadershipVariant::Announce => " This player is the designated leader, and everyone has been told.",
        LeadershipVariant::Unaware => {
            " The other players have been told this player is the designated leader; this player has not been told."
        }
    }
}

/// One entry of the meeting prompts' player list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlayerLine {
    pub role: Role,
    pub personality: String,
    pub leader_note: Option<String>,
}

/// Every value a prompt template can reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PromptContext {
    pub points: u32,
    pub coins: u32,
    pub leadership: Option<String>,
    pub role: Role,
    pub prices: Prices,
    pub personality: String,
    pub health: i64,
    pub round_start_health: i64,
    pub decay: i64,
    pub coin_budget: u32,
    pub thresholds: Thresholds,
    /// (name, description) of each event this round.
    pub events: Vec<(String, String)>,
    pub meeting_summary: Option<String>,
    pub last_round: Option<RoundLedger>,
    pub resources: Bundle,
    pub hand: Vec<AccomplishmentCard>,
    pub current_goal: Option<AccomplishmentCard>,
    pub players: Vec<PlayerLine>,
    pub svo_info: bool,
    pub meeting: Option<String>,
    pub pending_offer: Option<TradeOffer>,
    pub event: Option<EventCard>,
}

fn sentence(text: &str) -> String {
    text.trim().trim_end_matches('.').to_string()
}

pub fn describe_cards(cards: &[AccomplishmentCard]) -> String {
    if cards.is_empty() {
        return "none".to_string();
    }
    cards.iter().map(|c| c.describe()).collect::<Vec<_>>().join("; ")
}

/// "trades: ...; health spending: ..." for the previous round.
pub fn describe_last_round(ledger: Option<&RoundLedger>) -> String {
    let Some(ledger) = ledger else {
        return "this is the first round".to_string();
    };
    let trades: Vec<String> = ledger
        .trades
        .iter()
        .filter(|t| t.accepted)
        .map(|t| {
            format!(
                "{} gave {} to the {} for {}",
                t.proposer,
                t.offer.describe(),
                t.responder,
                t.request.describe()
            )
        })
        .collect();
    let trades = if trades.is_empty() {
        "no trades happened".to_string()
    } else {
        format!("trades: {}", trades.join("; "))
    };
    let spend: Vec<String> = Role::ALL
        .iter()
        .map(|r| format!("{r} {}", ledger.health_spend[r.seat()]))
        .collect();
    format!("{trades}; health spending: {}", spend.join(", "))
}

impl PromptContext {
    pub fn from_view(view: &PlayerView) -> PromptContext {
        let leadership = view
            .leadership
            .and_then(|l| leadership_line(l.variant, l.leader, view.role));
        let players = LISTING_ORDER
            .iter()
            .filter_map(|role| view.roster.iter().find(|(r, _)| r == role))
            .map(|(role, persona)| PlayerLine {
                role: *role,
                personality: persona.short_text(),
                leader_note: view
                    .leadership
                    .filter(|l| l.leader == *role)
                    .map(|l| leader_note(l.variant).to_string()),
            })
            .collect();
        let svo_info = view
            .roster
            .iter()
            .any(|(_, p)| matches!(p.kind, PersonaKind::Svo { .. }));
        PromptContext {
            points: view.me.points,
            coins: view.me.coins,
            leadership,
            role: view.role,
            prices: view.rules.prices,
            personality: view.persona.text(),
            health: view.health,
            round_start_health: view.round_start_health,
            decay: view.rules.decay,
            coin_budget: view.rules.coin_budget,
            thresholds: view.rules.thresholds,
            events: view.events.iter().map(|e| (e.name.clone(), e.description.clone())).collect(),
            meeting_summary: if view.meeting_held {
                view.me.meeting_summary.clone()
            } else {
                None
            },
            last_round: view.last_round.clone(),
            resources: view.me.influence,
            hand: view.me.hand.clone(),
            current_goal: view.me.goal_card().cloned(),
            players,
            svo_info,
            meeting: None,
            pending_offer: None,
            event: None,
        }
    }

    pub fn with_meeting(mut self, transcript: &str) -> PromptContext {
        self.meeting = Some(transcript.to_string());
        self
    }

    pub fn with_offer(mut self, offer: &TradeOffer) -> PromptContext {
        self.pending_offer = Some(offer.clone());
        self
    }

    pub fn with_event(mut self, event: &EventCard) -> PromptContext {
        self.event = Some(event.clone());
        self
    }

    fn shortfall(&self) -> Option<Bundle> {
        self.current_goal.as_ref().map(|g| self.resources.shortfall(&g.cost))
    }

    /// Values for every placeholder the context can fill.
    pub fn slots(&self, svo_block: &str) -> BTreeMap<&'static str, String> {
        let mut s = BTreeMap::new();
        let [p1, p2] = self.role.purchasable();
        let [t1, t2] = self.role.trade_only();
        s.insert("points", self.points.to_string());
        s.insert("coins", self.coins.to_string());
        s.insert("leadership", self.leadership.clone().unwrap_or_else(|| "None".to_string()));
        s.insert("role", self.role.to_string());
        s.insert("speciality", self.role.speciality().prompt_name().to_string());
        s.insert("speciality_price", self.prices.speciality.to_string());
        s.insert("non_speciality_price", self.prices.non_speciality.to_string());
        s.insert("purchasable_1", p1.prompt_name().to_string());
        s.insert("purchasable_2", p2.prompt_name().to_string());
        s.insert("trade_only_1", t1.prompt_name().to_string());
        s.insert("trade_only_2", t2.prompt_name().to_string());
        s.insert("personality", self.personality.clone());
        s.insert("health", self.health.to_string());
        s.insert("round_start_health", self.round_start_health.to_string());
        s.insert("decay", self.decay.to_string());
        s.insert("coin_budget", self.coin_budget.to_string());
        s.insert("hi", self.thresholds.hi.to_string());
        s.insert("lo", self.thresholds.lo.to_string());
        s.insert("event_count", self.events.len().to_string());
        let events = if self.events.is_empty() {
            "none".to_string()
        } else {
            self.events
                .iter()
                .map(|(name, desc)| format!("{name}: {}", sentence(desc)))
                .collect::<Vec<_>>()
                .join("; ")
        };
        s.insert("event_list", events);
        s.insert(
            "meeting_summary",
            self.meeting_summary
                .as_deref()
                .map(sentence)
                .unwrap_or_else(|| "No meeting was held".to_string()),
        );
        s.insert("last_round", describe_last_round(self.last_round.as_ref()));
        s.insert("resources", self.resources.describe());
        s.insert("goals", describe_cards(&self.hand));
        s.insert("hand", describe_cards(&self.hand));
        s.insert(
            "current_goal",
            self.current_goal
                .as_ref()
                .map(|g| g.describe())
                .unwrap_or_else(|| "none".to_string()),
        );
        s.insert(
            "remaining_cost",
            match self.shortfall() {
                Some(b) => b.describe(),
                None => "none (no goal selected)".to_string(),
            },
        );
        s.insert("max_speciality", (self.coins / self.prices.speciality.max(1)).to_string());
        s.insert("max_non_speciality", (self.coins / self.prices.non_speciality.max(1)).to_string());
        let needed = self.shortfall().unwrap_or(Bundle::EMPTY);
        let selected = [t1, t2]
            .into_iter()
            .filter(|k| needed[*k] > 0)
            .max_by_key(|k| (needed[*k], std::cmp::Reverse(k.index())))
            .map(|k| k.prompt_name().to_string())
            .unwrap_or_else(|| format!("{} or {}", t1.prompt_name(), t2.prompt_name()));
        s.insert("selected_resource", selected);
        let lines: Vec<String> = self
            .players
            .iter()
            .enumerate()
            .map(|(i, p)| {
                format!(
                    "{}) Role: {}: Speciality resource: {}. {}{}",
                    i + 1,
                    p.role,
                    p.role.speciality().prompt_name(),
                    p.personality,
                    p.leader_note.as_deref().unwrap_or("")
                )
            })
            .collect();
        s.insert("player_info", lines.join("\n"));
        s.insert("svo_info", if self.svo_info { svo_block.to_string() } else { String::new() });
        if let Some(m) = &self.meeting {
            s.insert("meeting", m.clone());
        }
        if let Some(offer) = &self.pending_offer {
            s.insert("trade_partner", offer.proposer.to_string());
            s.insert("offered", offer.offer.describe());
            s.insert("returned", offer.request.describe());
        }
        if let Some(event) = &self.event {
            s.insert("event_name", event.name.clone());
            s.insert("event_description", event.description.clone());
            let details = match &event.decision {
                Some(d) => {
                    let options: Vec<String> = d
                        .options
                        .iter()
                        .enumerate()
                        .map(|(i, o)| format!("Option {}: {}.", i + 1, sentence(&o.label)))
                        .collect();
                    format!("{}\n{}", d.question, options.join("\n"))
                }
                None => String::new(),
            };
            s.insert("event_details", details);
            s.insert(
                "event_guidelines",
                "Decide which option you would like to choose. Think step-by-step and consider your personality traits. Put the number of the option you choose between the XML tags <EVENT> </EVENT>, for example <EVENT>1</EVENT>. Provide a brief explanation of your decision."
                    .to_string(),
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leadership_lines() {
        use LeadershipVariant::*;
        assert_eq!(
            leadership_line(Vanilla, Role::Pioneer, Role::Pioneer).unwrap(),
            "You are the designated leader of the group; you may disclose this"
        );
        assert_eq!(leadership_line(Vanilla, Role::Pioneer, Role::Curator), None);
        assert_eq!(
            leadership_line(Announce, Role::Pioneer, Role::Curator).unwrap(),
            "Pioneer is the designated leader"
        );
        assert_eq!(
            leadership_line(Announce, Role::Pioneer, Role::Pioneer).unwrap(),
            "Pioneer is the designated leader"
        );
        assert_eq!(leadership_line(Unaware, Role::Pioneer, Role::Pioneer), None);
        assert_eq!(
            leadership_line(Unaware, Role::Pioneer, Role::Curator).unwrap(),
            "Pioneer is the designated leader"
        );
    }
}
