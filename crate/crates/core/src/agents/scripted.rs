//! Deterministic SVO-parameterised players.
//!
//! Health spend and dirty-card appetite are linear in the SVO angle, passing
//! through (−15°, 3 coins, 0.6) and (60°, 7 coins, 0.2).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::decision::{GoalChoice, Proposal};
use super::persona::{svo_category, SvoCategory};
use super::policy::{Exchange, Facilitator, MeetingOutcome, PlayerView, Policy, Reply};
use crate::game::cards::{EffectTarget, KindSelector, ResourceChange};
use crate::game::{AccomplishmentCard, Bundle, EventCard, InfluenceKind, Role, TradeOffer};
use crate::gateway::parse::parse_player_summaries;
use crate::prompts::{self, Phase, PromptContext};

/// Coins a scripted player puts into health this round.
pub fn scripted_health_plan(angle: f64, round_start_health: i64) -> u32 {
    let base = (3.0 + 4.0 * (angle + 15.0) / 75.0).round().clamp(0.0, 10.0) as u32;
    let top_up = if round_start_health < 35 { 2 } else { 0 };
    (base + top_up).min(10)
}

/// Probability that a scripted player claims an affordable dirty card.
pub fn dirty_probability(angle: f64) -> f64 {
    (0.6 - 0.4 * (angle + 15.0) / 75.0).clamp(0.0, 1.0)
}

/// Sample the dirty-card decision.
pub fn scripted_dirty_policy(angle: f64, rng: &mut ChaCha8Rng) -> (f64, bool) {
    let p = dirty_probability(angle);
    let draw: f64 = rng.random();
    (p, draw < p)
}

/// Responder's rule for a trade that gives it `receive` in exchange for `give`.
pub fn scripted_trade_response(angle: f64, receive: &Bundle, give: &Bundle, holdings: &Bundle, goal: Option<&Bundle>) -> bool {
    match svo_category(angle.clamp(-90.0, 90.0)).unwrap_or(SvoCategory::Individualism) {
        SvoCategory::Competitiveness => receive.total() > give.total(),
        SvoCategory::Individualism => receive.total() >= give.total(),
        SvoCategory::Prosocial | SvoCategory::Altruism => match goal {
            None => true,
            Some(cost) => InfluenceKind::ALL.iter().all(|&k| {
                let reserved = holdings[k].min(cost[k]);
                holdings[k].saturating_sub(give[k]) >= reserved
            }),
        },
    }
}

fn missing(card: &AccomplishmentCard, have: &Bundle) -> u32 {
    have.shortfall(&card.cost).total()
}

/// Best card to aim for: clean cards first, then fewest missing units,
/// most points, smallest id.
pub fn best_goal<'a>(hand: &'a [AccomplishmentCard], have: &Bundle) -> Option<&'a AccomplishmentCard> {
    hand.iter()
        .min_by(|a, b| {
            (a.is_dirty(), missing(a, have), std::cmp::Reverse(a.points), &a.id).cmp(&(
                b.is_dirty(),
                missing(b, have),
                std::cmp::Reverse(b.points),
                &b.id,
            ))
        })
}

#[derive(Clone, Debug)]
pub struct ScriptedPolicy {
    pub angle: f64,
}

impl ScriptedPolicy {
    pub fn new(angle: f64) -> ScriptedPolicy {
        ScriptedPolicy { angle }
    }

    fn category(&self) -> SvoCategory {
        svo_category(self.angle.clamp(-90.0, 90.0)).unwrap_or(SvoCategory::Individualism)
    }

    fn own_loss(view: &PlayerView, effect: Option<&crate::game::cards::ResourceEffect>) -> u32 {
        let Some(effect) = effect else { return 0 };
        if let EffectTarget::Role(r) = effect.target {
            if r != view.role {
                return 0;
            }
        }
        let kinds: Vec<InfluenceKind> = match effect.kind {
            KindSelector::All => InfluenceKind::ALL.to_vec(),
            KindSelector::Kind(k) => vec![k],
        };
        kinds
            .into_iter()
            .map(|k| {
                let have = view.me.influence[k];
                match effect.change {
                    ResourceChange::Wipe => have,
                    ResourceChange::Delta(d) if d < 0 => have.min(d.unsigned_abs()),
                    ResourceChange::Delta(_) => 0,
                }
            })
            .sum()
    }

    fn offer_bias(&self) -> i64 {
        match self.category() {
            SvoCategory::Competitiveness => -1,
            SvoCategory::Individualism | SvoCategory::Prosocial => 0,
            SvoCategory::Altruism => 1,
        }
    }
}

impl Policy for ScriptedPolicy {
    fn event_choice(&mut self, view: &PlayerView, event: &EventCard) -> Reply<usize> {
        let Some(decision) = &event.decision else {
            return Reply::new(0, "no decision to make");
        };
        let pro_social = matches!(self.category(), SvoCategory::Prosocial | SvoCategory::Altruism);
        let best = decision
            .options
            .iter()
            .enumerate()
            .min_by_key(|(i, o)| {
                let loss = Self::own_loss(view, o.resource_effect.as_ref());
                if pro_social {
                    (-o.health_delta, loss as i64, *i)
                } else {
                    (loss as i64, -o.health_delta, *i)
                }
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        let why = if pro_social {
            "protect the Port's health"
        } else {
            "protect my own resources"
        };
        Reply::new(best, why)
    }

    fn health_plan(&mut self, view: &PlayerView) -> Reply<u32> {
        let coins = scripted_health_plan(self.angle, view.round_start_health).min(view.me.coins);
        Reply::new(coins, format!("SVO {} health rule", self.angle))
    }

    fn goal_choice(&mut self, view: &PlayerView) -> Reply<GoalChoice> {
        let Some(best) = best_goal(&view.me.hand, &view.me.influence) else {
            return Reply::new(GoalChoice::Same, "no goals in hand");
        };
        if view.me.goal_plan.as_deref() == Some(best.id.as_str()) {
            Reply::new(GoalChoice::Same, "current goal is still the closest")
        } else {
            Reply::new(GoalChoice::Card(best.id.clone()), format!("{} is the closest goal", best.name))
        }
    }

    fn purchases(&mut self, view: &PlayerView) -> Reply<Vec<(InfluenceKind, u32)>> {
        let mut coins = view.me.coins;
        let mut buys: Vec<(InfluenceKind, u32)> = Vec::new();
        if let Some(goal) = view.me.goal_card() {
            let short = view.me.influence.shortfall(&goal.cost);
            let mut wanted: Vec<(u32, InfluenceKind, u32)> = short
                .iter()
                .filter_map(|(k, q)| view.price(k).map(|p| (p, k, q)))
                .collect();
            wanted.sort();
            for (price, kind, qty) in wanted {
                let n = qty.min(coins / price);
                if n > 0 {
                    buys.push((kind, n));
                    coins -= n * price;
                }
            }
        }
        let spec = view.role.speciality();
        if let Some(price) = view.price(spec) {
            let n = coins / price;
            if n > 0 {
                match buys.iter_mut().find(|(k, _)| *k == spec) {
                    Some(entry) => entry.1 += n,
                    None => buys.push((spec, n)),
                }
            }
        }
        Reply::new(buys, "missing goal resources first, then speciality")
    }

    fn trade_offer(&mut self, view: &PlayerView) -> Reply<Option<Proposal>> {
        let Some(goal) = view.me.goal_card() else {
            return Reply::new(None, "no goal");
        };
        let short = view.me.influence.shortfall(&goal.cost);
        let want = view
            .role
            .trade_only()
            .into_iter()
            .filter(|k| short[*k] > 0)
            .max_by_key(|k| (short[*k], std::cmp::Reverse(k.index())));
        let Some(want) = want else {
            return Reply::new(None, "nothing to trade for");
        };
        let spec = view.role.speciality();
        let spare = view.me.influence[spec].saturating_sub(goal.cost[spec]);
        if spare == 0 {
            return Reply::new(None, "nothing spare to offer");
        }
        let qty = short[want];
        let desired = (qty as i64 + self.offer_bias()).max(1) as u32;
        let proposal = Proposal {
            offer: Bundle::single(spec, desired.min(spare)),
            request: Bundle::single(want, qty),
            to: None,
        };
        Reply::new(Some(proposal), format!("need {qty} {want}"))
    }

    fn trade_response(&mut self, view: &PlayerView, offer: &TradeOffer) -> Reply<bool> {
        let goal = view.me.goal_card().map(|c| c.cost);
        let yes = scripted_trade_response(self.angle, &offer.offer, &offer.request, &view.me.influence, goal.as_ref());
        Reply::new(yes, "SVO trade rule")
    }

    fn completions(&mut self, view: &PlayerView, rng: &mut ChaCha8Rng) -> Reply<Vec<String>> {
        let mut order: Vec<&AccomplishmentCard> = view.me.hand.iter().collect();
        let goal = view.me.goal_plan.as_deref();
        order.sort_by(|a, b| {
            (Some(b.id.as_str()) == goal, b.points, &a.id).cmp(&(Some(a.id.as_str()) == goal, a.points, &b.id))
        });
        let mut have = view.me.influence;
        let mut picks = Vec::new();
        let mut notes = Vec::new();
        for card in order {
            if !have.covers(&card.cost) {
                continue;
            }
            if card.is_dirty() {
                let (p, claim) = scripted_dirty_policy(self.angle, rng);
                notes.push(format!("{} p={p:.2} claim={claim}", card.id));
                if !claim {
                    continue;
                }
            }
            have = have.checked_sub(&card.cost).expect("covered");
            picks.push(card.id.clone());
        }
        Reply::new(picks, notes.join("; "))
    }

    fn discard(&mut self, view: &PlayerView) -> Reply<Option<String>> {
        let goal = view.me.goal_plan.as_deref();
        let pick = view
            .me
            .hand
            .iter()
            .filter(|c| !c.is_dirty() && Some(c.id.as_str()) != goal)
            .filter(|c| missing(c, &view.me.influence) >= 3)
            .max_by(|a, b| {
                (missing(a, &view.me.influence), std::cmp::Reverse(a.points), std::cmp::Reverse(&a.id)).cmp(&(
                    missing(b, &view.me.influence),
                    std::cmp::Reverse(b.points),
                    std::cmp::Reverse(&b.id),
                ))
            });
        match pick {
            Some(card) => Reply::new(Some(card.id.clone()), format!("{} is far from affordable", card.name)),
            None => Reply::new(None, "all goals are within reach"),
        }
    }

    fn meeting_utterance(&mut self, view: &PlayerView) -> Option<String> {
        let health = scripted_health_plan(self.angle, view.round_start_health);
        let goal = best_goal(&view.me.hand, &view.me.influence)
            .map(|c| c.name.clone())
            .unwrap_or_else(|| "no particular goal".to_string());
        Some(format!(
            "I plan to spend {health} coins on the Port's health this round and work towards {goal}."
        ))
    }
}

/// Meeting stand-in for scripted games: each player's utterance becomes one
/// line of the discussion and that player's summary.
#[derive(Clone, Debug, Default)]
pub struct ScriptedFacilitator;

impl Facilitator for ScriptedFacilitator {
    fn meeting(&mut self, views: &[PlayerView], policies: &mut [Box<dyn Policy>]) -> MeetingOutcome {
        let lines: Vec<(Role, String)> = views
            .iter()
            .zip(policies.iter_mut())
            .map(|(v, p)| {
                let said = p.meeting_utterance(v).unwrap_or_else(|| "I have nothing to add.".to_string());
                (v.role, said)
            })
            .collect();
        let transcript: String = lines
            .iter()
            .map(|(r, s)| format!("**{r}:** {s}"))
            .collect::<Vec<_>>()
            .join("\n");
        let ctx = PromptContext::from_view(&views[0]);
        let discussion_prompt = prompts::render_phase(Phase::Discussion, &ctx).unwrap_or_default();
        let ctx = ctx.with_meeting(&transcript);
        let summary_prompt = prompts::render_phase(Phase::Summary, &ctx).unwrap_or_default();
        let tagged: String = lines
            .iter()
            .map(|(r, s)| format!("<{r}> {s} </{r}>"))
            .collect::<Vec<_>>()
            .join("\n");
        let (summaries, fallback) = match parse_player_summaries(&tagged) {
            Ok(s) => (s, false),
            Err(_) => (std::array::from_fn(|_| "No summary available.".to_string()), true),
        };
        MeetingOutcome {
            discussion: Reply {
                value: transcript.clone(),
                rationale: String::new(),
                exchanges: vec![Exchange {
                    prompt: discussion_prompt,
                    response: transcript,
                }],
                fallback: false,
            },
            summaries: Reply {
                value: summaries,
                rationale: String::new(),
                exchanges: vec![Exchange {
                    prompt: summary_prompt,
                    response: tagged,
                }],
                fallback,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn health_anchors() {
        assert_eq!(scripted_health_plan(-15.0, 70), 3);
        assert_eq!(scripted_health_plan(60.0, 70), 7);
        assert_eq!(scripted_health_plan(30.0, 70), 5);
        assert_eq!(scripted_health_plan(0.0, 70), 4);
        assert_eq!(scripted_health_plan(-15.0, 34), 5);
        assert_eq!(scripted_health_plan(-90.0, 70), 0);
        assert_eq!(scripted_health_plan(90.0, 10), 10);
    }

    #[test]
    fn dirty_anchors() {
        assert!((dirty_probability(-15.0) - 0.6).abs() < 1e-12);
        assert!((dirty_probability(60.0) - 0.2).abs() < 1e-12);
        assert!((dirty_probability(22.5) - 0.4).abs() < 1e-12);
        assert_eq!(dirty_probability(-90.0), 1.0);
    }

    #[test]
    fn trade_response_rules() {
        let one_fin = Bundle::single(InfluenceKind::Finance, 1);
        let one_leg = Bundle::single(InfluenceKind::Legacy, 1);
        let two_fin = Bundle::single(InfluenceKind::Finance, 2);
        let stock = Bundle::new([0, 3, 0, 0, 0]);
        assert!(!scripted_trade_response(-15.0, &one_fin, &one_leg, &stock, None));
        assert!(scripted_trade_response(-15.0, &two_fin, &one_leg, &stock, None));
        assert!(scripted_trade_response(0.0, &one_fin, &one_leg, &stock, None));
        // altruist keeps stock reserved for its goal
        let goal = Bundle::new([0, 3, 0, 0, 0]);
        assert!(!scripted_trade_response(60.0, &two_fin, &one_leg, &stock, Some(&goal)));
        let goal = Bundle::new([0, 2, 0, 0, 0]);
        assert!(scripted_trade_response(60.0, &two_fin, &one_leg, &stock, Some(&goal)));
    }
}
