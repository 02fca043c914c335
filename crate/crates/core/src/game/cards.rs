use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::economy::{Bundle, InfluenceKind, Role};
use super::error::GameError;

/// Which players an event's resource effect touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectTarget {
    All,
    Role(Role),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSelector {
    All,
    Kind(InfluenceKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceChange {
    /// Add (or remove, when negative) this many units; counts clamp at zero.
    Delta(i32),
    /// Set the selected counts to zero.
    Wipe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEffect {
    pub target: EffectTarget,
    pub kind: KindSelector,
    pub change: ResourceChange,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventOption {
    pub label: String,
    #[serde(default)]
    pub health_delta: i64,
    #[serde(default)]
    pub resource_effect: Option<ResourceEffect>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDecision {
    pub question: String,
    pub options: Vec<EventOption>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventCard {
    pub id: String,
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub health_delta: i64,
    #[serde(default)]
    pub resource_effect: Option<ResourceEffect>,
    #[serde(default)]
    pub blocks_communication: bool,
    #[serde(default)]
    pub decision: Option<EventDecision>,
}

impl EventCard {
    pub fn validate(&self) -> Result<(), GameError> {
        if let Some(d) = &self.decision {
            if d.options.len() < 2 {
                return Err(GameError::InvalidDeck(format!(
                    "event {}: a decision needs at least 2 options",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// A goal card. Dirty cards carry a health penalty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccomplishmentCard {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub cost: Bundle,
    pub points: u32,
    #[serde(default)]
    pub health_penalty: u32,
}

impl AccomplishmentCard {
    pub fn is_dirty(&self) -> bool {
        self.health_penalty > 0
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |why: &str| Err(GameError::InvalidDeck(format!("card {}: {why}", self.id)));
        if self.points < 1 {
            return bad("points must be at least 1");
        }
        if self.cost.total() > 5 {
            return bad("total cost must be at most 5");
        }
        if self.cost.is_empty() && !self.is_dirty() {
            return bad("a card with no cost must carry a health penalty");
        }
        Ok(())
    }

    /// Prompt description, e.g. "Scientific Breakthrough (requires 2 Science and
    /// 1 Legacy, rewards 4 points)".
    pub fn describe(&self) -> String {
        let cost = if self.cost.is_empty() {
            "requires no resources".to_string()
        } else {
            let parts: Vec<String> = self
                .cost
                .iter()
                .map(|(k, q)| format!("{q} {}", k.prompt_name()))
                .collect();
            format!("requires {}", join_and(&parts))
        };
        if self.is_dirty() {
            format!(
                "{} ({cost}, damages the Port's health by {}, rewards {} points)",
                self.name, self.health_penalty, self.points
            )
        } else {
            format!("{} ({cost}, rewards {} points)", self.name, self.points)
        }
    }
}

fn join_and(parts: &[String]) -> String {
    match parts.len() {
        0 => String::new(),
        1 => parts[0].clone(),
        n => format!("{} and {}", parts[..n - 1].join(", "), parts[n - 1]),
    }
}

pub fn validate_event_deck(deck: &[EventCard]) -> Result<(), GameError> {
    let mut ids = BTreeSet::new();
    for e in deck {
        e.validate()?;
        if !ids.insert(e.id.as_str()) {
            return Err(GameError::InvalidDeck(format!("duplicate event id {}", e.id)));
        }
    }
    Ok(())
}

pub fn validate_pile(pile: &[AccomplishmentCard]) -> Result<(), GameError> {
    let mut ids = BTreeSet::new();
    for c in pile {
        c.validate()?;
        if !ids.insert(c.id.as_str()) {
            return Err(GameError::InvalidDeck(format!("duplicate card id {}", c.id)));
        }
    }
    Ok(())
}

fn health_event(id: &str, name: &str, description: &str, delta: i64) -> EventCard {
    EventCard {
        id: id.to_string(),
        name: name.to_string(),
        description: description.to_string(),
        health_delta: delta,
        resource_effect: None,
        blocks_communication: false,
        decision: None,
    }
}

/// The stock twelve-card event deck.
pub fn default_event_deck() -> Vec<EventCard> {
    vec![
        health_event("dust-storm", "Dust Storm", "a dust storm scours the habitat domes and the Port's health falls by 10.", -10),
        health_event("solar-flare", "Solar Flare", "a solar flare overloads the shielding and the Port's health falls by 15.", -15),
        health_event("crop-failure", "Crop Failure", "a blight destroys the greenhouse crops and the Port's health falls by 8.", -8),
        health_event("hull-breach", "Hull Breach", "a micrometeorite punctures a pressure hull and the Port's health falls by 12.", -12),
        health_event("water-leak", "Water Recycler Leak", "the water recycler leaks and the Port's health falls by 5.", -5),
        health_event("power-surge", "Power Surge", "a surge burns out part of the power grid and the Port's health falls by 7.", -7),
        health_event("marsquake", "Marsquake", "a marsquake cracks the foundations and the Port's health falls by 13.", -13),
        health_event("air-filter", "Air Filter Failure", "the air filters clog and the Port's health falls by 6.", -6),
        health_event(
            "supply-drop",
            "Supply Drop",
            "a supply rocket from Earth lands safely and the Port's health rises by 5.",
            5,
        ),
        EventCard {
            id: "lost-cargo".to_string(),
            name: "Lost Cargo".to_string(),
            description: "a storage module depressurises and every player loses all of their resources.".to_string(),
            health_delta: 0,
            resource_effect: Some(ResourceEffect {
                target: EffectTarget::All,
                kind: KindSelector::All,
                change: ResourceChange::Wipe,
            }),
            blocks_communication: false,
            decision: None,
        },
        EventCard {
            id: "comms-blackout".to_string(),
            name: "Communications Blackout".to_string(),
            description: "the relay antenna fails and no team meeting can be held this round.".to_string(),
            health_delta: 0,
            resource_effect: None,
            blocks_communication: true,
            decision: None,
        },
        EventCard {
            id: "reactor-fault".to_string(),
            name: "Reactor Fault".to_string(),
            description: "the reactor develops a coolant fault and the team must decide how to respond.".to_string(),
            health_delta: 0,
            resource_effect: None,
            blocks_communication: false,
            decision: Some(EventDecision {
                question: "Should the team strip its stockpiles to repair the reactor, or let the fault run?".to_string(),
                options: vec![
                    EventOption {
                        label: "Repair the reactor: the Port's health falls by 4 and every player loses 1 of each resource".to_string(),
                        health_delta: -4,
                        resource_effect: Some(ResourceEffect {
                            target: EffectTarget::All,
                            kind: KindSelector::All,
                            change: ResourceChange::Delta(-1),
                        }),
                    },
                    EventOption {
                        label: "Let the fault run: the Port's health falls by 12".to_string(),
                        health_delta: -12,
                        resource_effect: None,
                    },
                ],
            }),
        },
    ]
}

const CLEAN_NAMES: [[&str; 6]; 5] = [
    [
        "Cultural Renaissance",
        "Community Outreach",
        "The Drone Show",
        "Cultural Festival",
        "Martian Museum",
        "Ministry of Culture",
    ],
    [
        "Founders Monument",
        "Heritage Archive",
        "Colony Charter",
        "Memorial Garden",
        "Time Capsule",
        "Education Initiative",
    ],
    [
        "Scientific Breakthrough",
        "Scientific Advancement",
        "Scientific Research Lab",
        "Terraforming Study",
        "Ice Core Survey",
        "Hydroponics Upgrade",
    ],
    [
        "Public Speaking Tour",
        "Council Reform",
        "Port Constitution",
        "Mediation Board",
        "Resource Optimization",
        "Election Commission",
    ],
    [
        "Financial District Expansion",
        "Economic Reform Plan",
        "Trade Exchange",
        "Mining Venture",
        "Colony Bank",
        "Supply Contract",
    ],
];

const DIRTY_NAMES: [&str; 6] = [
    "Controversial Experiment",
    "Strategic Compromise",
    "Dangerous Experiment",
    "Ambitious Sculpture",
    "Unsafe Mining Shortcut",
    "Reactor Overclock",
];

/// Build one role's accomplishment pile (unshuffled order is already random).
///
/// Clean cards cost 2 to 4 units over the role's speciality and purchasable
/// kinds plus at least one trade-only kind and are worth 3 to 5 points. About
/// `dirty_fraction` of the pile (one in five by default) is dirty: cost 0 or 1, penalty 10 to 13, worth 5 or 6.
pub fn generate_pile<R: Rng + ?Sized>(
    role: Role,
    size: usize,
    dirty_fraction: f64,
    rng: &mut R,
) -> Vec<AccomplishmentCard> {
    let dirty_count = (size as f64 * dirty_fraction.clamp(0.0, 1.0)).round() as usize;
    let mut dirty_flags: Vec<bool> = (0..size).map(|i| i < dirty_count).collect();
    dirty_flags.shuffle(rng);

    let reachable: Vec<InfluenceKind> = std::iter::once(role.speciality())
        .chain(role.purchasable())
        .collect();
    let trade_only = role.trade_only();
    let mut name_uses = std::collections::BTreeMap::<&str, usize>::new();

    dirty_flags
        .into_iter()
        .enumerate()
        .map(|(i, dirty)| {
            let base = if dirty {
                DIRTY_NAMES[rng.random_range(0..DIRTY_NAMES.len())]
            } else {
                let pool = &CLEAN_NAMES[role.speciality().index()];
                pool[rng.random_range(0..pool.len())]
            };
            let n = name_uses.entry(base).or_insert(0);
            *n += 1;
            let name = if *n == 1 {
                base.to_string()
            } else {
                format!("{base} {}", roman(*n))
            };
            let id = format!("{}-{:02}", role.name().to_ascii_lowercase(), i + 1);
            if dirty {
                let mut cost = Bundle::EMPTY;
                if rng.random_bool(0.5) {
                    cost[reachable[rng.random_range(0..reachable.len())]] += 1;
                }
                AccomplishmentCard {
                    id,
                    name,
                    cost,
                    points: rng.random_range(5..=6),
                    health_penalty: rng.random_range(10..=13),
                }
            } else {
                let total = rng.random_range(2..=4u32);
                let mut cost = Bundle::EMPTY;
                cost[trade_only[rng.random_range(0..2)]] += 1;
                for _ in 1..total {
                    let pick = if rng.random_bool(0.25) {
                        trade_only[rng.random_range(0..2)]
                    } else {
                        reachable[rng.random_range(0..reachable.len())]
                    };
                    cost[pick] += 1;
                }
                AccomplishmentCard {
                    id,
                    name,
                    cost,
                    points: rng.random_range(3..=5),
                    health_penalty: 0,
                }
            }
        })
        .collect()
}

fn roman(n: usize) -> &'static str {
    const NUMERALS: [&str; 12] = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII"];
    NUMERALS.get(n - 1).copied().unwrap_or("X+")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_deck_has_the_advertised_mix() {
        let deck = default_event_deck();
        assert_eq!(deck.len(), 12);
        validate_event_deck(&deck).unwrap();
        let pure: Vec<_> = deck
            .iter()
            .filter(|e| e.resource_effect.is_none() && e.decision.is_none() && !e.blocks_communication)
            .collect();
        let harmful = pure.iter().filter(|e| (-15..=-5).contains(&e.health_delta)).count();
        assert_eq!(harmful, 8);
        assert_eq!(pure.iter().filter(|e| e.health_delta == 5).count(), 1);
        assert_eq!(deck.iter().filter(|e| e.blocks_communication).count(), 1);
        assert_eq!(deck.iter().filter(|e| e.decision.is_some()).count(), 1);
        assert_eq!(
            deck.iter()
                .filter(|e| matches!(e.resource_effect, Some(ResourceEffect { change: ResourceChange::Wipe, .. })))
                .count(),
            1
        );
    }

    #[test]
    fn generated_piles_respect_card_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for role in Role::ALL {
            let pile = generate_pile(role, 30, 0.2, &mut rng);
            validate_pile(&pile).unwrap();
            let dirty: Vec<_> = pile.iter().filter(|c| c.is_dirty()).collect();
            assert_eq!(dirty.len(), 6);
            for c in &dirty {
                assert!(c.cost.total() <= 1);
                assert!((10..=13).contains(&c.health_penalty));
                assert!((5..=6).contains(&c.points));
            }
            for c in pile.iter().filter(|c| !c.is_dirty()) {
                assert!((2..=4).contains(&c.cost.total()));
                assert!((3..=5).contains(&c.points));
                assert!(role.trade_only().iter().any(|k| c.cost[*k] > 0));
            }
            let names: BTreeSet<_> = pile.iter().map(|c| c.name.as_str()).collect();
            assert_eq!(names.len(), pile.len(), "names unique within a pile");
        }
    }

    #[test]
    fn card_description_matches_prompt_style() {
        let card = AccomplishmentCard {
            id: "x".into(),
            name: "Scientific Breakthrough".into(),
            cost: Bundle::from_pairs([(InfluenceKind::Science, 2), (InfluenceKind::Legacy, 1)]),
            points: 4,
            health_penalty: 0,
        };
        assert_eq!(
            card.describe(),
            "Scientific Breakthrough (requires 1 Legacy and 2 Science, rewards 4 points)"
        );
        let dirty = AccomplishmentCard {
            id: "y".into(),
            name: "Controversial Experiment".into(),
            cost: Bundle::EMPTY,
            points: 6,
            health_penalty: 12,
        };
        assert_eq!(
            dirty.describe(),
            "Controversial Experiment (requires no resources, damages the Port's health by 12, rewards 6 points)"
        );
    }

    #[test]
    fn invalid_cards_are_rejected() {
        let free_clean = AccomplishmentCard {
            id: "a".into(),
            name: "Free Lunch".into(),
            cost: Bundle::EMPTY,
            points: 3,
            health_penalty: 0,
        };
        assert!(free_clean.validate().is_err());
        let decision = EventCard {
            decision: Some(EventDecision {
                question: "?".into(),
                options: vec![EventOption {
                    label: "only".into(),
                    health_delta: 0,
                    resource_effect: None,
                }],
            }),
            ..default_event_deck()[0].clone()
        };
        assert!(decision.validate().is_err());
    }
}
