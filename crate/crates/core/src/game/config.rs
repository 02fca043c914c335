use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::cards::{validate_event_deck, validate_pile, AccomplishmentCard, EventCard};
use super::economy::{Prices, Role};
use super::error::GameError;
use crate::schema::{self, LoadError};

/// Event-count thresholds: above `hi` one event, `lo..=hi` two, below `lo` three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub hi: i64,
    pub lo: i64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { hi: 65, lo: 35 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Every player tied on the maximum wins.
    #[default]
    SharedWin,
    /// A tie on the maximum leaves the game without a winner.
    NoWinner,
}

/// Source of the per-player accomplishment piles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum AccomplishmentSource {
    /// Piles produced by the built-in generator from the game seed.
    Generated { pile_size: usize, dirty_fraction: f64 },
    /// Fixed piles per role, shuffled by the game seed.
    Explicit { piles: BTreeMap<Role, Vec<AccomplishmentCard>> },
}

impl Default for AccomplishmentSource {
    fn default() -> Self {
        AccomplishmentSource::Generated {
            pile_size: 30,
            dirty_fraction: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    pub rounds: u32,
    pub initial_health: i64,
    pub decay: i64,
    pub hand_size: usize,
    pub thresholds: Thresholds,
    pub coin_budget: u32,
    pub speciality_price: u32,
    pub non_speciality_price: u32,
    pub events_enabled: bool,
    /// `None` selects the stock deck.
    pub event_deck: Option<Vec<EventCard>>,
    pub accomplishments: AccomplishmentSource,
    pub tie_policy: TiePolicy,
    /// Path to a JSON event deck, resolved relative to the config file on load.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_deck_file: Option<PathBuf>,
    /// Path to a JSON map of role to accomplishment pile, resolved on load.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accomplishment_deck_file: Option<PathBuf>,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            rounds: 9,
            initial_health: 100,
            decay: 25,
            hand_size: 3,
            thresholds: Thresholds::default(),
            coin_budget: 10,
            speciality_price: 2,
            non_speciality_price: 3,
            events_enabled: true,
            event_deck: None,
            accomplishments: AccomplishmentSource::default(),
            tie_policy: TiePolicy::SharedWin,
            event_deck_file: None,
            accomplishment_deck_file: None,
        }
    }
}

impl GameConfig {
    pub fn prices(&self) -> Prices {
        Prices {
            speciality: self.speciality_price,
            non_speciality: self.non_speciality_price,
        }
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |m: &str| Err(GameError::InvalidConfig(m.to_string()));
        if self.rounds == 0 {
            return bad("rounds must be at least 1");
        }
        if self.decay <= 0 {
            return bad("decay must be positive");
        }
        let t = self.thresholds;
        if !(t.lo < t.hi && t.hi < self.initial_health) {
            return bad("thresholds must satisfy lo < hi < initial_health");
        }
        if self.speciality_price == 0 || self.non_speciality_price == 0 {
            return bad("prices must be positive");
        }
        if let Some(deck) = &self.event_deck {
            validate_event_deck(deck)?;
            if self.events_enabled && deck.is_empty() {
                return bad("event deck is empty while events are enabled");
            }
        }
        match &self.accomplishments {
            AccomplishmentSource::Generated {
                pile_size,
                dirty_fraction,
            } => {
                if *pile_size < self.hand_size {
                    return bad("pile_size is smaller than hand_size");
                }
                if !(0.0..=1.0).contains(dirty_fraction) {
                    return bad("dirty_fraction must be within [0, 1]");
                }
            }
            AccomplishmentSource::Explicit { piles } => {
                for pile in piles.values() {
                    validate_pile(pile)?;
                }
            }
        }
        Ok(())
    }

    /// Load a config file, inlining referenced deck files and validating.
    pub fn load(path: &Path) -> Result<GameConfig, LoadError> {
        let mut cfg: GameConfig = schema::load_json(path)?;
        cfg.resolve_files(path.parent().unwrap_or(Path::new(".")))?;
        cfg.validate().map_err(|e| LoadError::Invalid {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    /// Replace deck file references with their contents.
    pub fn resolve_files(&mut self, base: &Path) -> Result<(), LoadError> {
        if let Some(rel) = self.event_deck_file.take() {
            let deck: Vec<EventCard> = schema::load_json(&base.join(rel))?;
            self.event_deck = Some(deck);
        }
        if let Some(rel) = self.accomplishment_deck_file.take() {
            let piles: BTreeMap<Role, Vec<AccomplishmentCard>> = schema::load_json(&base.join(rel))?;
            self.accomplishments = AccomplishmentSource::Explicit { piles };
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = GameConfig::default();
        assert_eq!((c.rounds, c.initial_health, c.decay, c.hand_size), (9, 100, 25, 3));
        assert_eq!(c.thresholds, Thresholds { hi: 65, lo: 35 });
        assert_eq!(c.coin_budget, 10);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_thresholds_and_decay() {
        let mut c = GameConfig::default();
        c.thresholds = Thresholds { hi: 30, lo: 35 };
        assert!(c.validate().is_err());
        let mut c = GameConfig::default();
        c.decay = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: GameConfig = serde_json::from_str(r#"{"rounds": 4, "events_enabled": false}"#).unwrap();
        assert_eq!(c.rounds, 4);
        assert!(!c.events_enabled);
        assert_eq!(c.decay, 25);
    }

    #[test]
    fn load_inlines_deck_files() {
        let dir = tempfile::tempdir().unwrap();
        let deck = serde_json::to_string(&super::super::cards::default_event_deck()[..2]).unwrap();
        std::fs::write(dir.path().join("events.json"), deck).unwrap();
        std::fs::write(dir.path().join("game.json"), r#"{"event_deck_file": "events.json"}"#).unwrap();
        let c = GameConfig::load(&dir.path().join("game.json")).unwrap();
        assert_eq!(c.event_deck.as_ref().map(|d| d.len()), Some(2));
        assert!(c.event_deck_file.is_none());
    }

    #[test]
    fn load_reports_field_errors() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("game.json"), "{\n \"thresholds\": {\"hi\": 65, \"lo\": \"x\"}\n}").unwrap();
        let err = GameConfig::load(&dir.path().join("game.json")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("thresholds.lo"), "{msg}");
        assert!(msg.contains(":2:"), "{msg}");
    }
}
