use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::agents::persona::{format_angle, validate_group};
use crate::agents::{CulturalGroup, LeadershipVariant, Persona};
use crate::game::GameConfig;
use crate::schema::{self, LoadError};

/// Which agents make the decisions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Llm,
    Scripted,
    /// The LLM code path against canned offline replies.
    Mock,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Llm => "llm",
            Backend::Scripted => "scripted",
            Backend::Mock => "mock",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Backend, ExperimentError> {
        match s.to_ascii_lowercase().as_str() {
            "llm" => Ok(Backend::Llm),
            "scripted" => Ok(Backend::Scripted),
            "mock" => Ok(Backend::Mock),
            _ => Err(ExperimentError::Invalid(format!("unknown backend `{s}` (llm, scripted, mock)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum RosterSpec {
    /// These five personas, shuffled onto roles each run.
    Fixed { personas: Vec<Persona> },
    /// `size` draws with replacement from `pool` each run.
    Sample { pool: Vec<Persona>, size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadershipSpec {
    pub variant: LeadershipVariant,
    /// Persona id of the leader.
    pub leader: String,
}

fn yes() -> bool {
    true
}

fn one() -> u32 {
    1
}

fn default_temperature() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub roster: RosterSpec,
    #[serde(default = "yes")]
    pub communication: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leadership: Option<LeadershipSpec>,
    #[serde(default = "one")]
    pub repetitions: u32,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default)]
    pub game: GameConfig,
}

pub const MAIN_ANGLES: [f64; 5] = [-15.0, 0.0, 15.0, 30.0, 60.0];
pub const LOW_ANGLES: [f64; 5] = [-30.0, -15.0, 0.0, 15.0, 60.0];

fn svo_group(angles: &[f64]) -> RosterSpec {
    RosterSpec::Fixed {
        personas: angles.iter().map(|a| Persona::svo(*a)).collect(),
    }
}

fn angle_slug(angle: f64) -> String {
    if angle < 0.0 {
        format!("neg{}", format_angle(-angle))
    } else {
        format_angle(angle)
    }
}

fn base(name: &str, roster: RosterSpec, repetitions: u32) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        roster,
        communication: true,
        leadership: None,
        repetitions,
        base_seed: 0,
        backend: Backend::Llm,
        model: None,
        temperature: 1.0,
        game: GameConfig::default(),
    }
}

/// Names accepted by [`preset`].
pub fn preset_names() -> Vec<String> {
    let mut names: Vec<String> = ["svo-main", "svo-no-meeting", "svo-low"].iter().map(|s| s.to_string()).collect();
    for v in LeadershipVariant::ALL {
        for a in MAIN_ANGLES {
            names.push(format!("leadership-{}-{}", v.name(), angle_slug(a)));
        }
    }
    names.extend(
        ["forward-continuity-selfish", "forward-continuity-cooperative", "pattern-correspondence"]
            .iter()
            .map(|s| s.to_string()),
    );
    names
}

pub fn preset(name: &str) -> Result<ExperimentConfig, ExperimentError> {
    let cfg = match name {
        "svo-main" => base(name, svo_group(&MAIN_ANGLES), 50),
        "svo-no-meeting" => ExperimentConfig {
            communication: false,
            ..base(name, svo_group(&MAIN_ANGLES), 50)
        },
        "svo-low" => base(name, svo_group(&LOW_ANGLES), 50),
        "forward-continuity-selfish" => base(
            name,
            RosterSpec::Fixed {
                personas: vec![Persona::selfish(); 5],
            },
            30,
        ),
        "forward-continuity-cooperative" => base(
            name,
            RosterSpec::Fixed {
                personas: vec![Persona::cooperative(); 5],
            },
            30,
        ),
        "pattern-correspondence" => base(
            name,
            RosterSpec::Sample {
                pool: CulturalGroup::ALL.iter().map(|g| Persona::cultural(*g)).collect(),
                size: 5,
            },
            30,
        ),
        _ => {
            let rest = name
                .strip_prefix("leadership-")
                .ok_or_else(|| ExperimentError::UnknownPreset(name.to_string()))?;
            let (variant, angle) = rest
                .split_once('-')
                .ok_or_else(|| ExperimentError::UnknownPreset(name.to_string()))?;
            let variant =
                LeadershipVariant::parse(variant).ok_or_else(|| ExperimentError::UnknownPreset(name.to_string()))?;
            let angle = MAIN_ANGLES
                .iter()
                .copied()
                .find(|a| angle_slug(*a) == angle)
                .ok_or_else(|| ExperimentError::UnknownPreset(name.to_string()))?;
            ExperimentConfig {
                leadership: Some(LeadershipSpec {
                    variant,
                    leader: Persona::svo(angle).id,
                }),
                ..base(name, svo_group(&MAIN_ANGLES), 50)
            }
        }
    };
    Ok(cfg)
}

impl ExperimentConfig {
    /// Read an experiment file; deck paths in `game` resolve relative to it.
    pub fn load(path: &Path) -> Result<ExperimentConfig, LoadError> {
        let mut cfg: ExperimentConfig = schema::load_json(path)?;
        cfg.game.resolve_files(path.parent().unwrap_or(Path::new(".")))?;
        cfg.validate().map_err(|e| LoadError::Invalid {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Invalid(m));
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("experiment name `{}` must be non-empty without path separators", self.name));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".to_string());
        }
        self.game.validate().map_err(|e| ExperimentError::Invalid(e.to_string()))?;
        match &self.roster {
            RosterSpec::Fixed { personas } => {
                if personas.len() != 5 {
                    return bad(format!("roster needs 5 personas, got {}", personas.len()));
                }
                validate_group(personas).map_err(|e| ExperimentError::Invalid(e.to_string()))?;
                if personas.iter().any(|p| p.leader) && self.leadership.is_some() {
                    return bad("leader set both on a persona and in `leadership`".to_string());
                }
                if let Some(l) = &self.leadership {
                    let n = personas.iter().filter(|p| p.id == l.leader).count();
                    if n != 1 {
                        return bad(format!("leader `{}` matches {n} personas, need exactly 1", l.leader));
                    }
                }
            }
            RosterSpec::Sample { pool, size } => {
                if *size != 5 {
                    return bad(format!("sampled roster needs size 5, got {size}"));
                }
                if pool.is_empty() {
                    return bad("sampling pool is empty".to_string());
                }
                if self.leadership.is_some() || pool.iter().any(|p| p.leader) {
                    return bad("leadership is not supported with a sampled roster".to_string());
                }
                validate_group(pool).map_err(|e| ExperimentError::Invalid(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> std::ops::Range<u64> {
        self.base_seed..self.base_seed + self.repetitions as u64
    }

    /// The five personas for one run, leader marked, before role assignment.
    pub fn personas(&self, rng: &mut ChaCha8Rng) -> Vec<Persona> {
        let mut personas = match &self.roster {
            RosterSpec::Fixed { personas } => personas.clone(),
            RosterSpec::Sample { pool, size } => (0..*size).map(|_| pool[rng.random_range(0..pool.len())].clone()).collect(),
        };
        if let Some(l) = &self.leadership {
            if let Some(p) = personas.iter_mut().find(|p| p.id == l.leader) {
                *p = p.clone().with_leader(l.variant);
            }
        }
        personas
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_resolves_and_validates() {
        let names = preset_names();
        assert_eq!(names.len(), 3 + 15 + 3);
        for n in names {
            let cfg = preset(&n).unwrap();
            assert_eq!(cfg.name, n);
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn unknown_presets() {
        for n in ["", "svo", "leadership-announce-45", "leadership-boss-0", "leadership-announce"] {
            assert!(matches!(preset(n), Err(ExperimentError::UnknownPreset(_))), "{n}");
        }
    }

    #[test]
    fn backend_names_round_trip() {
        for b in [Backend::Llm, Backend::Scripted, Backend::Mock] {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("gpt".parse::<Backend>().is_err());
    }

    #[test]
    fn config_file_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"name": "x", "roster": {"mode": "fixed", "personas": [
                {"id": "a", "kind": "svo", "angle": 0}, {"id": "b", "kind": "svo", "angle": 10},
                {"id": "c", "kind": "svo", "angle": 20}, {"id": "d", "kind": "svo", "angle": 30},
                {"id": "e", "kind": "svo", "angle": 40}]}}"#,
        )
        .unwrap();
        assert!(cfg.communication);
        assert_eq!(cfg.repetitions, 1);
        assert_eq!(cfg.backend, Backend::Llm);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = preset("svo-main").unwrap();
        cfg.repetitions = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = preset("svo-main").unwrap();
        cfg.leadership = Some(LeadershipSpec {
            variant: LeadershipVariant::Vanilla,
            leader: "svo45".into(),
        });
        assert!(cfg.validate().is_err());
        let mut cfg = preset("svo-main").unwrap();
        cfg.name = "a/b".into();
        assert!(cfg.validate().is_err());
    }
}
