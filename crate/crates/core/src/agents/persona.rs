use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::schema::{self, LoadError};

pub const SVO_PREAMBLE: &str = "Your personality is defined by your Social Value Orientation (SVO).
SVO is a psychological concept that describes how individuals value their own outcomes relative to the outcomes of others.
Your SVO is measured as an angle, where the angle represents the ratio of the value you place on your own outcomes relative to the outcomes of others.
SVO angles can be classified into four categories:
- Altruism (SVO angle > 57.15 degrees)
- Prosocial (SVO angle between 22.45 and 57.15 degrees)
- Individualism (SVO angle between -12.04 and 22.45 degrees)
- Competitiveness (SVO angle < -12.04 degrees)";

pub const SELFISH_TRAITS: [&str; 4] = ["Self-Centred", "Selfish", "Uncooperative", "Machiavellian"];
pub const COOPERATIVE_TRAITS: [&str; 5] = ["Altruistic", "Cooperative", "Empathetic", "Generous", "Selfless"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CulturalGroup {
    HI,
    HC,
    EI,
    EC,
}

impl CulturalGroup {
    pub const ALL: [CulturalGroup; 4] = [CulturalGroup::HI, CulturalGroup::HC, CulturalGroup::EI, CulturalGroup::EC];

    pub fn name(self) -> &'static str {
        match self {
            CulturalGroup::HI => "Hierarchical Individualist",
            CulturalGroup::HC => "Hierarchical Communitarian",
            CulturalGroup::EI => "Egalitarian Individualist",
            CulturalGroup::EC => "Egalitarian Communitarian",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            CulturalGroup::HI => "You value a well-defined social order and respect authority, yet emphasise personal freedom and personal achievement within that structure.",
            CulturalGroup::HC => "You value a structured society where roles are clearly defined. You prioritise community welfare and collective responsibilities.",
            CulturalGroup::EI => "You prioritise personal achievements. You see interactions as negotiations and value free competition among individuals.",
            CulturalGroup::EC => "You place high value on the collective and prioritise making decisions that do not negatively impact anyone.",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeadershipVariant {
    Vanilla,
    Announce,
    Unaware,
}

impl LeadershipVariant {
    pub const ALL: [LeadershipVariant; 3] = [LeadershipVariant::Vanilla, LeadershipVariant::Announce, LeadershipVariant::Unaware];

    pub fn name(self) -> &'static str {
        match self {
            LeadershipVariant::Vanilla => "vanilla",
            LeadershipVariant::Announce => "announce",
            LeadershipVariant::Unaware => "unaware",
        }
    }

    pub fn parse(text: &str) -> Option<LeadershipVariant> {
        Self::ALL.into_iter().find(|v| v.name().eq_ignore_ascii_case(text.trim()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SvoCategory {
    Altruism,
    Prosocial,
    Individualism,
    Competitiveness,
}

/// Category of an SVO angle; boundary angles fall into the lower category.
pub fn svo_category(angle: f64) -> Result<SvoCategory, AgentError> {
    if !(-90.0..=90.0).contains(&angle) {
        return Err(AgentError::AngleOutOfRange(angle));
    }
    Ok(if angle > 57.15 {
        SvoCategory::Altruism
    } else if angle > 22.45 {
        SvoCategory::Prosocial
    } else if angle > -12.04 {
        SvoCategory::Individualism
    } else {
        SvoCategory::Competitiveness
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PersonaKind {
    Svo { angle: f64 },
    Traits { traits: Vec<String> },
    Cultural { group: CulturalGroup },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Persona {
    pub id: String,
    #[serde(flatten)]
    pub kind: PersonaKind,
    #[serde(default)]
    pub leader: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leadership_variant: Option<LeadershipVariant>,
}

/// Format an angle without a trailing ".0" for whole degrees.
pub fn format_angle(angle: f64) -> String {
    if angle.fract() == 0.0 {
        format!("{}", angle as i64)
    } else {
        format!("{angle}")
    }
}

impl Persona {
    pub fn svo(angle: f64) -> Persona {
        Persona {
            id: format!("svo{}", format_angle(angle)),
            kind: PersonaKind::Svo { angle },
            leader: false,
            leadership_variant: None,
        }
    }

    pub fn traits(id: &str, traits: &[&str]) -> Persona {
        Persona {
            id: id.to_string(),
            kind: PersonaKind::Traits {
                traits: traits.iter().map(|t| t.to_string()).collect(),
            },
            leader: false,
            leadership_variant: None,
        }
    }

    pub fn selfish() -> Persona {
        Persona::traits("selfish", &SELFISH_TRAITS)
    }

    pub fn cooperative() -> Persona {
        Persona::traits("cooperative", &COOPERATIVE_TRAITS)
    }

    pub fn cultural(group: CulturalGroup) -> Persona {
        Persona {
            id: format!("{group:?}"),
            kind: PersonaKind::Cultural { group },
            leader: false,
            leadership_variant: None,
        }
    }

    pub fn with_leader(mut self, variant: LeadershipVariant) -> Persona {
        self.leader = true;
        self.leadership_variant = Some(variant);
        self
    }

    pub fn angle(&self) -> Option<f64> {
        match self.kind {
            PersonaKind::Svo { angle } => Some(angle),
            _ => None,
        }
    }

    /// Angle the scripted backend plays this persona at.
    pub fn scripted_angle(&self) -> f64 {
        match &self.kind {
            PersonaKind::Svo { angle } => *angle,
            PersonaKind::Traits { traits } => {
                let coop = traits.iter().filter(|t| COOPERATIVE_TRAITS.iter().any(|c| c.eq_ignore_ascii_case(t))).count();
                let selfish = traits.iter().filter(|t| SELFISH_TRAITS.iter().any(|c| c.eq_ignore_ascii_case(t))).count();
                match coop.cmp(&selfish) {
                    std::cmp::Ordering::Greater => 60.0,
                    std::cmp::Ordering::Less => -15.0,
                    std::cmp::Ordering::Equal => 0.0,
                }
            }
            PersonaKind::Cultural { group } => match group {
                CulturalGroup::EI => -15.0,
                CulturalGroup::HI => 0.0,
                CulturalGroup::HC => 30.0,
                CulturalGroup::EC => 45.0,
            },
        }
    }

    /// Personality text inserted into prompts.
    pub fn text(&self) -> String {
        match &self.kind {
            PersonaKind::Svo { angle } => format!("{SVO_PREAMBLE}. Your SVO angle is {} degrees.", format_angle(*angle)),
            PersonaKind::Traits { traits } => format!("Your personality traits are: {}.", traits.join(", ")),
            PersonaKind::Cultural { group } => group.text().to_string(),
        }
    }

    /// Short description used where all players are listed together.
    pub fn short_text(&self) -> String {
        match &self.kind {
            PersonaKind::Svo { angle } => format!("SVO angle: {} degrees.", format_angle(*angle)),
            _ => self.text(),
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if let PersonaKind::Svo { angle } = self.kind {
            svo_category(angle)?;
        }
        if self.id.trim().is_empty() {
            return Err(AgentError::InvalidPersona("persona id is empty".into()));
        }
        if self.leader != self.leadership_variant.is_some() {
            return Err(AgentError::InvalidPersona(format!(
                "{}: leader and leadership_variant must be set together",
                self.id
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Persona {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// Check a group of personas: each valid, at most one leader.
pub fn validate_group(personas: &[Persona]) -> Result<(), AgentError> {
    for p in personas {
        p.validate()?;
    }
    let leaders = personas.iter().filter(|p| p.leader).count();
    if leaders > 1 {
        return Err(AgentError::InvalidPersona(format!("{leaders} leaders in one group")));
    }
    Ok(())
}

pub fn load_personas(path: &Path) -> Result<Vec<Persona>, LoadError> {
    let personas: Vec<Persona> = schema::load_json(path)?;
    validate_group(&personas).map_err(|e| LoadError::Invalid {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(personas)
}
