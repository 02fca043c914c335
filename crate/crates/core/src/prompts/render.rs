use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("no value for placeholder {{{0}}}")]
    MissingSlot(String),
    #[error("unknown phase `{0}`")]
    UnknownPhase(String),
    #[error("cannot read template {path}: {message}")]
    Io { path: String, message: String },
}

fn is_slot_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'
}

/// Substitute `{name}` placeholders. Braces that do not enclose a slot name
/// are copied through unchanged.
pub fn render(template: &str, slots: &BTreeMap<&str, String>) -> Result<String, RenderError> {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) if close > 0 && after[..close].chars().all(is_slot_char) => {
                let name = &after[..close];
                let value = slots.get(name).ok_or_else(|| RenderError::MissingSlot(name.to_string()))?;
                out.push_str(value);
                rest = &after[close + 1..];
            }
            _ => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}

/// Placeholder names used by a template, in order of first appearance.
pub fn placeholders(template: &str) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) if close > 0 && after[..close].chars().all(is_slot_char) => {
                let name = after[..close].to_string();
                if !names.contains(&name) {
                    names.push(name);
                }
                rest = &after[close + 1..];
            }
            _ => rest = after,
        }
    }
    names
}

/// The full set of prompt templates. Defaults are compiled in; any file
/// present in an override directory replaces the default of the same name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateSet {
    templates: BTreeMap<&'static str, String>,
}

pub const TEMPLATE_NAMES: [&str; 12] = [
    "general",
    "event",
    "svo_info",
    "discussion",
    "summary",
    "health_plan",
    "goal_plan_initial",
    "goal_replan",
    "resource",
    "trade_offer",
    "trade_accept",
    "discard",
];

impl Default for TemplateSet {
    fn default() -> Self {
        let mut templates = BTreeMap::new();
        templates.insert("general", include_str!("templates/general.txt").to_string());
        templates.insert("event", include_str!("templates/event.txt").to_string());
        templates.insert("svo_info", include_str!("templates/svo_info.txt").to_string());
        templates.insert("discussion", include_str!("templates/discussion.txt").to_string());
        templates.insert("summary", include_str!("templates/summary.txt").to_string());
        templates.insert("health_plan", include_str!("templates/health_plan.txt").to_string());
        templates.insert("goal_plan_initial", include_str!("templates/goal_plan_initial.txt").to_string());
        templates.insert("goal_replan", include_str!("templates/goal_replan.txt").to_string());
        templates.insert("resource", include_str!("templates/resource.txt").to_string());
        templates.insert("trade_offer", include_str!("templates/trade_offer.txt").to_string());
        templates.insert("trade_accept", include_str!("templates/trade_accept.txt").to_string());
        templates.insert("discard", include_str!("templates/discard.txt").to_string());
        TemplateSet { templates }
    }
}

impl TemplateSet {
    /// Defaults overlaid with `<name>.txt` files found in `dir`.
    pub fn with_overrides(dir: &Path) -> Result<TemplateSet, RenderError> {
        let mut set = TemplateSet::default();
        for name in TEMPLATE_NAMES {
            let path = dir.join(format!("{name}.txt"));
            if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| RenderError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                set.templates.insert(name, text);
            }
        }
        Ok(set)
    }

    pub fn get(&self, name: &str) -> &str {
        self.templates.get(name).map(String::as_str).unwrap_or("")
    }
}
