//! Grammars for the tagged answers of each phase, and their canonical
//! surface forms.

use thiserror::Error;

use super::extract::{extract_tag, ExtractError};
use crate::agents::{AgentDecision, GoalChoice, Proposal};
use crate::game::{Bundle, EventOption, InfluenceKind, Role};
use crate::prompts::Phase;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("phase {0} has no tagged decision")]
    NoDecision(Phase),
    #[error("cannot parse {phase} answer `{payload}`: {reason}")]
    Grammar {
        phase: Phase,
        payload: String,
        reason: String,
    },
    #[error("no summary for the {0}")]
    MissingRole(Role),
}

fn grammar(phase: Phase, payload: &str, reason: impl Into<String>) -> ParseError {
    ParseError::Grammar {
        phase,
        payload: payload.to_string(),
        reason: reason.into(),
    }
}

/// Collapse runs of whitespace and trim.
pub fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_punct(text: &str) -> &str {
    text.trim().trim_end_matches(['.', '!']).trim()
}

/// `text` with a case-insensitive `prefix` removed.
fn strip_prefix_ci<'a>(text: &'a str, prefix: &str) -> Option<&'a str> {
    let head = text.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix).then(|| &text[prefix.len()..])
}

fn is_none_word(text: &str) -> bool {
    let t = strip_punct(text);
    t.eq_ignore_ascii_case("none") || t.eq_ignore_ascii_case("nothing")
}

fn parse_count(text: &str) -> Option<u32> {
    let t = text.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

/// "2 Science, 1 Legacy and 3 Government" as ordered (kind, qty) items.
fn parse_items(phase: Phase, payload: &str, text: &str) -> Result<Vec<(InfluenceKind, u32)>, ParseError> {
    let text = normalize(strip_punct(text));
    if text.is_empty() || is_none_word(&text) {
        return Ok(Vec::new());
    }
    let mut items = Vec::new();
    for part in text.replace(" and ", ",").replace(';', ",").split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (qty, kind) = part
            .split_once(' ')
            .ok_or_else(|| grammar(phase, payload, format!("`{part}` is not `<qty> <resource>`")))?;
        let qty = parse_count(qty).ok_or_else(|| grammar(phase, payload, format!("`{qty}` is not a count")))?;
        let kind = InfluenceKind::parse(kind)
            .ok_or_else(|| grammar(phase, payload, format!("unknown resource `{kind}`")))?;
        items.push((kind, qty));
    }
    Ok(items)
}

fn parse_bundle(phase: Phase, payload: &str, text: &str) -> Result<Bundle, ParseError> {
    let mut bundle = Bundle::EMPTY;
    for (kind, qty) in parse_items(phase, payload, text)? {
        bundle[kind] += qty;
    }
    Ok(bundle)
}

fn parse_health(payload: &str) -> Result<AgentDecision, ParseError> {
    let t = strip_punct(payload);
    let t = t
        .strip_suffix("coins")
        .or_else(|| t.strip_suffix("coin"))
        .unwrap_or(t);
    parse_count(t)
        .map(|coins| AgentDecision::HealthPlan { coins })
        .ok_or_else(|| grammar(Phase::HealthPlan, payload, "expected a whole number of coins"))
}

fn parse_event(payload: &str) -> Result<AgentDecision, ParseError> {
    let t = strip_punct(payload);
    let t = strip_prefix_ci(t, "option").unwrap_or(t);
    match parse_count(t) {
        Some(n) if n >= 1 => Ok(AgentDecision::EventChoice {
            event: String::new(),
            option: n as usize - 1,
        }),
        _ => Err(grammar(Phase::Event, payload, "expected an option number")),
    }
}

/// Option index for an event answer given by number or by label.
pub fn parse_event_option(payload: &str, options: &[EventOption]) -> Result<usize, ParseError> {
    if let Ok(AgentDecision::EventChoice { option, .. }) = parse_event(payload) {
        if option < options.len() {
            return Ok(option);
        }
        return Err(grammar(Phase::Event, payload, "option number out of range"));
    }
    let wanted = normalize(strip_punct(payload)).to_lowercase();
    options
        .iter()
        .position(|o| normalize(strip_punct(&o.label)).to_lowercase() == wanted)
        .ok_or_else(|| grammar(Phase::Event, payload, "no option matches"))
}

fn parse_goal(phase: Phase, payload: &str) -> Result<AgentDecision, ParseError> {
    let t = normalize(payload);
    if let Some(name) = strip_prefix_ci(&t, "name:") {
        let name = normalize(name);
        if name.is_empty() {
            return Err(grammar(phase, payload, "empty goal name"));
        }
        return Ok(AgentDecision::GoalChoice {
            goal: GoalChoice::Card(name),
        });
    }
    let bare = strip_punct(&t);
    if bare.eq_ignore_ascii_case("same") || strip_prefix_ci(bare, "same ").is_some() {
        return Ok(AgentDecision::GoalChoice { goal: GoalChoice::Same });
    }
    if bare.is_empty() {
        return Err(grammar(phase, payload, "empty goal"));
    }
    Ok(AgentDecision::GoalChoice {
        goal: GoalChoice::Card(t),
    })
}

/// Find the byte offset of `key` (ASCII, case-insensitive) in `text`.
fn find_ci(text: &str, key: &str) -> Option<usize> {
    text.to_ascii_lowercase().find(&key.to_ascii_lowercase())
}

fn parse_trade(payload: &str) -> Result<AgentDecision, ParseError> {
    let phase = Phase::TradeOffer;
    let t = normalize(payload);
    let offer_at = find_ci(&t, "offer:").ok_or_else(|| grammar(phase, payload, "missing `Offer:`"))?;
    let receive_at = find_ci(&t, "receive:").ok_or_else(|| grammar(phase, payload, "missing `Receive:`"))?;
    if receive_at < offer_at {
        return Err(grammar(phase, payload, "`Offer:` must come before `Receive:`"));
    }
    let to_at = find_ci(&t, "to:").filter(|&i| i > receive_at);
    let offer_text = t[offer_at + 6..receive_at].trim().trim_end_matches(',');
    let receive_end = to_at.unwrap_or(t.len());
    let receive_text = t[receive_at + 8..receive_end].trim().trim_end_matches(',');
    let to = match to_at {
        Some(i) => {
            let name = strip_punct(&t[i + 3..]);
            Some(Role::parse(name).ok_or_else(|| grammar(phase, payload, format!("unknown player `{name}`")))?)
        }
        None => None,
    };
    let offer = parse_bundle(phase, payload, offer_text)?;
    let request = parse_bundle(phase, payload, receive_text)?;
    match (offer.is_empty(), request.is_empty()) {
        (true, true) if to.is_none() => Ok(AgentDecision::TradeProposal { proposal: None }),
        (false, false) => Ok(AgentDecision::TradeProposal {
            proposal: Some(Proposal { offer, request, to }),
        }),
        _ => Err(grammar(phase, payload, "a trade needs something on both sides")),
    }
}

fn parse_accept(payload: &str) -> Result<AgentDecision, ParseError> {
    let t = strip_punct(payload);
    if t.eq_ignore_ascii_case("yes") {
        Ok(AgentDecision::TradeResponse { accept: true })
    } else if t.eq_ignore_ascii_case("no") {
        Ok(AgentDecision::TradeResponse { accept: false })
    } else {
        Err(grammar(Phase::TradeAccept, payload, "expected Yes or No"))
    }
}

fn parse_discard(payload: &str) -> Result<AgentDecision, ParseError> {
    let t = normalize(payload);
    let name = match strip_prefix_ci(&t, "name:") {
        Some(name) => normalize(name),
        None => t.clone(),
    };
    if name.is_empty() {
        return Err(grammar(Phase::Discard, payload, "empty answer"));
    }
    if strip_punct(&name).eq_ignore_ascii_case("none") {
        return Ok(AgentDecision::Discard { card: None });
    }
    Ok(AgentDecision::Discard { card: Some(name) })
}

/// Parse an extracted payload with the phase's grammar. Goal and discard
/// answers carry card titles; matching them to cards is up to the caller.
pub fn parse_decision(phase: Phase, payload: &str) -> Result<AgentDecision, ParseError> {
    match phase {
        Phase::Event => parse_event(payload),
        Phase::HealthPlan => parse_health(payload),
        Phase::GoalPlanInitial | Phase::GoalReplan => parse_goal(phase, payload),
        Phase::Resource => Ok(AgentDecision::ResourcePurchase {
            items: parse_items(phase, payload, payload)?,
        }),
        Phase::TradeOffer => parse_trade(payload),
        Phase::TradeAccept => parse_accept(payload),
        Phase::Discard => parse_discard(payload),
        Phase::Discussion | Phase::Summary => Err(ParseError::NoDecision(phase)),
    }
}

/// Extract the phase's tag from a full response, then parse it.
pub fn parse_response(phase: Phase, response: &str) -> Result<AgentDecision, ParseError> {
    let tag = phase.tag().ok_or(ParseError::NoDecision(phase))?;
    parse_decision(phase, &extract_tag(response, tag)?)
}

fn items_surface(items: &[(InfluenceKind, u32)]) -> String {
    if items.is_empty() {
        return "None".to_string();
    }
    items
        .iter()
        .map(|(k, q)| format!("{q} {}", k.prompt_name()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn bundle_surface(bundle: &Bundle) -> String {
    items_surface(&bundle.iter().collect::<Vec<_>>())
}

/// Canonical tagged-payload text for a decision, with the phase it answers.
/// Completion decisions have no prompt and so no surface form.
pub fn surface(decision: &AgentDecision) -> Option<(Phase, String)> {
    let out = match decision {
        AgentDecision::EventChoice { option, .. } => (Phase::Event, (option + 1).to_string()),
        AgentDecision::HealthPlan { coins } => (Phase::HealthPlan, coins.to_string()),
        AgentDecision::GoalChoice { goal } => (
            Phase::GoalReplan,
            match goal {
                GoalChoice::Same => "Same".to_string(),
                GoalChoice::Card(name) => format!("Name: {name}"),
            },
        ),
        AgentDecision::ResourcePurchase { items } => (Phase::Resource, items_surface(items)),
        AgentDecision::TradeProposal { proposal } => (
            Phase::TradeOffer,
            match proposal {
                None => "Offer: None, Receive: None".to_string(),
                Some(p) => {
                    let mut s = format!("Offer: {}, Receive: {}", bundle_surface(&p.offer), bundle_surface(&p.request));
                    if let Some(to) = p.to {
                        s.push_str(&format!(", To: {to}"));
                    }
                    s
                }
            },
        ),
        AgentDecision::TradeResponse { accept } => {
            (Phase::TradeAccept, if *accept { "Yes" } else { "No" }.to_string())
        }
        AgentDecision::Discard { card } => (
            Phase::Discard,
            match card {
                None => "None".to_string(),
                Some(name) => format!("Name: {name}"),
            },
        ),
        AgentDecision::Completion { .. } => return None,
    };
    Some(out)
}

/// One summary per seat from `<Role>...</Role>` blocks.
pub fn parse_player_summaries(text: &str) -> Result<[String; 5], ParseError> {
    let mut out: [String; 5] = Default::default();
    for role in Role::ALL {
        out[role.seat()] = match extract_tag(text, role.name()) {
            Ok(s) => s,
            Err(ExtractError::Missing(_)) | Err(ExtractError::Unterminated(_)) => {
                return Err(ParseError::MissingRole(role))
            }
            Err(e) => return Err(e.into()),
        };
    }
    Ok(out)
}
