use std::collections::BTreeSet;
use std::path::PathBuf;

use pom_core::agents::persona::{LeadershipVariant, Persona};
use pom_core::game::cards::default_event_deck;
use pom_core::game::{AccomplishmentCard, Bundle, InfluenceKind, Prices, Role, RoundLedger, Thresholds, TradeOffer};
use pom_core::prompts::context::PlayerLine;
use pom_core::prompts::render::{placeholders, TEMPLATE_NAMES};
use pom_core::prompts::{leadership_line, Phase, PromptContext, Prompter};
use proptest::prelude::*;
use InfluenceKind::*;

fn card(id: &str, name: &str, cost: &[(InfluenceKind, u32)], points: u32, penalty: u32) -> AccomplishmentCard {
    AccomplishmentCard {
        id: id.into(),
        name: name.into(),
        cost: Bundle::from_pairs(cost.iter().copied()),
        points,
        health_penalty: penalty,
    }
}

fn base() -> PromptContext {
    let angles = [(Role::Pioneer, 60.0), (Role::Entrepreneur, -15.0), (Role::Researcher, 15.0), (Role::Politician, 0.0), (Role::Curator, 30.0)];
    let players = angles
        .iter()
        .map(|&(role, a)| PlayerLine {
            role,
            personality: Persona::svo(a).short_text(),
            leader_note: (role == Role::Politician).then(|| " This player is the designated leader, and everyone has been told.".into()),
        })
        .collect();
    let hand = vec![
        card("drone-show", "The Drone Show", &[(Science, 1), (Finance, 2)], 3, 0),
        card("ambitious-sculpture", "Ambitious Sculpture", &[], 4, 13),
    ];
    let mut ledger = RoundLedger {
        round: 2,
        health_spend: [3, 4, 5, 5, 7],
        ..RoundLedger::default()
    };
    ledger.completed.push((Role::Curator, "Public Speaking Tour".into()));
    PromptContext {
        points: 3,
        coins: 10,
        leadership: leadership_line(LeadershipVariant::Announce, Role::Politician, Role::Researcher),
        role: Role::Researcher,
        prices: Prices::default(),
        personality: Persona::svo(15.0).text(),
        health: 47,
        round_start_health: 72,
        decay: 25,
        coin_budget: 10,
        thresholds: Thresholds::default(),
        events: vec![("Dust Storm".into(), "Port health drops by 5".into())],
        meeting_summary: Some("I will spend most of my coins on health".into()),
        last_round: Some(ledger),
        resources: Bundle::from_pairs([(Science, 1), (Culture, 2)]),
        hand: hand.clone(),
        current_goal: Some(hand[0].clone()),
        players,
        svo_info: true,
        meeting: None,
        pending_offer: None,
        event: None,
    }
}

/// The base context with every phase-specific value filled in.
fn full() -> PromptContext {
    let event = default_event_deck().into_iter().find(|e| e.decision.is_some()).expect("deck has a decision event");
    base()
        .with_meeting("**Pioneer:** We should fund the Port first.\n**Curator:** Agreed.")
        .with_offer(&TradeOffer {
            proposer: Role::Entrepreneur,
            responder: Role::Researcher,
            offer: Bundle::single(Finance, 2),
            request: Bundle::single(Science, 1),
        })
        .with_event(&event)
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/prompts")
}

#[test]
fn rendered_prompts_match_golden_files() {
    let ctx = full();
    let prompter = Prompter::default();
    let update = std::env::var_os("POM_UPDATE_GOLDEN").is_some();
    for phase in Phase::ALL {
        let text = prompter.phase(phase, &ctx).unwrap();
        let path = golden_dir().join(format!("{phase}.txt"));
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e} (set POM_UPDATE_GOLDEN=1 to create)", path.display()));
        assert!(text == want, "{phase} prompt differs from {}", path.display());
    }
}

#[test]
fn placeholders_and_context_slots_coincide() {
    let prompter = Prompter::default();
    let slots = full().slots(prompter.templates.get("svo_info"));
    let provided: BTreeSet<String> = slots.keys().map(|k| k.to_string()).collect();
    let mut used = BTreeSet::new();
    for name in TEMPLATE_NAMES {
        used.extend(placeholders(prompter.templates.get(name)));
    }
    let unfilled: Vec<_> = used.difference(&provided).collect();
    let unused: Vec<_> = provided.difference(&used).collect();
    assert!(unfilled.is_empty(), "placeholders with no value: {unfilled:?}");
    assert!(unused.is_empty(), "values no template uses: {unused:?}");
}

#[test]
fn rounds_remaining_never_appear() {
    let ctx = full();
    for phase in Phase::ALL {
        let text = Prompter::default().phase(phase, &ctx).unwrap().to_lowercase();
        assert!(!text.contains("rounds remaining") && !text.contains("rounds left"), "{phase}");
    }
}

#[test]
fn phase_specific_lines() {
    let ctx = full();
    let accept = Prompter::default().phase(Phase::TradeAccept, &ctx).unwrap();
    assert!(accept.contains("You will receive 2 Finance in return for 1 Science"), "{accept}");
    let replan = Prompter::default().phase(Phase::GoalReplan, &ctx).unwrap();
    assert!(replan.contains("Acceptable values are Same (pursue same goal) or Name: New goal"));
    let health = Prompter::default().phase(Phase::HealthPlan, &ctx).unwrap();
    assert!(health.contains("<HEALTH>7</HEALTH>"));
    assert!(health.contains("Pioneer is the designated leader") || health.contains("Politician is the designated leader"));
}

/// Everything a player could be told, across all phases.
fn everything(ctx: &PromptContext) -> String {
    Phase::ALL
        .iter()
        .map(|p| Prompter::default().phase(*p, ctx).unwrap())
        .collect::<Vec<_>>()
        .join("\n---\n")
}

fn mutate(ctx: &mut PromptContext, field: usize, k: u32) {
    let k1 = k + 1;
    match field {
        0 => ctx.points += k1,
        1 => ctx.coins += k1,
        2 => ctx.leadership = None,
        3 => ctx.role = Role::from_seat((ctx.role.seat() + 1 + k as usize % 4) % 5),
        4 => ctx.prices.non_speciality += k1,
        5 => ctx.personality = Persona::svo(45.0).text(),
        6 => ctx.health -= k1 as i64,
        7 => ctx.round_start_health += k1 as i64,
        8 => ctx.decay += k1 as i64,
        9 => ctx.coin_budget += k1,
        10 => ctx.thresholds.hi += k1 as i64,
        11 => ctx.thresholds.lo -= k1 as i64,
        12 => ctx.events.clear(),
        13 => ctx.meeting_summary = None,
        14 => ctx.last_round.as_mut().unwrap().health_spend[k as usize % 5] += 1,
        15 => ctx.resources[Legacy] += k1,
        16 => ctx.hand[1].points += k1,
        17 => ctx.current_goal = None,
        18 => ctx.players[k as usize % 5].personality = Persona::svo(-30.0).short_text(),
        19 => ctx.svo_info = false,
        20 => ctx.meeting = Some(format!("**Curator:** {k}")),
        21 => ctx.pending_offer.as_mut().unwrap().offer[Finance] += k1,
        22 => ctx.event.as_mut().unwrap().name.push_str(" II"),
        _ => unreachable!(),
    }
}

proptest! {
    #[test]
    fn rendering_tells_contexts_apart(field in 0usize..23, k in 0u32..5) {
        let a = full();
        let mut b = a.clone();
        mutate(&mut b, field, k);
        prop_assume!(a != b);
        prop_assert_ne!(everything(&a), everything(&b));
    }
}
