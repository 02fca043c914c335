use pom_core::agents::{AgentDecision, GoalChoice, Proposal};
use pom_core::game::{Bundle, InfluenceKind, Role};
use pom_core::gateway::{extract_tag, parse_decision, parse_player_summaries, parse_response, surface, ParseError};
use pom_core::prompts::Phase;
use proptest::prelude::*;
use InfluenceKind::*;

mod common;
use common::{accept, buy, discard, goal, golden, health, same};

#[test]
fn golden_examples_parse_exactly() {
    let cases = golden();
    assert!(cases.len() >= 20);
    for (phase, text, want) in cases {
        assert_eq!(parse_response(phase, text).as_ref(), Ok(&want), "{phase}: {text}");
    }
}

#[test]
fn summaries_example() {
    let text = "<Pioneer> This round, I am focusing on improving the Port’s health by spending my coins on it. </Pioneer>\n\
        <Curator> I have offered my extra silicon for trade to assist others with their goals. </Curator>\n\
        <Entrepreneur> I expressed my need for cobalt due to a shortage of coins and asked for affordable offers. </Entrepreneur>\n\
        <Politician> I emphasized the need for strategic trading to optimize our resource management and health maintenance. </Politician>\n\
        <Researcher> I decided to allocate more of my budget towards maintaining the Port’s health instead of purchasing resources. </Researcher>";
    let s = parse_player_summaries(text).unwrap();
    assert_eq!(s[Role::Curator.seat()], "I have offered my extra silicon for trade to assist others with their goals.");
    assert!(s[Role::Researcher.seat()].starts_with("I decided to allocate"));
    assert!(s.iter().all(|x| !x.is_empty()));
}

#[test]
fn lenient_forms() {
    assert_eq!(parse_decision(Phase::HealthPlan, " 7 coins. "), Ok(health(7)));
    assert_eq!(parse_decision(Phase::TradeAccept, "yes."), Ok(accept(true)));
    assert_eq!(parse_decision(Phase::GoalReplan, "same"), Ok(same()));
    assert_eq!(parse_decision(Phase::GoalReplan, "  Name:   The   Drone Show "), Ok(goal("The Drone Show")));
    assert_eq!(parse_decision(Phase::Resource, "2 science and 1 LEGACY"), Ok(buy(&[(Science, 2), (Legacy, 1)])));
    assert_eq!(parse_decision(Phase::Resource, "None"), Ok(buy(&[])));
    assert_eq!(parse_decision(Phase::Discard, "None"), Ok(discard(None)));
    assert_eq!(
        parse_decision(Phase::Event, "Option 2"),
        Ok(AgentDecision::EventChoice { event: String::new(), option: 1 })
    );
    let d = parse_decision(Phase::TradeOffer, "Offer: 1 Culture, Receive: 2 Finance, To: the Entrepreneur").unwrap();
    let AgentDecision::TradeProposal { proposal: Some(p) } = d else { panic!() };
    assert_eq!(p.to, Some(Role::Entrepreneur));
}

#[test]
fn grammar_violations_are_errors() {
    let bad = [
        (Phase::HealthPlan, "seven"),
        (Phase::HealthPlan, "-3"),
        (Phase::HealthPlan, "2.5"),
        (Phase::TradeAccept, "maybe"),
        (Phase::Resource, "two Science"),
        (Phase::Resource, "2 Silicon"),
        (Phase::TradeOffer, "Receive: 1 Culture, Offer: 1 Finance"),
        (Phase::TradeOffer, "Offer: 1 Culture"),
        (Phase::TradeOffer, "Offer: 1 Culture, Receive: None"),
        (Phase::TradeOffer, "Offer: 1 Culture, Receive: 1 Finance, To: Mayor"),
        (Phase::GoalReplan, "Name:"),
        (Phase::Discard, ""),
        (Phase::Event, "0"),
    ];
    for (phase, payload) in bad {
        assert!(matches!(parse_decision(phase, payload), Err(ParseError::Grammar { .. })), "{phase}: {payload}");
    }
    assert_eq!(parse_decision(Phase::Discussion, "x"), Err(ParseError::NoDecision(Phase::Discussion)));
    assert!(matches!(parse_response(Phase::HealthPlan, "I pick 7"), Err(ParseError::Extract(_))));
    assert!(matches!(parse_response(Phase::HealthPlan, "<HEALTH>7"), Err(ParseError::Extract(_))));
}

#[test]
fn last_tag_wins() {
    assert_eq!(extract_tag("<GOAL>A</GOAL> then <goal>B</GOAL>", "GOAL").unwrap(), "B");
    assert_eq!(parse_response(Phase::HealthPlan, "<HEALTH>3</HEALTH> no, <HEALTH>6</HEALTH>"), Ok(health(6)));
}

fn kind() -> impl Strategy<Value = InfluenceKind> {
    prop::sample::select(InfluenceKind::ALL.to_vec())
}

fn bundle() -> impl Strategy<Value = Bundle> {
    prop::collection::vec((kind(), 1u32..20), 1..4).prop_map(Bundle::from_pairs)
}

fn title() -> impl Strategy<Value = String> {
    prop::collection::vec("[A-Z][a-z]{1,8}", 1..4)
        .prop_map(|w| w.join(" "))
        .prop_filter("reserved words", |t| !["None", "Same", "Nothing"].contains(&t.as_str()))
}

fn decision() -> impl Strategy<Value = AgentDecision> {
    prop_oneof![
        (0usize..6).prop_map(|option| AgentDecision::EventChoice { event: String::new(), option }),
        (0u32..100).prop_map(|coins| AgentDecision::HealthPlan { coins }),
        Just(same()),
        title().prop_map(|t| AgentDecision::GoalChoice { goal: GoalChoice::Card(t) }),
        prop::collection::vec((kind(), 1u32..20), 0..4).prop_map(|items| AgentDecision::ResourcePurchase { items }),
        Just(AgentDecision::TradeProposal { proposal: None }),
        (bundle(), bundle(), prop::option::of(prop::sample::select(Role::ALL.to_vec()))).prop_map(|(offer, request, to)| {
            AgentDecision::TradeProposal {
                proposal: Some(Proposal { offer, request, to }),
            }
        }),
        any::<bool>().prop_map(|accept| AgentDecision::TradeResponse { accept }),
        prop::option::of(title()).prop_map(|card| AgentDecision::Discard { card }),
    ]
}

proptest! {
    #[test]
    fn surface_then_parse_is_identity(d in decision()) {
        let (phase, text) = surface(&d).unwrap();
        prop_assert_eq!(parse_decision(phase, &text), Ok(d.clone()));
        let tag = phase.tag().unwrap();
        let wrapped = format!("Some reasoning first.\n<{tag}>{text}</{tag}>\n");
        prop_assert_eq!(parse_response(phase, &wrapped), Ok(d));
    }
}
