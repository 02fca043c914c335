#![allow(dead_code)]
//! Fixtures shared by the test targets.

use pom_core::agents::{AgentDecision, GoalChoice, Proposal};
use pom_core::game::{Bundle, InfluenceKind};
use pom_core::prompts::Phase;
use serde::Deserialize;
use InfluenceKind::*;

pub fn health(coins: u32) -> AgentDecision {
    AgentDecision::HealthPlan { coins }
}

pub fn goal(name: &str) -> AgentDecision {
    AgentDecision::GoalChoice {
        goal: GoalChoice::Card(name.into()),
    }
}

pub fn same() -> AgentDecision {
    AgentDecision::GoalChoice { goal: GoalChoice::Same }
}

pub fn buy(items: &[(InfluenceKind, u32)]) -> AgentDecision {
    AgentDecision::ResourcePurchase { items: items.to_vec() }
}

pub fn trade(offer: &[(InfluenceKind, u32)], request: &[(InfluenceKind, u32)]) -> AgentDecision {
    AgentDecision::TradeProposal {
        proposal: Some(Proposal {
            offer: Bundle::from_pairs(offer.iter().copied()),
            request: Bundle::from_pairs(request.iter().copied()),
            to: None,
        }),
    }
}

pub fn accept(yes: bool) -> AgentDecision {
    AgentDecision::TradeResponse { accept: yes }
}

pub fn discard(name: Option<&str>) -> AgentDecision {
    AgentDecision::Discard {
        card: name.map(str::to_string),
    }
}

/// Tagged answers shown in the prompt templates and sample outputs.
pub fn golden() -> Vec<(Phase, &'static str, AgentDecision)> {
    vec![
        (Phase::HealthPlan, "<HEALTH>7</HEALTH>", health(7)),
        (Phase::HealthPlan, "<HEALTH>2</HEALTH>", health(2)),
        (Phase::HealthPlan, "<HEALTH>4</HEALTH>", health(4)),
        (Phase::HealthPlan, "<HEALTH>8</HEALTH>", health(8)),
        (Phase::HealthPlan, "<HEALTH>1</HEALTH>", health(1)),
        (
            Phase::HealthPlan,
            "Therefore, I will allocate a moderate amount of coins to the port's health, aiming to maintain a stable level and avoid the risk of two events in the next round. <HEALTH>5</HEALTH>",
            health(5),
        ),
        (Phase::GoalPlanInitial, "<GOAL>Community Outreach</GOAL>", goal("Community Outreach")),
        (Phase::GoalPlanInitial, "<GOAL>Scientific Breakthrough</GOAL>", goal("Scientific Breakthrough")),
        (Phase::GoalPlanInitial, "<GOAL>Public Speaking Tour</GOAL>", goal("Public Speaking Tour")),
        (Phase::GoalPlanInitial, "<GOAL>Strategic Compromise</GOAL>", goal("Strategic Compromise")),
        (Phase::GoalPlanInitial, "<GOAL>Cultural Renaissance</GOAL>", goal("Cultural Renaissance")),
        (
            Phase::GoalPlanInitial,
            "Considering these factors, I'll focus on **<GOAL>The Drone Show</GOAL>**.",
            goal("The Drone Show"),
        ),
        (Phase::GoalReplan, "<GOAL>Same</GOAL>", same()),
        (Phase::GoalReplan, "<GOAL>Same</GOAL> ", same()),
        (Phase::GoalReplan, "<GOAL>Name: Dangerous Experiment</GOAL>", goal("Dangerous Experiment")),
        (Phase::Resource, "I will consider using the remaining 6 coins on my non-speciality resources. <RESOURCE>2 Science</RESOURCE>", buy(&[(Science, 2)])),
        (Phase::Resource, "<RESOURCE>1 Finance</RESOURCE>", buy(&[(Finance, 1)])),
        (Phase::Resource, "<RESOURCE>1 Science</RESOURCE>", buy(&[(Science, 1)])),
        (Phase::Resource, "<RESOURCE>3 Culture</RESOURCE>", buy(&[(Culture, 3)])),
        (
            Phase::Resource,
            "1) <RESOURCE>1 Government</RESOURCE> **Explanation:** Since Government is my speciality resource, I can purchase it for 2 coins.",
            buy(&[(Governance, 1)]),
        ),
        (
            Phase::Resource,
            "You have 8 coins to spend, so you can purchase a maximum of 4 Finance resources. **<RESOURCE>4 Finance</RESOURCE>** This strategy allows you to:",
            buy(&[(Finance, 4)]),
        ),
        (Phase::TradeOffer, "<TRADE>Offer: 1 Culture, Receive: 1 Finance</TRADE>", trade(&[(Culture, 1)], &[(Finance, 1)])),
        (Phase::TradeOffer, "<TRADE>Offer: 3 Culture, Receive: 2 Finance</TRADE>", trade(&[(Culture, 3)], &[(Finance, 2)])),
        (Phase::TradeOffer, "<TRADE>Offer: 2 Government, Receive: 1 Culture</TRADE>", trade(&[(Governance, 2)], &[(Culture, 1)])),
        (Phase::TradeOffer, "<TRADE>Offer: 1 Science, Receive: 1 Legacy</TRADE>", trade(&[(Science, 1)], &[(Legacy, 1)])),
        (Phase::TradeOffer, "<TRADE>Offer: 3 Culture, Receive: 2 Government</TRADE>", trade(&[(Culture, 3)], &[(Governance, 2)])),
        (Phase::TradeOffer, "<TRADE>Offer: None, Receive: None</TRADE>", AgentDecision::TradeProposal { proposal: None }),
        (
            Phase::TradeOffer,
            "**Offer:** I will offer a trade that maximizes my potential gain and minimizes my risk. **Trade Offer:** <TRADE>Offer: 1 Finance, Receive: 1 Legacy and 1 Science</TRADE> **Justification:**",
            trade(&[(Finance, 1)], &[(Legacy, 1), (Science, 1)]),
        ),
        (Phase::TradeAccept, "<ACCEPT>Yes</ACCEPT>", accept(true)),
        (Phase::TradeAccept, "<ACCEPT>No</ACCEPT>", accept(false)),
        (
            Phase::TradeAccept,
            "This will help me reach my goal faster, potentially giving me a lead over other players. <ACCEPT>Yes</ACCEPT>",
            accept(true),
        ),
        (Phase::Discard, "<DISCARD>Name: Scientific Research Lab</DISCARD>", discard(Some("Scientific Research Lab"))),
        (Phase::Discard, "<DISCARD>Name: Economic Reform Plan</DISCARD>", discard(Some("Economic Reform Plan"))),
        (Phase::Discard, "<DISCARD>Name: None</DISCARD>", discard(None)),
        (Phase::Discard, "Final Answer: **<DISCARD>Name: Ambitious Sculpture</DISCARD>**", discard(Some("Ambitious Sculpture"))),
    ]
}

/// Mean absolute difference over all ordered pairs, by definition.
pub fn gini_oracle(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for a in x {
        for b in x {
            total += (a - b).abs();
        }
    }
    total / (2.0 * n * n * mean)
}

#[derive(Deserialize)]
pub struct WelchCase {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub p: f64,
}

#[derive(Deserialize)]
struct WelchFixture {
    cases: Vec<WelchCase>,
}

/// Two-sided Welch p-values computed with scipy.
pub fn welch_cases() -> Vec<WelchCase> {
    let f: WelchFixture = serde_json::from_str(include_str!("../data/welch_scipy.json")).unwrap();
    f.cases
}
