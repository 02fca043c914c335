use pom_core::game::Role;
use pom_core::metrics::{
    aggregate, classify_trade, compare_groups, dirty_pct, gini, leader_heatmap, welch_p, write_table_csv, PlayerMetrics,
    RunMetrics, TradeClass, TradeCounts,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{gini_oracle, welch_cases};

#[test]
fn gini_matches_the_pairwise_oracle_on_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..1000 {
        let n = rng.random_range(2..=12);
        let v: Vec<f64> = (0..n)
            .map(|_| if i % 4 == 0 { rng.random_range(0..20) as f64 } else { rng.random_range(0.0..100.0) })
            .collect();
        let g = gini(&v).unwrap();
        assert!((g - gini_oracle(&v)).abs() < 1e-9, "{v:?}");
        assert!((0.0..1.0).contains(&g));
    }
}

#[test]
fn gini_examples() {
    assert_eq!(gini(&[5.0; 5]).unwrap(), 0.0);
    assert!((gini(&[10.0, 0.0, 0.0, 0.0, 0.0]).unwrap() - 0.8).abs() < 1e-12);
    assert!((gini(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap() - 0.2667).abs() < 1e-4);
    assert_eq!(gini(&[0.0; 5]).unwrap(), 0.0);
    assert!(gini(&[1.0, -1.0]).is_err());
    assert!(gini(&[1.0]).is_err());
}

#[test]
fn trade_classes_follow_the_trichotomy() {
    for offered in 1..=5 {
        for requested in 1..=5 {
            let class = classify_trade(offered, requested).unwrap();
            let expect = match offered.cmp(&requested) {
                std::cmp::Ordering::Equal => TradeClass::Fair,
                std::cmp::Ordering::Greater => TradeClass::Generous,
                std::cmp::Ordering::Less => TradeClass::Selfish,
            };
            assert_eq!(class, expect, "{offered} for {requested}");
        }
    }
    assert!(classify_trade(0, 1).is_err());
    assert!(classify_trade(1, 0).is_err());
}

#[test]
fn dirty_percentages() {
    assert_eq!(dirty_pct(3, 5).unwrap(), Some(60.0));
    assert_eq!(dirty_pct(0, 4).unwrap(), Some(0.0));
    assert_eq!(dirty_pct(0, 0).unwrap(), None);
    assert!(dirty_pct(5, 3).is_err());
}

#[test]
fn welch_matches_reference_values() {
    let cases = welch_cases();
    assert_eq!(cases.len(), 50);
    for (i, c) in cases.iter().enumerate() {
        let p = welch_p(&c.a, &c.b).unwrap();
        assert!((p - c.p).abs() < 1e-6, "case {i}: {p} vs {}", c.p);
    }
    let p = welch_p(&[0.0; 6], &[1.0, 1.0, 1.0, 1.0, 1.0, 2.0]).unwrap();
    assert!((p - 0.0009167475143984045).abs() < 1e-6);
    assert!(p < 0.01);
}

#[test]
fn welch_edge_cases() {
    let a = [1.0, 2.0, 3.0, 4.0];
    assert!((welch_p(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    assert!(welch_p(&[1.0], &a).is_err());
    assert!(welch_p(&[2.0, 2.0], &[2.0, 2.0]).is_err());
}

proptest! {
    #[test]
    fn gini_is_scale_invariant(v in prop::collection::vec(0.0f64..1000.0, 2..10), k in 0.01f64..100.0) {
        let g = gini(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
        prop_assert!((gini(&scaled).unwrap() - g).abs() < 1e-9);
    }

    #[test]
    fn gini_is_zero_iff_all_equal(v in prop::collection::vec(0u32..6, 2..8)) {
        let x: Vec<f64> = v.iter().map(|&u| u as f64).collect();
        let g = gini(&x).unwrap();
        let equal = v.iter().all(|u| *u == v[0]);
        prop_assert_eq!(g == 0.0, equal);
    }

    #[test]
    fn welch_is_symmetric(a in prop::collection::vec(-50.0f64..50.0, 2..10), b in prop::collection::vec(-50.0f64..50.0, 2..10)) {
        if let Ok(p) = welch_p(&a, &b) {
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((welch_p(&b, &a).unwrap() - p).abs() < 1e-12);
        }
    }
}

fn player(role: Role, persona: &str, points: u32) -> PlayerMetrics {
    PlayerMetrics {
        role,
        persona_id: persona.into(),
        points,
        points_all: points,
        health_spend: 0,
        dirty_opportunities: 0,
        dirty_claims: 0,
        trades: TradeCounts::default(),
        proposals_rejected: 0,
    }
}

fn run(points: [u32; 5], survived: bool, winners: &[Role], leader: Option<&str>) -> RunMetrics {
    let players: Vec<PlayerMetrics> = Role::ALL
        .iter()
        .zip(["a", "b", "c", "d", "e"])
        .zip(points)
        .map(|((r, id), p)| {
            let mut m = player(*r, id, p);
            m.points_all = if survived { p } else { 0 };
            m.health_spend = 3 * (1 + r.seat() as u32);
            m
        })
        .collect();
    RunMetrics {
        survived,
        collapse_round: (!survived).then_some(5),
        rounds_played: if survived { 9 } else { 5 },
        final_health: if survived { 40 } else { 0 },
        total_health_spend: players.iter().map(|p| p.health_spend).sum(),
        gini: 0.0,
        winners: winners.to_vec(),
        leader: leader.map(str::to_string),
        players,
    }
}

#[test]
fn aggregate_means_and_errors() {
    let runs = vec![
        run([4, 1, 9, 0, 0], true, &[Role::Researcher], None),
        run([6, 3, 1, 0, 0], true, &[Role::Curator], None),
    ];
    let agg = aggregate(&runs).unwrap();
    assert_eq!(agg.survival_rate, 1.0);
    let a = agg.rows.iter().find(|r| r.persona == "a").unwrap();
    assert!((a.points_all.mean - 5.0).abs() < 1e-12);
    assert!((a.points_all.se - 0.5f64.sqrt()).abs() < 1e-12);
    // ranking by mean points, highest first
    let order: Vec<&str> = agg.rows.iter().map(|r| r.persona.as_str()).collect();
    assert_eq!(order, ["a", "c", "b", "d", "e"]);
    assert!(aggregate(&[]).is_err());
}

#[test]
fn collapsed_runs_score_zero_in_the_all_games_column() {
    let runs = vec![run([4, 4, 4, 4, 4], true, &Role::ALL, None), run([8, 0, 0, 0, 0], false, &[], None)];
    let agg = aggregate(&runs).unwrap();
    assert_eq!(agg.survival_rate, 0.5);
    let a = agg.rows.iter().find(|r| r.persona == "a").unwrap();
    assert_eq!(a.points_all.mean, 2.0);
    assert_eq!(a.points_success.mean, 4.0);
    assert_eq!(a.points_success.n, 1);
    assert!((a.wins - 0.2).abs() < 1e-12);
    let per_round = a.health_per_round.mean;
    assert!((per_round - (3.0 / 9.0 + 3.0 / 5.0) / 2.0).abs() < 1e-12);
}

#[test]
fn heatmap_rows_never_exceed_one_hundred_percent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let leaders = ["a", "b", "c"];
    let runs: Vec<RunMetrics> = (0..60)
        .map(|i| {
            let survived = rng.random_bool(0.7);
            let k = rng.random_range(1..=3);
            let winners: Vec<Role> = if survived { Role::ALL[..k].to_vec() } else { Vec::new() };
            run([1, 1, 1, 0, 0], survived, &winners, Some(leaders[i % 3]))
        })
        .collect();
    let map = leader_heatmap(&runs);
    assert_eq!(map.leaders, leaders);
    for (row, n) in map.cells.iter().zip(&map.runs) {
        let total: f64 = row.iter().sum();
        assert!(total <= 100.0 + 1e-9, "{total}");
        assert_eq!(*n, 20);
    }
    // every survived run hands out exactly one win in total
    let survived = runs.iter().filter(|r| r.survived).count() as f64;
    let credited: f64 = map.cells.iter().flatten().sum::<f64>() * 20.0 / 100.0;
    assert!((credited - survived).abs() < 1e-9);
}

#[test]
fn table_csv_is_stable() {
    let runs = vec![run([4, 1, 9, 0, 0], true, &[Role::Researcher], None), run([6, 3, 1, 0, 0], true, &[Role::Curator], None)];
    let agg = aggregate(&runs).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_table_csv(&[("x".into(), agg.clone())], &mut a).unwrap();
    write_table_csv(&[("x".into(), agg)], &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("experiment,persona,games,points_success_mean"));
    assert!(lines.next().unwrap().starts_with("x,a,2,5.000000,0.707107,5.000000,0.707107,"));
}

#[test]
fn group_comparisons_cover_shared_personas() {
    let a = vec![run([4, 1, 9, 0, 0], true, &[], None), run([6, 3, 1, 0, 0], true, &[], None), run([5, 2, 2, 1, 0], true, &[], None)];
    let b = vec![run([0, 1, 9, 0, 0], true, &[], None), run([1, 3, 1, 0, 0], true, &[], None), run([0, 2, 4, 1, 0], true, &[], None)];
    let cmp = compare_groups(&a, &b);
    assert_eq!(cmp.len(), 5 * 3);
    let pa = cmp.iter().find(|c| c.persona == "a" && c.metric == "points_all").unwrap();
    let direct = welch_p(&[4.0, 6.0, 5.0], &[0.0, 1.0, 0.0]).unwrap();
    assert_eq!(pa.p, Some(direct));
}
