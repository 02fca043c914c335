//! Tables over many games: per-persona means with standard errors,
//! survival, leader-by-winner breakdowns and group comparisons.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::run::{RunMetrics, TradeCounts};
use super::stats::{dirty_pct, mean, std_error, welch_p, StatsError};

#[derive(Debug, Error)]
pub enum AggregateError {
    #[error("no runs to aggregate")]
    Empty,
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("cannot write table: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write table: {0}")]
    Csv(#[from] csv::Error),
}

/// Mean and standard error of a sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn of(xs: &[f64]) -> Estimate {
        if xs.is_empty() {
            return Estimate::default();
        }
        Estimate {
            mean: mean(xs),
            se: std_error(xs),
            n: xs.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersonaRow {
    pub persona: String,
    /// Player-games played by this persona.
    pub games: usize,
    /// Points in games where the Port survived.
    pub points_success: Estimate,
    /// Points over all games, collapses counting as zero.
    pub points_all: Estimate,
    /// Pooled share of affordable dirty cards that were claimed.
    pub dirty_pct: Option<f64>,
    pub dirty_claims: u32,
    pub dirty_opportunities: u32,
    /// Health spend per round played.
    pub health_per_round: Estimate,
    /// Health spend per game.
    pub health_spend: Estimate,
    pub trades: TradeCounts,
    pub proposals_rejected: u32,
    /// Wins credited to this persona; a shared win counts 1/k.
    pub wins: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub survived: usize,
    pub survival_rate: f64,
    pub gini: Estimate,
    pub group_health_spend: Estimate,
    /// Sorted by mean all-games points, highest first.
    pub rows: Vec<PersonaRow>,
}

pub fn aggregate(runs: &[RunMetrics]) -> Result<Aggregate, AggregateError> {
    if runs.is_empty() {
        return Err(AggregateError::Empty);
    }
    #[derive(Default)]
    struct Acc {
        success: Vec<f64>,
        all: Vec<f64>,
        per_round: Vec<f64>,
        spend: Vec<f64>,
        claims: u32,
        opps: u32,
        trades: TradeCounts,
        rejected: u32,
        wins: f64,
    }
    let mut acc: BTreeMap<String, Acc> = BTreeMap::new();
    for run in runs {
        let share = if run.winners.is_empty() {
            0.0
        } else {
            1.0 / run.winners.len() as f64
        };
        for p in &run.players {
            let a = acc.entry(p.persona_id.clone()).or_default();
            if run.survived {
                a.success.push(p.points as f64);
            }
            a.all.push(p.points_all as f64);
            a.spend.push(p.health_spend as f64);
            if run.rounds_played > 0 {
                a.per_round.push(p.health_spend as f64 / run.rounds_played as f64);
            }
            a.claims += p.dirty_claims;
            a.opps += p.dirty_opportunities;
            a.trades.fair += p.trades.fair;
            a.trades.generous += p.trades.generous;
            a.trades.selfish += p.trades.selfish;
            a.rejected += p.proposals_rejected;
            if run.winners.contains(&p.role) {
                a.wins += share;
            }
        }
    }
    let mut rows = Vec::with_capacity(acc.len());
    for (persona, a) in acc {
        rows.push(PersonaRow {
            games: a.all.len(),
            points_success: Estimate::of(&a.success),
            points_all: Estimate::of(&a.all),
            dirty_pct: dirty_pct(a.claims, a.opps)?,
            dirty_claims: a.claims,
            dirty_opportunities: a.opps,
            health_per_round: Estimate::of(&a.per_round),
            health_spend: Estimate::of(&a.spend),
            trades: a.trades,
            proposals_rejected: a.rejected,
            wins: a.wins,
            persona,
        });
    }
    rows.sort_by(|a, b| {
        b.points_all
            .mean
            .total_cmp(&a.points_all.mean)
            .then_with(|| a.persona.cmp(&b.persona))
    });
    let survived = runs.iter().filter(|r| r.survived).count();
    let ginis: Vec<f64> = runs.iter().map(|r| r.gini).collect();
    let spend: Vec<f64> = runs.iter().map(|r| r.total_health_spend as f64).collect();
    Ok(Aggregate {
        runs: runs.len(),
        survived,
        survival_rate: survived as f64 / runs.len() as f64,
        gini: Estimate::of(&ginis),
        group_health_spend: Estimate::of(&spend),
        rows,
    })
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

pub const TABLE_COLUMNS: [&str; 18] = [
    "experiment",
    "persona",
    "games",
    "points_success_mean",
    "points_success_se",
    "points_all_mean",
    "points_all_se",
    "dirty_pct",
    "dirty_claims",
    "dirty_opportunities",
    "health_per_round_mean",
    "health_per_round_se",
    "health_spend_mean",
    "trades_fair",
    "trades_generous",
    "trades_selfish",
    "proposals_rejected",
    "wins",
];

/// One row per persona per experiment, each experiment's rows highest mean
/// points first.
pub fn write_table_csv<W: Write>(tables: &[(String, Aggregate)], out: W) -> Result<(), AggregateError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_COLUMNS)?;
    for (experiment, r) in tables.iter().flat_map(|(e, a)| a.rows.iter().map(move |r| (e, r))) {
        w.write_record([
            experiment.clone(),
            r.persona.clone(),
            r.games.to_string(),
            fmt(r.points_success.mean),
            fmt(r.points_success.se),
            fmt(r.points_all.mean),
            fmt(r.points_all.se),
            r.dirty_pct.map(fmt).unwrap_or_default(),
            r.dirty_claims.to_string(),
            r.dirty_opportunities.to_string(),
            fmt(r.health_per_round.mean),
            fmt(r.health_per_round.se),
            fmt(r.health_spend.mean),
            r.trades.fair.to_string(),
            r.trades.generous.to_string(),
            r.trades.selfish.to_string(),
            r.proposals_rejected.to_string(),
            fmt(r.wins),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Percentage of runs (per leader) won by each persona.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub leaders: Vec<String>,
    pub winners: Vec<String>,
    /// `cells[i][j]`: percent of runs led by `leaders[i]` won by `winners[j]`.
    pub cells: Vec<Vec<f64>>,
    pub runs: Vec<usize>,
}

pub fn leader_heatmap(runs: &[RunMetrics]) -> Heatmap {
    let mut winners: Vec<String> = runs
        .iter()
        .flat_map(|r| r.players.iter().map(|p| p.persona_id.clone()))
        .collect();
    winners.sort();
    winners.dedup();
    let mut by_leader: BTreeMap<String, (usize, Vec<f64>)> = BTreeMap::new();
    for run in runs {
        let Some(leader) = &run.leader else { continue };
        let row = by_leader
            .entry(leader.clone())
            .or_insert_with(|| (0, vec![0.0; winners.len()]));
        row.0 += 1;
        if run.winners.is_empty() {
            continue;
        }
        let share = 1.0 / run.winners.len() as f64;
        for p in run.players.iter().filter(|p| run.winners.contains(&p.role)) {
            let j = winners.binary_search(&p.persona_id).expect("persona listed");
            row.1[j] += share;
        }
    }
    let mut leaders = Vec::new();
    let mut cells = Vec::new();
    let mut counts = Vec::new();
    for (leader, (n, wins)) in by_leader {
        leaders.push(leader);
        cells.push(wins.iter().map(|w| 100.0 * w / n as f64).collect());
        counts.push(n);
    }
    Heatmap {
        leaders,
        winners,
        cells,
        runs: counts,
    }
}

pub fn write_heatmap_csv<W: Write>(map: &Heatmap, out: W) -> Result<(), AggregateError> {
    let mut w = csv::Writer::from_writer(out);
    let mut head = vec!["leader".to_string(), "runs".to_string()];
    head.extend(map.winners.iter().map(|p| format!("won_{p}")));
    w.write_record(&head)?;
    for (i, leader) in map.leaders.iter().enumerate() {
        let mut row = vec![leader.clone(), map.runs[i].to_string()];
        row.extend(map.cells[i].iter().map(|c| format!("{c:.2}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Two-sided Welch p-value for one persona and metric across two groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub persona: String,
    pub metric: String,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `None` when the samples are too small or both constant.
    pub p: Option<f64>,
}

fn samples(runs: &[RunMetrics], persona: &str, metric: &str) -> Vec<f64> {
    runs.iter()
        .flat_map(|r| {
            r.players.iter().filter(|p| p.persona_id == persona).filter_map(move |p| match metric {
                "points_all" => Some(p.points_all as f64),
                "health_per_round" if r.rounds_played > 0 => Some(p.health_spend as f64 / r.rounds_played as f64),
                "dirty_pct" => dirty_pct(p.dirty_claims, p.dirty_opportunities).ok().flatten(),
                _ => None,
            })
        })
        .collect()
}

pub const COMPARED_METRICS: [&str; 3] = ["points_all", "health_per_round", "dirty_pct"];

/// Compare every persona present in both groups on each metric.
pub fn compare_groups(a: &[RunMetrics], b: &[RunMetrics]) -> Vec<Comparison> {
    let personas = |runs: &[RunMetrics]| -> Vec<String> {
        let mut v: Vec<String> = runs
            .iter()
            .flat_map(|r| r.players.iter().map(|p| p.persona_id.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let pb = personas(b);
    let mut out = Vec::new();
    for persona in personas(a).into_iter().filter(|p| pb.contains(p)) {
        for metric in COMPARED_METRICS {
            let xa = samples(a, &persona, metric);
            let xb = samples(b, &persona, metric);
            out.push(Comparison {
                persona: persona.clone(),
                metric: metric.to_string(),
                mean_a: if xa.is_empty() { f64::NAN } else { mean(&xa) },
                mean_b: if xb.is_empty() { f64::NAN } else { mean(&xb) },
                p: welch_p(&xa, &xb).ok(),
            });
        }
    }
    out
}
