use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{Backend, ExperimentConfig};
use super::ExperimentError;
use crate::agents::{Facilitator, Policy, ScriptedFacilitator, ScriptedPolicy};
use crate::gateway::{
    model_from_env, Gateway, GatewayPolicy, HttpProvider, LlmFacilitator, LlmPolicy, MockProvider, ModelSettings,
};
use crate::metrics::{aggregate, leader_heatmap, write_heatmap_csv, write_table_csv, Aggregate, RunMetrics};
use crate::orchestrator::{assign_roles, role_rng, run_game, BackendInfo, GameSetup, RecordWriter, RunRecord};
use crate::prompts::Prompter;

/// Generator for sampled rosters, separate from role assignment and play.
pub fn roster_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    rng
}

/// Gateway for backends that need one; `None` for scripted play.
pub fn build_gateway(backend: Backend, policy: GatewayPolicy) -> Result<Option<Gateway>, ExperimentError> {
    match backend {
        Backend::Scripted => Ok(None),
        Backend::Mock => Ok(Some(Gateway::new(Arc::new(MockProvider::builtin()), policy))),
        Backend::Llm => Ok(Some(Gateway::new(Arc::new(HttpProvider::from_env()?), policy))),
    }
}

fn model_name(cfg: &ExperimentConfig) -> String {
    cfg.model.clone().unwrap_or_else(model_from_env)
}

fn backend_info(cfg: &ExperimentConfig) -> BackendInfo {
    match cfg.backend {
        Backend::Scripted => BackendInfo::scripted(),
        b => BackendInfo {
            name: b.name().to_string(),
            model: Some(model_name(cfg)),
            temperature: Some(cfg.temperature),
        },
    }
}

/// Personas drawn and shuffled onto roles for one seed.
pub fn game_setup(cfg: &ExperimentConfig, seed: u64) -> Result<GameSetup, ExperimentError> {
    let personas = cfg.personas(&mut roster_rng(seed));
    let roster = assign_roles(&personas, &mut role_rng(seed))?;
    Ok(GameSetup {
        experiment: cfg.name.clone(),
        config: cfg.game.clone(),
        seed,
        roster,
        communication: cfg.communication,
        backend: backend_info(cfg),
    })
}

pub type Agents = (Vec<Box<dyn Policy>>, Box<dyn Facilitator>);

pub fn build_agents(cfg: &ExperimentConfig, setup: &GameSetup, gateway: Option<&Gateway>) -> Result<Agents, ExperimentError> {
    if cfg.backend == Backend::Scripted {
        let policies = setup
            .roster
            .iter()
            .map(|(_, p)| Box::new(ScriptedPolicy::new(p.scripted_angle())) as Box<dyn Policy>)
            .collect();
        return Ok((policies, Box::new(ScriptedFacilitator)));
    }
    let gateway = gateway
        .cloned()
        .ok_or_else(|| ExperimentError::Invalid(format!("backend {} needs a gateway", cfg.backend)))?;
    let prompter = Arc::new(Prompter::default());
    let settings = ModelSettings {
        model: model_name(cfg),
        temperature: cfg.temperature,
        run_id: format!("{}/{}", cfg.name, setup.seed),
        ..ModelSettings::default()
    };
    let policies = setup
        .roster
        .iter()
        .map(|_| Box::new(LlmPolicy::new(gateway.clone(), prompter.clone(), settings.clone())) as Box<dyn Policy>)
        .collect();
    let facilitator = LlmFacilitator::new(gateway, prompter, settings);
    Ok((policies, Box::new(facilitator)))
}

/// Play one seed, streaming the record to `path` when given.
pub fn run_one(
    cfg: &ExperimentConfig,
    seed: u64,
    gateway: Option<&Gateway>,
    path: Option<&Path>,
) -> Result<RunRecord, ExperimentError> {
    let setup = game_setup(cfg, seed)?;
    let (mut policies, mut facilitator) = build_agents(cfg, &setup, gateway)?;
    let mut writer = path.map(RecordWriter::create).transpose()?;
    Ok(run_game(&setup, &mut policies, facilitator.as_mut(), writer.as_mut())?)
}

pub fn record_path(out: &Path, experiment: &str, seed: u64) -> PathBuf {
    out.join(experiment).join(format!("{seed}.jsonl"))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub ran: Vec<u64>,
    pub skipped: Vec<u64>,
    /// Seeds whose game did not finish, with the reason.
    pub failed: Vec<(u64, String)>,
    pub aggregate: Option<Aggregate>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a ExperimentConfig,
    runs: usize,
    failed: &'a [(u64, String)],
    aggregate: &'a Option<Aggregate>,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Run every repetition not already on disk, then write `aggregate.csv`,
/// `summary.json` and, with a leader, `heatmap.csv` next to the logs.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    out: &Path,
    jobs: usize,
    gateway: Option<&Gateway>,
) -> Result<SweepReport, ExperimentError> {
    cfg.validate()?;
    let dir = out.join(&cfg.name);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut report = SweepReport::default();
    let mut todo = Vec::new();
    for seed in cfg.seeds() {
        if record_path(out, &cfg.name, seed).exists() {
            report.skipped.push(seed);
        } else {
            todo.push(seed);
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ExperimentError::Invalid(format!("worker pool: {e}")))?;
    let results: Vec<(u64, Result<Option<String>, ExperimentError>)> = pool.install(|| {
        todo.par_iter()
            .map(|&seed| {
                let done = record_path(out, &cfg.name, seed);
                let partial = done.with_extension("jsonl.partial");
                let result = run_one(cfg, seed, gateway, Some(&partial)).and_then(|record| {
                    if record.is_complete() {
                        fs::rename(&partial, &done).map_err(io_err(&done))?;
                        Ok(None)
                    } else {
                        let why = record
                            .outcome
                            .as_ref()
                            .and_then(|o| o.error.clone())
                            .unwrap_or_else(|| "incomplete".to_string());
                        Ok(Some(why))
                    }
                });
                (seed, result)
            })
            .collect()
    });
    for (seed, result) in results {
        match result {
            Ok(None) => report.ran.push(seed),
            Ok(Some(why)) => report.failed.push((seed, why)),
            Err(e @ (ExperimentError::Io { .. } | ExperimentError::Record(_))) => return Err(e),
            Err(e) => report.failed.push((seed, e.to_string())),
        }
    }

    let mut metrics = Vec::new();
    for seed in cfg.seeds() {
        let path = record_path(out, &cfg.name, seed);
        if path.exists() {
            let record = RunRecord::load(&path)?;
            if let Some(m) = RunMetrics::from_record(&record) {
                metrics.push(m);
            }
        }
    }
    if !metrics.is_empty() {
        let agg = aggregate(&metrics)?;
        let csv = dir.join("aggregate.csv");
        write_table_csv(&[(cfg.name.clone(), agg.clone())], fs::File::create(&csv).map_err(io_err(&csv))?)?;
        if cfg.leadership.is_some() {
            let heat = dir.join("heatmap.csv");
            write_heatmap_csv(&leader_heatmap(&metrics), fs::File::create(&heat).map_err(io_err(&heat))?)?;
        }
        report.aggregate = Some(agg);
    }
    let summary = Summary {
        experiment: cfg,
        runs: metrics.len(),
        failed: &report.failed,
        aggregate: &report.aggregate,
    };
    let json = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&json, text + "\n").map_err(io_err(&json))?;
    Ok(report)
}
