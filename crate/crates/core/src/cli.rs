//! The `pom` command line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::agents::persona::load_personas;
use crate::experiments::{
    build_gateway, preset, preset_names, record_path, run_one, run_sweep, Backend, ExperimentConfig, ExperimentError,
};
use crate::game::{validate_event_deck, validate_pile, AccomplishmentCard, EventCard, GameConfig, Role};
use crate::gateway::{GatewayError, GatewayPolicy};
use crate::metrics::{
    aggregate, compare_groups, leader_heatmap, write_heatmap_csv, write_table_csv, Aggregate, AggregateError,
    RunMetrics,
};
use crate::orchestrator::{replay, validate_trace, RecordError, ReplayError, RunRecord, TraceError};
use crate::schema::{self, LoadError};

#[derive(Debug, Parser)]
#[command(name = "pom", version, about = "Port of Mars simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one game and write its log.
    Run(RunArgs),
    /// Play every repetition of an experiment.
    Sweep(SweepArgs),
    /// Tables, heatmaps and survival rates from a directory of logs.
    Analyze(AnalyzeArgs),
    /// Re-execute a log and check its digest chain.
    Replay(ReplayArgs),
    /// Check a config, deck, persona or log file.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Llm,
    Scripted,
    Mock,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Llm => Backend::Llm,
            BackendArg::Scripted => Backend::Scripted,
            BackendArg::Mock => Backend::Mock,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment file (JSON).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in experiment, e.g. svo-main.
    #[arg(long)]
    pub preset: Option<String>,
    /// Overrides the experiment's backend.
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Overrides the model name.
    #[arg(long)]
    pub model: Option<String>,
    /// Model calls allowed per minute, 0 for no limit.
    #[arg(long, default_value_t = 0)]
    pub rpm: u32,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Defaults to the experiment's base seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Overrides the number of repetitions.
    #[arg(long)]
    pub runs: Option<u32>,
    /// Overrides the base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Games played at once; defaults to the number of logical cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    Table,
    Heatmap,
    Survival,
    All,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory searched recursively for `*.jsonl` logs.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Where tables are written; defaults to the input directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub report: Report,
    /// Second log directory; adds per-persona Welch p-values (input vs this).
    #[arg(long)]
    pub against: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Experiment,
    Game,
    Personas,
    Events,
    Accomplishments,
    Record,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value = "experiment")]
    pub kind: Kind,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Invalid(String),
    #[error("backend unavailable: {0}")]
    Backend(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 usage, 3 invalid input, 4 backend, 5 replay or chain mismatch,
    /// 6 file system, 1 anything else.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Load(_) | CliError::Invalid(_) => 3,
            CliError::Backend(_) => 4,
            CliError::Mismatch(_) => 5,
            CliError::Io { .. } => 6,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> CliError {
        match e {
            ExperimentError::UnknownPreset(name) => {
                CliError::Usage(format!("unknown preset `{name}`; known: {}", preset_names().join(", ")))
            }
            ExperimentError::Invalid(m) => CliError::Invalid(m),
            ExperimentError::Load(e) => CliError::Load(e),
            ExperimentError::Backend(e) => CliError::Backend(e.to_string()),
            ExperimentError::Io { path, source } => CliError::Io { path, source },
            ExperimentError::Record(e) => e.into(),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<RecordError> for CliError {
    fn from(e: RecordError) -> CliError {
        match e {
            RecordError::ChainMismatch { .. } => CliError::Mismatch(e.to_string()),
            RecordError::Io { path, source } => CliError::Io {
                path: path.into(),
                source,
            },
            e => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<GatewayError> for CliError {
    fn from(e: GatewayError) -> CliError {
        CliError::Backend(e.to_string())
    }
}

impl From<AggregateError> for CliError {
    fn from(e: AggregateError) -> CliError {
        CliError::Failed(e.to_string())
    }
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn experiment(args: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        _ => return Err(CliError::Usage("give exactly one of --config or --preset".into())),
    };
    if let Some(b) = args.backend {
        cfg.backend = b.into();
    }
    if let Some(m) = &args.model {
        cfg.model = Some(m.clone());
    }
    Ok(cfg)
}

fn gateway_policy(args: &ExperimentArgs) -> GatewayPolicy {
    GatewayPolicy {
        requests_per_minute: args.rpm,
        ..GatewayPolicy::default()
    }
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = experiment(&args.experiment)?;
    cfg.validate()?;
    let seed = args.seed.unwrap_or(cfg.base_seed);
    let gateway = build_gateway(cfg.backend, gateway_policy(&args.experiment))?;
    let path = record_path(&args.experiment.out, &cfg.name, seed);
    let record = run_one(&cfg, seed, gateway.as_ref(), Some(&path))?;
    let o = record.outcome.as_ref().expect("finished record has an outcome");
    if let Some(err) = &o.error {
        return Err(CliError::Failed(format!("{}: game aborted: {err}", path.display())));
    }
    let m = o.metrics.as_ref().expect("complete record has metrics");
    writeln!(
        out,
        "{}: {} after {} rounds, health {}, winners {}",
        path.display(),
        if m.survived { "survived" } else { "collapsed" },
        m.rounds_played,
        m.final_health,
        roles(&m.winners)
    )
    .map_err(io(&path))
}

fn roles(rs: &[Role]) -> String {
    if rs.is_empty() {
        return "none".into();
    }
    rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = experiment(&args.experiment)?;
    if let Some(n) = args.runs {
        cfg.repetitions = n;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    cfg.validate()?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1);
    let gateway = build_gateway(cfg.backend, gateway_policy(&args.experiment))?;
    log::info!("sweep {}: {} runs on {jobs} workers", cfg.name, cfg.repetitions);
    let report = run_sweep(&cfg, &args.experiment.out, jobs, gateway.as_ref())?;
    let dir = args.experiment.out.join(&cfg.name);
    let w = |e| CliError::Io {
        path: dir.clone(),
        source: e,
    };
    writeln!(
        out,
        "{}: {} played, {} already present, {} failed",
        dir.display(),
        report.ran.len(),
        report.skipped.len(),
        report.failed.len()
    )
    .map_err(w)?;
    for (seed, why) in &report.failed {
        writeln!(out, "  seed {seed}: {why}").map_err(w)?;
    }
    if let Some(agg) = &report.aggregate {
        writeln!(out, "survival {}/{}", agg.survived, agg.runs).map_err(w)?;
    }
    if report.failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} runs did not finish", report.failed.len())))
    }
}

fn find_logs(dir: &Path, found: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io(dir))?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            find_logs(&path, found)?;
        } else if path.extension().is_some_and(|e| e == "jsonl") {
            found.push(path);
        }
    }
    Ok(())
}

/// Logs under `dir` grouped by experiment name; unfinished logs are counted
/// but not analysed.
struct Loaded {
    by_experiment: BTreeMap<String, Vec<(RunRecord, RunMetrics)>>,
    incomplete: usize,
}

fn load_dir(dir: &Path) -> Result<Loaded, CliError> {
    let mut paths = Vec::new();
    find_logs(dir, &mut paths)?;
    let mut loaded = Loaded {
        by_experiment: BTreeMap::new(),
        incomplete: 0,
    };
    for path in paths {
        let record = RunRecord::load(&path)?;
        match RunMetrics::from_record(&record) {
            Some(m) if record.is_complete() => loaded
                .by_experiment
                .entry(record.header.experiment.clone())
                .or_default()
                .push((record, m)),
            _ => loaded.incomplete += 1,
        }
    }
    for runs in loaded.by_experiment.values_mut() {
        runs.sort_by_key(|(r, _)| r.header.seed);
    }
    Ok(loaded)
}

fn leadership_of(record: &RunRecord) -> Option<String> {
    record
        .header
        .roster
        .iter()
        .find_map(|(_, p)| p.leadership_variant.map(|v| v.name().to_string()))
}

#[derive(Serialize)]
struct SurvivalRow<'a> {
    experiment: &'a str,
    runs: usize,
    survived: usize,
    survival_rate: f64,
    gini_mean: f64,
    gini_se: f64,
}

#[derive(Serialize)]
struct AnalysisSummary<'a> {
    incomplete: usize,
    experiments: BTreeMap<&'a str, &'a Aggregate>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(io(path))
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_dir(&args.input)?;
    if loaded.by_experiment.is_empty() {
        return Err(CliError::Invalid(format!("{}: no finished logs found", args.input.display())));
    }
    let dest = args.out.clone().unwrap_or_else(|| args.input.clone());
    fs::create_dir_all(&dest).map_err(io(&dest))?;
    let mut tables = Vec::new();
    for (name, runs) in &loaded.by_experiment {
        let metrics: Vec<RunMetrics> = runs.iter().map(|(_, m)| m.clone()).collect();
        tables.push((name.clone(), aggregate(&metrics)?));
    }
    let w = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    let want = |r: Report| args.report == r || args.report == Report::All;

    if want(Report::Table) {
        let mut buf = Vec::new();
        write_table_csv(&tables, &mut buf)?;
        write_file(&dest.join("table.csv"), &buf)?;
        out.write_all(&buf).map_err(w)?;
        let summary = AnalysisSummary {
            incomplete: loaded.incomplete,
            experiments: tables.iter().map(|(n, a)| (n.as_str(), a)).collect(),
        };
        let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
        write_file(&dest.join("summary.json"), json.as_bytes())?;
    }
    if want(Report::Survival) {
        let mut buf = Vec::new();
        {
            let mut csv = csv::Writer::from_writer(&mut buf);
            for (name, agg) in &tables {
                csv.serialize(SurvivalRow {
                    experiment: name,
                    runs: agg.runs,
                    survived: agg.survived,
                    survival_rate: agg.survival_rate,
                    gini_mean: agg.gini.mean,
                    gini_se: agg.gini.se,
                })
                .map_err(|e| CliError::Failed(e.to_string()))?;
            }
            csv.flush().map_err(io(&dest))?;
        }
        write_file(&dest.join("survival.csv"), &buf)?;
        out.write_all(&buf).map_err(w)?;
    }
    if want(Report::Heatmap) {
        let mut by_variant: BTreeMap<String, Vec<RunMetrics>> = BTreeMap::new();
        for runs in loaded.by_experiment.values() {
            for (record, m) in runs {
                if let Some(v) = leadership_of(record) {
                    by_variant.entry(v).or_default().push(m.clone());
                }
            }
        }
        if by_variant.is_empty() && args.report == Report::Heatmap {
            return Err(CliError::Invalid("no runs with a designated leader".into()));
        }
        for (variant, metrics) in &by_variant {
            let mut buf = Vec::new();
            write_heatmap_csv(&leader_heatmap(metrics), &mut buf)?;
            write_file(&dest.join(format!("heatmap-{variant}.csv")), &buf)?;
            writeln!(out, "leadership: {variant}").map_err(w)?;
            out.write_all(&buf).map_err(w)?;
        }
    }
    if let Some(other) = &args.against {
        let b = load_dir(other)?;
        let a: Vec<RunMetrics> = loaded.by_experiment.values().flatten().map(|(_, m)| m.clone()).collect();
        let b: Vec<RunMetrics> = b.by_experiment.values().flatten().map(|(_, m)| m.clone()).collect();
        let mut buf = Vec::new();
        {
            let mut csv = csv::Writer::from_writer(&mut buf);
            csv.write_record(["persona", "metric", "mean_a", "mean_b", "p"])
                .map_err(|e| CliError::Failed(e.to_string()))?;
            for c in compare_groups(&a, &b) {
                csv.write_record([
                    c.persona,
                    c.metric,
                    format!("{:.6}", c.mean_a),
                    format!("{:.6}", c.mean_b),
                    c.p.map(|p| format!("{p:.6}")).unwrap_or_default(),
                ])
                .map_err(|e| CliError::Failed(e.to_string()))?;
            }
            csv.flush().map_err(io(&dest))?;
        }
        write_file(&dest.join("compare.csv"), &buf)?;
        out.write_all(&buf).map_err(w)?;
    }
    Ok(())
}

fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let record = RunRecord::load(&args.input)?;
    validate_trace(&record).map_err(|e: TraceError| CliError::Mismatch(e.to_string()))?;
    match replay(&record) {
        Ok(report) => {
            writeln!(out, "OK, digests match ({} entries, head {})", report.entries, report.head)
                .map_err(io(&args.input))?;
            Ok(())
        }
        Err(ReplayError::Setup(e)) => Err(CliError::Invalid(e.to_string())),
        Err(e) => Err(CliError::Mismatch(format!("{}: {e}", args.input.display()))),
    }
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let path = &args.config;
    let invalid = |m: String| CliError::Load(LoadError::Invalid {
        path: path.clone(),
        message: m,
    });
    let what = match args.kind {
        Kind::Experiment => {
            let cfg = ExperimentConfig::load(path)?;
            format!("experiment `{}`, {} runs", cfg.name, cfg.repetitions)
        }
        Kind::Game => {
            GameConfig::load(path)?;
            "game config".to_string()
        }
        Kind::Personas => format!("{} personas", load_personas(path)?.len()),
        Kind::Events => {
            let deck: Vec<EventCard> = schema::load_json(path)?;
            validate_event_deck(&deck).map_err(|e| invalid(e.to_string()))?;
            format!("{} event cards", deck.len())
        }
        Kind::Accomplishments => {
            let piles: BTreeMap<Role, Vec<AccomplishmentCard>> = schema::load_json(path)?;
            for pile in piles.values() {
                validate_pile(pile).map_err(|e| invalid(e.to_string()))?;
            }
            format!("{} accomplishment piles", piles.len())
        }
        Kind::Record => {
            let record = RunRecord::load(path)?;
            record.verify_chain()?;
            validate_trace(&record).map_err(|e| CliError::Mismatch(e.to_string()))?;
            format!("log with {} entries", record.entries.len())
        }
    };
    writeln!(out, "{}: valid {what}", path.display()).map_err(io(path))
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Replay(a) => cmd_replay(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    }
}

/// Parse `args`, run, and map the result to an exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return ExitCode::from(code);
        }
    };
    match execute(&cli, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(e.code())
        }
    }
}
