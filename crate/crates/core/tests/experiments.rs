use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use pom_core::agents::persona::{LeadershipVariant, PersonaKind};
use pom_core::experiments::{game_setup, preset, preset_names, record_path, run_sweep, Backend, ExperimentConfig, RosterSpec};
use pom_core::orchestrator::RunRecord;

fn angles(cfg: &ExperimentConfig) -> Vec<f64> {
    let RosterSpec::Fixed { personas } = &cfg.roster else { panic!("{} is sampled", cfg.name) };
    personas.iter().map(|p| p.angle().unwrap()).collect()
}

#[test]
fn presets_match_golden_snapshots() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/presets");
    let update = std::env::var_os("POM_UPDATE_GOLDEN").is_some();
    let names = preset_names();
    assert_eq!(names.len(), 21);
    for name in &names {
        let text = serde_json::to_string_pretty(&preset(name).unwrap()).unwrap() + "\n";
        let path = dir.join(format!("{name}.json"));
        if update {
            fs::write(&path, &text).unwrap();
        } else {
            assert_eq!(text, fs::read_to_string(&path).unwrap(), "{name}");
        }
    }
}

#[test]
fn preset_settings() {
    let main = preset("svo-main").unwrap();
    assert_eq!(angles(&main), [-15.0, 0.0, 15.0, 30.0, 60.0]);
    assert!(main.communication);
    assert!(main.leadership.is_none());
    assert_eq!(main.repetitions, 50);

    let quiet = preset("svo-no-meeting").unwrap();
    assert!(!quiet.communication);
    assert_eq!(quiet.roster, main.roster);

    assert_eq!(angles(&preset("svo-low").unwrap()), [-30.0, -15.0, 0.0, 15.0, 60.0]);

    for (variant, v) in [("vanilla", LeadershipVariant::Vanilla), ("announce", LeadershipVariant::Announce), ("unaware", LeadershipVariant::Unaware)] {
        for (slug, angle) in [("neg15", -15.0), ("0", 0.0), ("15", 15.0), ("30", 30.0), ("60", 60.0)] {
            let cfg = preset(&format!("leadership-{variant}-{slug}")).unwrap();
            assert_eq!(cfg.repetitions, 50);
            assert_eq!(cfg.roster, main.roster);
            let l = cfg.leadership.as_ref().unwrap();
            assert_eq!(l.variant, v);
            let personas = cfg.personas(&mut pom_core::experiments::sweep::roster_rng(0));
            let leaders: Vec<_> = personas.iter().filter(|p| p.leader).collect();
            assert_eq!(leaders.len(), 1);
            assert_eq!(leaders[0].angle(), Some(angle));
            assert_eq!(leaders[0].leadership_variant, Some(v));
        }
    }

    for name in ["forward-continuity-selfish", "forward-continuity-cooperative"] {
        let cfg = preset(name).unwrap();
        let RosterSpec::Fixed { personas } = &cfg.roster else { panic!() };
        assert_eq!(personas.len(), 5);
        assert!(personas.iter().all(|p| p == &personas[0]));
        assert!(matches!(personas[0].kind, PersonaKind::Traits { .. }));
    }

    let pc = preset("pattern-correspondence").unwrap();
    let RosterSpec::Sample { pool, size } = &pc.roster else { panic!() };
    assert_eq!((pool.len(), *size), (4, 5));
    assert!(pool.iter().all(|p| matches!(p.kind, PersonaKind::Cultural { .. })));
    assert!(preset("svo-main-typo").is_err());
}

#[test]
fn sampled_rosters_vary_by_seed_and_repeat_for_the_same_seed() {
    let cfg = preset("pattern-correspondence").unwrap();
    let ids = |seed| -> Vec<String> { game_setup(&cfg, seed).unwrap().roster.iter().map(|(_, p)| p.id.clone()).collect() };
    let distinct: BTreeSet<Vec<String>> = (0..20).map(ids).collect();
    assert!(distinct.len() > 1);
    assert_eq!(ids(7), ids(7));
}

fn small(name: &str, reps: u32) -> ExperimentConfig {
    let mut cfg = preset(name).unwrap();
    cfg.backend = Backend::Scripted;
    cfg.repetitions = reps;
    cfg.base_seed = 100;
    cfg
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn sweep_writes_one_log_per_seed_and_resumes() {
    let out = tempfile::tempdir().unwrap();
    let cfg = small("svo-main", 6);
    let first = run_sweep(&cfg, out.path(), 3, None).unwrap();
    assert_eq!(first.ran, (100..106).collect::<Vec<_>>());
    assert!(first.skipped.is_empty() && first.failed.is_empty());
    let dir = out.path().join("svo-main");
    let seeds: BTreeSet<u64> = (100..106)
        .map(|s| RunRecord::load(&record_path(out.path(), "svo-main", s)).unwrap().header.seed)
        .collect();
    assert_eq!(seeds.len(), 6);
    let csv = read(&dir.join("aggregate.csv"));
    let summary = read(&dir.join("summary.json"));
    assert!(!dir.join("heatmap.csv").exists());

    let again = run_sweep(&cfg, out.path(), 3, None).unwrap();
    assert!(again.ran.is_empty());
    assert_eq!(again.skipped.len(), 6);
    assert_eq!(read(&dir.join("aggregate.csv")), csv);
    assert_eq!(read(&dir.join("summary.json")), summary);

    // an interrupted run leaves only a partial file behind
    let victim = record_path(out.path(), "svo-main", 103);
    let before = read(&victim);
    fs::remove_file(&victim).unwrap();
    fs::write(victim.with_extension("jsonl.partial"), "{\"truncated\"").unwrap();
    let resumed = run_sweep(&cfg, out.path(), 2, None).unwrap();
    assert_eq!(resumed.ran, vec![103]);
    assert_eq!(read(&victim), before);
    assert!(!victim.with_extension("jsonl.partial").exists());
    assert_eq!(read(&dir.join("aggregate.csv")), csv);
}

#[test]
fn worker_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = small("leadership-announce-30", 5);
    run_sweep(&cfg, a.path(), 1, None).unwrap();
    run_sweep(&cfg, b.path(), 4, None).unwrap();
    for file in ["aggregate.csv", "heatmap.csv", "summary.json", "102.jsonl"] {
        let name = &cfg.name;
        assert_eq!(read(&a.path().join(name).join(file)), read(&b.path().join(name).join(file)), "{file}");
    }
}

#[test]
fn llm_sweep_without_gateway_reports_failures() {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = small("svo-main", 2);
    cfg.backend = Backend::Mock;
    let report = run_sweep(&cfg, out.path(), 1, None).unwrap();
    assert_eq!(report.failed.len(), 2);
    assert!(report.aggregate.is_none());
}

#[test]
fn config_files_round_trip_and_reject_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.json");
    let cfg = small("svo-low", 3);
    fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
    let mut v = serde_json::to_value(&cfg).unwrap();
    v["repetitons"] = 3.into();
    fs::write(&path, v.to_string()).unwrap();
    let err = ExperimentConfig::load(&path).unwrap_err().to_string();
    assert!(err.contains("repetitons"), "{err}");
}
