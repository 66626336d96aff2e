use featnav_bench::experiment::{self, CellClass, MetricsRecord, SweepSpec};
use featnav_bench::{plots, FrameSnapshot, RunConfig};
use featnav_core::sim::{Mode, PoseFeedback, ScenarioKind, TrajectoryLog};
use featnav_core::Vec2;

fn small_run(dir: &std::path::Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.scenario.kind = ScenarioKind::CorridorGap;
    cfg.mode = Mode::ActiveAutotune;
    cfg.trials = 3;
    cfg.out = dir.to_path_buf();
    cfg
}

#[test]
fn metrics_file_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_run(tmp.path());
    let trials = experiment::run_trials(&cfg).unwrap();
    let files = experiment::write_run(&cfg, &trials).unwrap();
    let loaded = MetricsRecord::load(&files.metrics).unwrap();
    assert_eq!(loaded, MetricsRecord::from_trials(&cfg, &trials));
    assert_eq!(loaded.trial.len(), 3);
    assert_eq!(files.logs.len(), 3);
    assert!(files.plot.exists());
    let reloaded = RunConfig::load(&tmp.path().join("config.toml")).unwrap();
    assert_eq!(reloaded, cfg);
}

#[test]
fn aggregate_recomputes_from_logs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_run(tmp.path());
    let trials = experiment::run_trials(&cfg).unwrap();
    let files = experiment::write_run(&cfg, &trials).unwrap();
    let record = MetricsRecord::load(&files.metrics).unwrap();
    let (len, dist, loc) = experiment::recompute_from_logs(&files.metrics).unwrap();
    let agg = record.aggregate;
    for (a, b) in [
        (len.mean, agg.path_length.mean),
        (len.std, agg.path_length.std),
        (dist.mean, agg.final_distance.mean),
        (dist.std, agg.final_distance.std),
        (loc.mean, agg.localized_fraction.mean),
        (loc.std, agg.localized_fraction.std),
    ] {
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut base = small_run(tmp.path());
    base.sim.feedback = PoseFeedback::MotionCapture;
    let spec = SweepSpec {
        lambdas: vec![0.2, 0.9],
        thetas_deg: vec![20.0, 90.0],
        trials: 2,
    };
    let mut narrow = base.clone();
    narrow.workers = 1;
    let mut wide = base.clone();
    wide.workers = 4;
    assert_eq!(
        experiment::run_sweep(&spec, &narrow).unwrap(),
        experiment::run_sweep(&spec, &wide).unwrap()
    );
    let a = experiment::run_trials(&narrow).unwrap();
    let b = experiment::run_trials(&wide).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.episode.log, y.episode.log);
    }
}

#[test]
fn sweep_writes_table_csv_and_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let mut base = small_run(tmp.path());
    base.sim.feedback = PoseFeedback::MotionCapture;
    base.scenario.seed = 7;
    let spec = SweepSpec {
        lambdas: vec![0.9],
        thetas_deg: vec![60.0],
        trials: 1,
    };
    let result = experiment::run_sweep(&spec, &base).unwrap();
    assert_eq!(result.cells.len(), 1);
    assert_eq!(result.cell(0, 0).class, CellClass::GoalOnly);
    let files = experiment::write_sweep(tmp.path(), &result).unwrap();
    assert!(files.iter().all(|p| p.exists()));
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn field_map_of_empty_frame_renders() {
    let cfg = RunConfig::default();
    let setup = cfg.setup(0);
    let snap: FrameSnapshot = toml::from_str("features = []\ngoal = [1.0, 0.0]").unwrap();
    let map = snap.field_map(&setup.rig, &setup.field, 72, 48).unwrap();
    assert!(map.charges.is_empty());
    assert!(map.cells.iter().all(|c| c.force.norm() == 0.0));
    let k = setup.rig.intrinsics;
    let svg = plots::field_map(&map, Vec2::new(k.width, k.height), setup.rig.optical_center(), snap.goal_dir());
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("NaN"));
}

#[test]
fn lambda_trace_rejects_empty_log() {
    assert!(experiment::lambda_trace(&TrajectoryLog::default()).is_err());
}

#[test]
fn lambda_trace_follows_the_log() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_run(tmp.path());
    cfg.trials = 1;
    let trials = experiment::run_trials(&cfg).unwrap();
    let log = &trials[0].episode.log;
    let trace = experiment::lambda_trace(log).unwrap();
    assert_eq!(trace.len(), log.len());
    assert!(trace.windows(2).all(|w| w[0].0 < w[1].0));
    let csv = experiment::lambda_trace_csv(&trace).unwrap();
    assert_eq!(csv.lines().count(), trace.len() + 1);
}
