//! Trials, aggregate statistics and the λ × θ̂_cs sweep.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use featnav_core::sim::{make_scenario_with, run_episode, Episode, EpisodeMetrics, Mode, TrajectoryLog, WorldScenario};
use featnav_core::Vec2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::plots;

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub world: WorldScenario,
    pub episode: Episode,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("cannot start worker pool")
}

pub fn run_trial(cfg: &RunConfig, index: usize) -> Result<Trial> {
    let setup = cfg.setup(index);
    let world = make_scenario_with(cfg.scenario.kind, setup.seed, &cfg.layout);
    let episode = run_episode(&world, &setup).with_context(|| format!("trial {index}"))?;
    Ok(Trial {
        index,
        seed: setup.seed,
        world,
        episode,
    })
}

/// Runs every trial of `cfg` on a pool of `cfg.workers` threads, in trial order.
pub fn run_trials(cfg: &RunConfig) -> Result<Vec<Trial>> {
    cfg.validate()?;
    pool(cfg.workers)?.install(|| (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} ± {:.3}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub path_length: Stat,
    pub final_distance: Stat,
    pub localized_fraction: Stat,
    pub overhead_ratio: Stat,
    pub goal_success_rate: f64,
    pub localization_success_rate: f64,
    pub stalled_trials: usize,
}

pub fn aggregate(metrics: &[EpisodeMetrics]) -> Aggregate {
    let col = |f: fn(&EpisodeMetrics) -> f64| metrics.iter().map(f).collect::<Vec<_>>();
    let n = metrics.len();
    let rate = |f: fn(&EpisodeMetrics) -> bool| metrics.iter().filter(|m| f(m)).count() as f64 / n.max(1) as f64;
    Aggregate {
        trials: n,
        path_length: Stat::of(&col(|m| m.path_length)),
        final_distance: Stat::of(&col(|m| m.final_distance)),
        localized_fraction: Stat::of(&col(|m| m.localized_fraction)),
        overhead_ratio: Stat::of(&col(|m| m.overhead_ratio)),
        goal_success_rate: rate(|m| m.goal_success),
        localization_success_rate: rate(|m| m.localization_success),
        stalled_trials: metrics.iter().filter(|m| m.stalled).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    /// Trajectory CSV, relative to the metrics file.
    pub log: String,
    pub metrics: EpisodeMetrics,
}

/// Contents of `metrics.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub scenario: String,
    pub mode: String,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    pub aggregate: Aggregate,
    pub trial: Vec<TrialRecord>,
}

impl MetricsRecord {
    pub fn from_trials(cfg: &RunConfig, trials: &[Trial]) -> Self {
        let metrics: Vec<_> = trials.iter().map(|t| t.episode.metrics.clone()).collect();
        let (start, goal) = trials
            .first()
            .map(|t| (t.world.start, t.world.goal))
            .unwrap_or((Vec2::zero(), Vec2::zero()));
        Self {
            scenario: cfg.scenario.kind.to_string(),
            mode: cfg.mode.to_string(),
            start: [start.x, start.y],
            goal: [goal.x, goal.y],
            aggregate: aggregate(&metrics),
            trial: trials
                .iter()
                .map(|t| TrialRecord {
                    index: t.index,
                    seed: t.seed,
                    log: trial_log_name(t.index),
                    metrics: t.episode.metrics.clone(),
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metrics serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
    }
}

pub fn trial_log_name(index: usize) -> String {
    format!("trial_{index:03}.csv")
}

/// Path length, final distance and localized fraction from a trajectory log alone.
pub fn log_summary(log: &TrajectoryLog, start: Vec2<f64>, goal: Vec2<f64>) -> (f64, f64, f64) {
    let mut prev = start;
    let mut length = 0.0;
    for r in &log.records {
        length += (r.true_pose - prev).norm();
        prev = r.true_pose;
    }
    let lost = log.records.iter().filter(|r| r.lost).count();
    let localized = if log.is_empty() { 1.0 } else { 1.0 - lost as f64 / log.len() as f64 };
    (length, (goal - prev).norm(), localized)
}

/// Rebuilds the path-length, final-distance and localized-fraction statistics
/// from the per-trial CSVs listed in a metrics file.
pub fn recompute_from_logs(metrics_path: &Path) -> Result<(Stat, Stat, Stat)> {
    let record = MetricsRecord::load(metrics_path)?;
    let dir = metrics_path.parent().unwrap_or(Path::new("."));
    let start = Vec2::new(record.start[0], record.start[1]);
    let goal = Vec2::new(record.goal[0], record.goal[1]);
    let (mut len, mut dist, mut loc) = (Vec::new(), Vec::new(), Vec::new());
    for t in &record.trial {
        let path = dir.join(&t.log);
        let file = fs::File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
        let log = TrajectoryLog::read_csv(file).with_context(|| format!("cannot parse {}", path.display()))?;
        let (l, d, f) = log_summary(&log, start, goal);
        len.push(l);
        dist.push(d);
        loc.push(f);
    }
    Ok((Stat::of(&len), Stat::of(&dist), Stat::of(&loc)))
}

/// Files written by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub metrics: PathBuf,
    pub plot: PathBuf,
    pub logs: Vec<PathBuf>,
}

pub fn write_run(cfg: &RunConfig, trials: &[Trial]) -> Result<RunArtifacts> {
    let dir = cfg.out.clone();
    fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    write_file(&dir.join("config.toml"), &cfg.to_toml())?;
    let mut logs = Vec::new();
    for t in trials {
        let path = dir.join(trial_log_name(t.index));
        let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        t.episode
            .log
            .write_csv(std::io::BufWriter::new(file))
            .with_context(|| format!("cannot write {}", path.display()))?;
        logs.push(path);
    }
    let metrics = dir.join("metrics.toml");
    write_file(&metrics, &MetricsRecord::from_trials(cfg, trials).to_toml())?;
    let plot = dir.join("trajectories.svg");
    write_file(&plot, &plots::trajectories(trials))?;
    Ok(RunArtifacts { dir, metrics, plot, logs })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lambdas: Vec<f64>,
    pub thetas_deg: Vec<f64>,
    pub trials: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            lambdas: (1..=9).map(|i| f64::from(i) / 10.0).collect(),
            thetas_deg: (1..=12).map(|i| f64::from(i) * 10.0).collect(),
            trials: 1,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.thetas_deg.is_empty() {
            bail!("sweep value lists must be non-empty");
        }
        if self.trials == 0 {
            bail!("sweep trials must be at least 1");
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            bail!("sweep lambda {l} is outside [0, 1]");
        }
        if let Some(t) = self.thetas_deg.iter().find(|t| !(**t >= 0.0 && **t < 360.0)) {
            bail!("sweep theta_cs_deg {t} is outside [0, 360)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellClass {
    #[serde(rename = "G&L")]
    GoalAndLocalization,
    #[serde(rename = "G")]
    GoalOnly,
    #[serde(rename = "L")]
    LocalizationOnly,
    #[serde(rename = "neither")]
    Neither,
}

impl CellClass {
    const ORDER: [CellClass; 4] = [
        CellClass::GoalAndLocalization,
        CellClass::GoalOnly,
        CellClass::LocalizationOnly,
        CellClass::Neither,
    ];

    pub fn of(m: &EpisodeMetrics) -> Self {
        match (m.goal_success, m.localization_success) {
            (true, true) => CellClass::GoalAndLocalization,
            (true, false) => CellClass::GoalOnly,
            (false, true) => CellClass::LocalizationOnly,
            (false, false) => CellClass::Neither,
        }
    }

    /// Most frequent class; ties go to the earlier of G&L, G, L, neither.
    pub fn majority(classes: &[CellClass]) -> Self {
        let count = |c: CellClass| classes.iter().filter(|&&x| x == c).count();
        let mut best = CellClass::Neither;
        let mut best_n = 0;
        for c in Self::ORDER {
            let n = count(c);
            if n > best_n {
                best = c;
                best_n = n;
            }
        }
        best
    }

    pub fn label(self) -> &'static str {
        match self {
            CellClass::GoalAndLocalization => "G&L",
            CellClass::GoalOnly => "G",
            CellClass::LocalizationOnly => "L",
            CellClass::Neither => "neither",
        }
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lambda: f64,
    pub theta_cs_deg: f64,
    pub class: CellClass,
    pub goal_rate: f64,
    pub localization_rate: f64,
}

impl SweepCell {
    pub fn from_metrics(lambda: f64, theta_cs_deg: f64, metrics: &[EpisodeMetrics]) -> Self {
        let classes: Vec<_> = metrics.iter().map(CellClass::of).collect();
        let n = metrics.len().max(1) as f64;
        Self {
            lambda,
            theta_cs_deg,
            class: CellClass::majority(&classes),
            goal_rate: metrics.iter().filter(|m| m.goal_success).count() as f64 / n,
            localization_rate: metrics.iter().filter(|m| m.localization_success).count() as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Row-major: λ outer, θ̂_cs inner.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, lambda_idx: usize, theta_idx: usize) -> &SweepCell {
        &self.cells[lambda_idx * self.spec.thetas_deg.len() + theta_idx]
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:>6}", "λ\\θ");
        for t in &self.spec.thetas_deg {
            out.push_str(&format!("{t:>8}"));
        }
        out.push('\n');
        for (i, l) in self.spec.lambdas.iter().enumerate() {
            out.push_str(&format!("{l:>6}"));
            for j in 0..self.spec.thetas_deg.len() {
                out.push_str(&format!("{:>8}", self.cell(i, j).class.label()));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lambda", "theta_cs_deg", "class", "goal_rate", "localization_rate"])?;
        for c in &self.cells {
            w.write_record([
                c.lambda.to_string(),
                c.theta_cs_deg.to_string(),
                c.class.label().to_string(),
                c.goal_rate.to_string(),
                c.localization_rate.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Runs every (λ, θ̂_cs) cell with `spec.trials` trials on top of `base`,
/// always with a fixed λ.
pub fn run_sweep(spec: &SweepSpec, base: &RunConfig) -> Result<SweepResult> {
    spec.validate()?;
    base.validate()?;
    let jobs: Vec<(f64, f64)> = spec
        .lambdas
        .iter()
        .flat_map(|&l| spec.thetas_deg.iter().map(move |&t| (l, t)))
        .collect();
    let cells = pool(base.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(lambda, theta)| {
                let mut cfg = base.clone();
                cfg.mode = Mode::ActiveFixed;
                cfg.field.lambda = lambda;
                cfg.field.theta_cs_deg = theta;
                cfg.trials = spec.trials;
                cfg.validate()?;
                let metrics = (0..spec.trials)
                    .map(|i| run_trial(&cfg, i).map(|t| t.episode.metrics))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SweepCell::from_metrics(lambda, theta, &metrics))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepResult {
        spec: spec.clone(),
        cells,
    })
}

pub fn write_sweep(dir: &Path, result: &SweepResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let files = [
        ("sweep.txt", result.table()),
        ("sweep.csv", result.to_csv()?),
        ("sweep.svg", plots::sweep_grid(result)),
    ];
    let mut paths = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        write_file(&path, &body)?;
        paths.push(path);
    }
    Ok(paths)
}

/// (t, λ) pairs of a log; errors on an empty log.
pub fn lambda_trace(log: &TrajectoryLog) -> Result<Vec<(f64, f64)>> {
    if log.is_empty() {
        bail!("trajectory log has no records");
    }
    Ok(log.records.iter().map(|r| (r.time, r.lambda)).collect())
}

pub fn lambda_trace_csv(trace: &[(f64, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "lambda"])?;
    for (t, l) in trace {
        w.write_record([t.to_string(), l.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
