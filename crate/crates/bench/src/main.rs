use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use featnav_bench::config::{ConfigError, Overrides, RunConfig};
use featnav_bench::experiment::{self, SweepSpec};
use featnav_bench::{plots, FrameSnapshot};
use featnav_core::sim::{make_scenario_with, Mode, PoseFeedback, ScenarioKind, TrajectoryLog};
use featnav_core::Vec2;

#[derive(Parser)]
#[command(name = "featnav", version, about = "Feature-field navigation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and write logs, metrics and a trajectory plot.
    Run(RunArgs),
    /// Classify a λ × θ̂_cs grid into G, L, G&L or neither.
    Sweep(SweepArgs),
    /// Render the field of one camera frame as SVG.
    #[command(name = "render-field-map", alias = "render_field_map")]
    RenderFieldMap(FieldMapArgs),
    /// Extract λ over time from a trajectory CSV.
    #[command(name = "lambda-trace", alias = "emit_lambda_trace")]
    LambdaTrace(TraceArgs),
    /// Print a layout as TOML.
    Scenario(ScenarioArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    scenario: Option<ScenarioKind>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "theta-cs-deg")]
    theta_cs_deg: Option<f64>,
    #[arg(long = "radius-px")]
    radius_px: Option<f64>,
    #[arg(long = "spread-px")]
    spread_px: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let overrides = Overrides {
            scenario: self.scenario,
            mode: self.mode,
            lambda: self.lambda,
            theta_cs_deg: self.theta_cs_deg,
            radius_px: self.radius_px,
            spread_px: self.spread_px,
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            workers: self.workers,
        };
        RunConfig::resolve(self.config.as_deref(), &overrides)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Comma-separated θ̂_cs values in degrees.
    #[arg(long = "thetas-deg", value_delimiter = ',')]
    thetas_deg: Option<Vec<f64>>,
    /// Trials per cell.
    #[arg(long = "cell-trials", default_value_t = 1)]
    cell_trials: usize,
    /// Pose the goal controller acts on.
    #[arg(long, default_value = "motion_capture", value_parser = parse_feedback)]
    feedback: PoseFeedback,
}

#[derive(Args)]
struct FieldMapArgs {
    #[command(flatten)]
    common: Common,
    /// Frame file with `features = [[u, v], ...]` and `goal = [du, dv]`.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Vehicle position for capturing a frame from the layout, meters.
    #[arg(long, default_value_t = 4.2)]
    x: f64,
    #[arg(long, default_value_t = 0.0)]
    y: f64,
    #[arg(long, default_value_t = 72)]
    cols: usize,
    #[arg(long, default_value_t = 48)]
    rows: usize,
}

#[derive(Args)]
struct TraceArgs {
    /// Trajectory CSV written by `run`.
    #[arg(long)]
    log: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    common: Common,
}

fn parse_kind(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|e: featnav_core::sim::scenario::ScenarioError| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_feedback(s: &str) -> Result<PoseFeedback, String> {
    match s.replace('-', "_").as_str() {
        "estimated" => Ok(PoseFeedback::Estimated),
        "motion_capture" | "mocap" => Ok(PoseFeedback::MotionCapture),
        other => Err(format!("unknown feedback `{other}` (expected estimated or motion_capture)")),
    }
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run(args) => run(args.common.resolve()?),
        Command::Sweep(args) => sweep(args),
        Command::RenderFieldMap(args) => render_field_map(args),
        Command::LambdaTrace(args) => lambda_trace(&args.log, &args.out),
        Command::Scenario(args) => {
            let cfg = args.common.resolve()?;
            let world = make_scenario_with(cfg.scenario.kind, cfg.scenario.seed, &cfg.layout);
            let text = toml::to_string(&world).context("cannot serialize layout")?;
            match &args.common.out {
                Some(path) => experiment::write_file(path, &text)?,
                None => {
                    let mut out = std::io::stdout().lock();
                    if let Err(e) = out.write_all(text.as_bytes()) {
                        if e.kind() != std::io::ErrorKind::BrokenPipe {
                            return Err(Failure::Runtime(e.into()));
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

fn run(cfg: RunConfig) -> Result<(), Failure> {
    let trials = experiment::run_trials(&cfg)?;
    let files = experiment::write_run(&cfg, &trials)?;
    let agg = experiment::aggregate(&trials.iter().map(|t| t.episode.metrics.clone()).collect::<Vec<_>>());
    println!("scenario {} mode {} trials {}", cfg.scenario.kind, cfg.mode, agg.trials);
    println!("path length      {}", agg.path_length);
    println!("overhead ratio   {}", agg.overhead_ratio);
    println!("final distance   {}", agg.final_distance);
    println!("localized frames {}", agg.localized_fraction);
    println!(
        "goal success {:.2}  localization success {:.2}  stalled {}",
        agg.goal_success_rate, agg.localization_success_rate, agg.stalled_trials
    );
    println!("wrote {}", files.dir.display());
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut base = args.common.resolve()?;
    base.sim.feedback = args.feedback;
    let defaults = SweepSpec::default();
    let spec = SweepSpec {
        lambdas: args.lambdas.unwrap_or(defaults.lambdas),
        thetas_deg: args.thetas_deg.unwrap_or(defaults.thetas_deg),
        trials: args.cell_trials,
    };
    spec.validate().map_err(Failure::Config)?;
    let result = experiment::run_sweep(&spec, &base)?;
    experiment::write_sweep(&base.out, &result)?;
    print!("{}", result.table());
    println!("wrote {}", base.out.display());
    Ok(())
}

fn render_field_map(args: FieldMapArgs) -> Result<(), Failure> {
    let cfg = args.common.resolve()?;
    if args.cols == 0 || args.rows == 0 {
        return Err(Failure::Config(anyhow::anyhow!("cols and rows must be positive")));
    }
    let setup = cfg.setup(0);
    let snapshot = match &args.snapshot {
        Some(path) => FrameSnapshot::load(path).map_err(Failure::Config)?,
        None => {
            let world = make_scenario_with(cfg.scenario.kind, cfg.scenario.seed, &cfg.layout);
            FrameSnapshot::capture(&world, &setup.rig, Vec2::new(args.x, args.y), cfg.sim.height)?
        }
    };
    let map = snapshot.field_map(&setup.rig, &setup.field, args.cols, args.rows)?;
    let k = setup.rig.intrinsics;
    let svg = plots::field_map(&map, Vec2::new(k.width, k.height), setup.rig.optical_center(), snapshot.goal_dir());
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let path = cfg.out.join("field_map.svg");
    experiment::write_file(&path, &svg)?;
    println!("{} charges, wrote {}", map.charges.len(), path.display());
    Ok(())
}

fn lambda_trace(log: &Path, out: &Path) -> Result<(), Failure> {
    let file = fs::File::open(log).with_context(|| format!("cannot open {}", log.display()))?;
    let log = TrajectoryLog::read_csv(file).context("cannot parse trajectory log")?;
    let trace = experiment::lambda_trace(&log)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    experiment::write_file(&out.join("lambda_trace.csv"), &experiment::lambda_trace_csv(&trace)?)?;
    experiment::write_file(&out.join("lambda_trace.svg"), &plots::lambda_trace(&trace))?;
    println!("{} samples, wrote {}", trace.len(), out.display());
    Ok(())
}
