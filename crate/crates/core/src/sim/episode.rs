//! Fixed-step episode loop: detect, control, integrate, localize.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autotune::{LambdaSchedule, LowPassFilter};
use crate::camera::{CameraRig, PlanarPose};
use crate::field::{FieldParams, LOCAL_MINIMUM_TOLERANCE};
use crate::vec2::Vec2;

use super::control::{control_step, ControllerSettings, Mode};
use super::detect::{detect_features, mix64, DetectionModel};
use super::health::{HealthParams, LocalizationHealth};
use super::log::{StepRecord, TrajectoryLog};
use super::scenario::WorldScenario;

/// Goal success radius on the true pose, meters.
pub const GOAL_SUCCESS_RADIUS: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
}

/// Which pose the goal controller acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseFeedback {
    /// The onboard estimate, subject to drift while tracking is lost.
    Estimated,
    /// External ground truth (motion capture); the estimate is only scored.
    MotionCapture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Control period, seconds.
    pub dt: f64,
    pub max_speed: f64,
    /// Goal controller gain, 1/s.
    pub k_p: f64,
    /// Termination radius around the goal on the feedback pose, meters.
    pub goal_tol: f64,
    pub max_steps: usize,
    /// Constant flight height, meters.
    pub height: f64,
    /// Frames a local-minimum episode may last before a stall is reported.
    /// An episode opens when the local-minimum test fires and closes once the
    /// feedback distance to the goal drops `goal_tol` below its value at onset.
    pub stall_window: usize,
    /// Opposed-direction cone for the local-minimum test, degrees.
    pub local_min_tol_deg: f64,
    pub filter_cutoff_hz: f64,
    pub feedback: PoseFeedback,
    pub detection: DetectionModel,
    pub health: HealthParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 30.0,
            max_speed: 0.5,
            k_p: 1.0,
            goal_tol: GOAL_SUCCESS_RADIUS,
            max_steps: 1800,
            height: 1.0,
            stall_window: 60,
            local_min_tol_deg: LOCAL_MINIMUM_TOLERANCE.to_degrees(),
            filter_cutoff_hz: 20.0,
            feedback: PoseFeedback::Estimated,
            detection: DetectionModel::default(),
            health: HealthParams::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |m: &str| Err(SimError::Config(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return err("dt must be positive");
        }
        if !(self.max_speed > 0.0) {
            return err("max_speed must be positive");
        }
        if !(self.k_p > 0.0) {
            return err("k_p must be positive");
        }
        if !(self.goal_tol > 0.0) {
            return err("goal_tol must be positive");
        }
        if self.max_steps == 0 {
            return err("max_steps must be at least 1");
        }
        if !(self.height > 0.0) {
            return err("height must be positive");
        }
        if !(self.filter_cutoff_hz > 0.0) {
            return err("filter_cutoff_hz must be positive");
        }
        if !(0.0..180.0).contains(&self.local_min_tol_deg) {
            return err("local_min_tol_deg must lie in [0, 180)");
        }
        if !(0.0..1.0).contains(&self.detection.dropout_rate) {
            return err("dropout_rate must lie in [0, 1)");
        }
        if !(self.health.drift_rate >= 0.0) {
            return err("drift_rate must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub steps: usize,
    pub duration_s: f64,
    /// True distance travelled, meters.
    pub path_length: f64,
    /// Path length over the chord from start to the final true position.
    pub overhead_ratio: f64,
    /// Largest true distance from the start–goal line, meters.
    pub max_lateral_deviation: f64,
    pub min_features: usize,
    pub mean_features: f64,
    pub localized_fraction: f64,
    pub final_distance: f64,
    pub final_estimation_error: f64,
    pub goal_success: bool,
    pub localization_success: bool,
    pub stalled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub log: TrajectoryLog,
    pub metrics: EpisodeMetrics,
}

/// Everything an episode needs besides the world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSetup {
    pub rig: CameraRig<f64>,
    pub field: FieldParams<f64>,
    pub schedule: LambdaSchedule<f64>,
    pub mode: Mode,
    pub sim: SimConfig,
    /// Seeds dropout and drift.
    pub seed: u64,
}

impl EpisodeSetup {
    pub fn new(mode: Mode, seed: u64) -> Self {
        Self {
            rig: CameraRig::default(),
            field: FieldParams::simulation_defaults(),
            schedule: LambdaSchedule::default(),
            mode,
            sim: SimConfig::default(),
            seed,
        }
    }
}

pub fn run_episode(world: &WorldScenario, setup: &EpisodeSetup) -> Result<Episode, SimError> {
    let sim = &setup.sim;
    sim.validate()?;
    setup.field.validate().map_err(|e| SimError::Config(e.to_string()))?;
    setup.schedule.validate().map_err(|e| SimError::Config(e.to_string()))?;
    world.validate().map_err(|e| SimError::Config(e.to_string()))?;

    let settings = ControllerSettings {
        mode: setup.mode,
        field: setup.field,
        schedule: setup.schedule,
        max_speed: sim.max_speed,
        k_p: sim.k_p,
        dt: sim.dt,
        filter_cutoff_hz: sim.filter_cutoff_hz,
        local_min_tol: sim.local_min_tol_deg.to_radians(),
    };
    let mut detect_rng = ChaCha8Rng::seed_from_u64(mix64(setup.seed));
    let mut drift_rng = ChaCha8Rng::seed_from_u64(mix64(setup.seed ^ 0xd41f_7000));
    let mut filter = LowPassFilter::new();
    let mut health = LocalizationHealth::new(sim.health);

    let mut truth = world.start;
    let mut estimate = world.start;
    let axis = (world.goal - world.start).normalized().expect("validated start != goal");
    let mut log = TrajectoryLog::default();
    let mut path_length = 0.0;
    let mut max_lateral: f64 = 0.0;
    let mut min_features = usize::MAX;
    let mut feature_sum = 0usize;
    let mut trap: Option<(usize, f64)> = None;
    let mut stalled = false;

    for step in 0..sim.max_steps {
        let true_pose = PlanarPose::at(truth);
        let detections = detect_features(&true_pose, sim.height, world, &setup.rig, &sim.detection, &mut detect_rng);
        let n_f = detections.len();
        let feedback_pose = match sim.feedback {
            PoseFeedback::Estimated => PlanarPose::at(estimate),
            PoseFeedback::MotionCapture => true_pose,
        };
        let out = control_step(&settings, &mut filter, &setup.rig, &feedback_pose, world.goal, &detections);

        let delta = out.command * sim.dt;
        truth = step_kinematics(truth, out.command, sim.dt);
        estimate += health.update(n_f, delta, &mut drift_rng);
        path_length += delta.norm();
        max_lateral = max_lateral.max(axis.cross(truth - world.start).abs());
        min_features = min_features.min(n_f);
        feature_sum += n_f;

        let d = out.diagnostics;
        let dist = (world.goal - feedback_pose.position).norm();
        trap = match trap {
            Some((_, onset)) if dist < onset - sim.goal_tol => None,
            Some((frames, onset)) => Some((frames + 1, onset)),
            None if d.local_minimum => Some((1, dist)),
            None => None,
        };
        if trap.is_some_and(|(frames, _)| frames > sim.stall_window) {
            stalled = true;
        }

        log.records.push(StepRecord {
            time: (step + 1) as f64 * sim.dt,
            true_pose: truth,
            estimated_pose: estimate,
            goal_velocity: d.goal_velocity,
            feature_velocity: d.feature_velocity,
            command: out.command,
            lambda: d.lambda,
            n_f,
            region: d.region,
            local_minimum: d.local_minimum,
            lost: health.lost,
        });

        let reached = match sim.feedback {
            PoseFeedback::Estimated => estimate,
            PoseFeedback::MotionCapture => truth,
        };
        if (world.goal - reached).norm() < sim.goal_tol {
            break;
        }
    }

    let steps = log.records.len();
    let chord = (truth - world.start).norm();
    let final_distance = (world.goal - truth).norm();
    let metrics = EpisodeMetrics {
        steps,
        duration_s: steps as f64 * sim.dt,
        path_length,
        overhead_ratio: if chord > 0.0 { (path_length / chord).max(1.0) } else { 1.0 },
        max_lateral_deviation: max_lateral,
        min_features: if steps == 0 { 0 } else { min_features },
        mean_features: if steps == 0 { 0.0 } else { feature_sum as f64 / steps as f64 },
        localized_fraction: health.localized_fraction(),
        final_distance,
        final_estimation_error: (estimate - truth).norm(),
        goal_success: final_distance < GOAL_SUCCESS_RADIUS,
        localization_success: !health.ever_lost(),
        stalled,
    };
    Ok(Episode { log, metrics })
}

/// Single-integrator update of a planar position.
pub fn step_kinematics(position: Vec2<f64>, command: Vec2<f64>, dt: f64) -> Vec2<f64> {
    position + command * dt
}
