//! Deterministic desk-scale flight simulator.

pub mod control;
pub mod detect;
pub mod episode;
pub mod health;
pub mod log;
pub mod scenario;

pub use control::{control_step, goal_velocity, ControlOutput, ControllerSettings, Mode, StepDiagnostics};
pub use detect::{detect_features, DetectionModel};
pub use episode::{
    run_episode, step_kinematics, Episode, EpisodeMetrics, EpisodeSetup, PoseFeedback, SimConfig, SimError,
    GOAL_SUCCESS_RADIUS,
};
pub use health::{HealthParams, LocalizationHealth};
pub use log::{LogError, StepRecord, TrajectoryLog};
pub use scenario::{make_scenario, make_scenario_with, LayoutParams, Rect, ScenarioKind, WorldFeature, WorldScenario};
