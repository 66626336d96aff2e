//! Velocity reference: goal controller plus the feature field, blended and
//! mapped back to the body frame.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autotune::{LambdaSchedule, LowPassFilter};
use crate::camera::{BodyVelocity, CameraRig, PlanarPose};
use crate::field::{self, FieldParams, RegionClass};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Goal velocity only.
    Passive,
    /// Field blended with a constant λ.
    ActiveFixed,
    /// Field blended with λ scheduled from the tracked-feature count.
    ActiveAutotune,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Passive => "passive",
            Mode::ActiveFixed => "active_fixed",
            Mode::ActiveAutotune => "active_autotune",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "passive" => Ok(Mode::Passive),
            "active" | "active_fixed" => Ok(Mode::ActiveFixed),
            "autotune" | "active_autotune" => Ok(Mode::ActiveAutotune),
            other => Err(format!(
                "unknown mode `{other}` (expected passive, active_fixed or active_autotune)"
            )),
        }
    }
}

/// Proportional goal controller saturated at `max_speed`, world frame.
pub fn goal_velocity(position: Vec2<f64>, goal: Vec2<f64>, max_speed: f64, k_p: f64) -> Vec2<f64> {
    let to_goal = goal - position;
    let dist = to_goal.norm();
    if dist <= 0.0 {
        return Vec2::zero();
    }
    to_goal * ((k_p * dist).min(max_speed) / dist)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSettings {
    pub mode: Mode,
    pub field: FieldParams<f64>,
    pub schedule: LambdaSchedule<f64>,
    pub max_speed: f64,
    pub k_p: f64,
    pub dt: f64,
    pub filter_cutoff_hz: f64,
    pub local_min_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub n_f: usize,
    pub lambda: f64,
    /// Goal velocity, world frame, m/s.
    pub goal_velocity: Vec2<f64>,
    /// Filtered feature velocity in the image frame, absent without usable force.
    pub feature_velocity: Option<Vec2<f64>>,
    pub region: RegionClass,
    pub local_minimum: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    /// Commanded velocity, world frame, m/s.
    pub command: Vec2<f64>,
    pub diagnostics: StepDiagnostics,
}

/// One control update. `filter` holds the feature-velocity smoothing state of
/// this control loop; it is reset whenever the feature velocity vanishes.
pub fn control_step(
    settings: &ControllerSettings,
    filter: &mut LowPassFilter<f64>,
    rig: &CameraRig<f64>,
    pose: &PlanarPose<f64>,
    goal: Vec2<f64>,
    detections: &[Vec2<f64>],
) -> ControlOutput {
    let v_g = goal_velocity(pose.position, goal, settings.max_speed, settings.k_p);
    let n_f = detections.len();
    let passive_lambda = 1.0;
    let mut diagnostics = StepDiagnostics {
        n_f,
        lambda: passive_lambda,
        goal_velocity: v_g,
        feature_velocity: None,
        region: RegionClass::GoalFriendly,
        local_minimum: false,
    };
    let speed = v_g.norm();
    if speed <= 0.0 {
        return ControlOutput {
            command: Vec2::zero(),
            diagnostics,
        };
    }
    if settings.mode == Mode::Passive {
        return ControlOutput {
            command: v_g,
            diagnostics,
        };
    }

    let lambda = match settings.mode {
        Mode::ActiveAutotune => settings.schedule.lambda_for_count(n_f),
        _ => settings.field.lambda,
    };
    diagnostics.lambda = lambda;

    let body_goal = BodyVelocity::from_vec(pose.world_to_body_dir(v_g));
    let goal_img = match rig.project_direction(body_goal) {
        Ok(d) => d,
        Err(_) => {
            return ControlOutput {
                command: v_g,
                diagnostics,
            }
        }
    };
    let goal_unit = goal_img.normalized().expect("projected goal direction is nonzero");
    let optical_center = rig.optical_center();
    let raw_vf = field::charge_map(detections, optical_center, goal_img, settings.field.theta_cs_hat)
        .ok()
        .and_then(|charges| {
            let f = field::total_force(
                &charges,
                optical_center,
                optical_center,
                settings.field.dead_radius,
                settings.field.spread,
            );
            field::feature_velocity(f)
        });
    let v_f = match raw_vf {
        Some(dir) => Some(filter.step(dir, settings.dt, settings.filter_cutoff_hz)),
        None => {
            filter.reset();
            None
        }
    };
    let v_f = v_f.filter(|d| d.norm() > field::FORCE_EPSILON);
    if let Some(dir) = v_f {
        diagnostics.feature_velocity = Some(dir);
        diagnostics.region = field::classify_point(goal_img, dir).unwrap_or(RegionClass::GoalFriendly);
        diagnostics.local_minimum = field::is_local_minimum(goal_img, dir, settings.local_min_tol);
    }

    let blended = field::blend(goal_unit, v_f, lambda);
    let command = match rig.lift_direction(blended) {
        Ok(body_dir) => pose.body_to_world_dir(body_dir.as_vec()) * speed,
        Err(_) => Vec2::zero(),
    };
    ControlOutput { command, diagnostics }
}
