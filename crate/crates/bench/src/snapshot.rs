//! A single camera frame: detected pixels and the goal direction, either
//! loaded from TOML or captured from a layout at a given position.

use std::path::Path;

use anyhow::{Context, Result};
use featnav_core::field::{self, FieldMap, FieldParams, PixelGrid};
use featnav_core::sim::{detect_features, DetectionModel, WorldScenario};
use featnav_core::{CameraRig, PlanarPose, Vec2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSnapshot {
    /// Feature pixels `[u, v]`.
    pub features: Vec<[f64; 2]>,
    /// Goal direction in the image plane.
    pub goal: [f64; 2],
}

impl FrameSnapshot {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
    }

    /// Frame seen from `position` with dropout disabled.
    pub fn capture(world: &WorldScenario, rig: &CameraRig<f64>, position: Vec2<f64>, height: f64) -> Result<Self> {
        let pose = PlanarPose::at(position);
        let model = DetectionModel {
            dropout_rate: 0.0,
            ..DetectionModel::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pixels = detect_features(&pose, height, world, rig, &model, &mut rng);
        let to_goal = pose.world_to_body_dir(world.goal - position);
        let goal = rig
            .project_direction(featnav_core::BodyVelocity::from_vec(to_goal))
            .context("goal direction does not project into the image")?;
        Ok(Self {
            features: pixels.iter().map(|p| [p.x, p.y]).collect(),
            goal: [goal.x, goal.y],
        })
    }

    pub fn pixels(&self) -> Vec<Vec2<f64>> {
        self.features.iter().map(|p| Vec2::new(p[0], p[1])).collect()
    }

    pub fn goal_dir(&self) -> Vec2<f64> {
        Vec2::new(self.goal[0], self.goal[1])
    }

    /// Field over a `cols × rows` lattice covering the image of `rig`.
    pub fn field_map(&self, rig: &CameraRig<f64>, params: &FieldParams<f64>, cols: usize, rows: usize) -> Result<FieldMap<f64>> {
        let k = &rig.intrinsics;
        let grid = PixelGrid::covering(k.width, k.height, cols, rows);
        field::field_map(&self.pixels(), rig.optical_center(), self.goal_dir(), params, &grid).map_err(Into::into)
    }
}
