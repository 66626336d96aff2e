//! Synthetic feature detection: pinhole projection of world features, a
//! deterministic response ranking, a feature cap and per-frame dropout.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::camera::{CameraRig, PlanarPose};
use crate::vec2::Vec2;

use super::scenario::WorldScenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionModel {
    /// Only the strongest responses are kept.
    pub max_features: usize,
    pub response_seed: u64,
    /// Probability that a retained feature is lost in a given frame.
    pub dropout_rate: f64,
}

impl Default for DetectionModel {
    fn default() -> Self {
        Self {
            max_features: 100,
            response_seed: 0x5eed,
            dropout_rate: 0.05,
        }
    }
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic detector response of a feature.
pub fn response_score(response_key: u64, response_seed: u64) -> u64 {
    mix64(response_key ^ mix64(response_seed))
}

/// Pixels of the features detected from `pose`, in feature-index order.
pub fn detect_features<R: Rng>(
    pose: &PlanarPose<f64>,
    height: f64,
    world: &WorldScenario,
    rig: &CameraRig<f64>,
    model: &DetectionModel,
    rng: &mut R,
) -> Vec<Vec2<f64>> {
    let mut visible: Vec<(u64, usize, Vec2<f64>)> = world
        .features
        .iter()
        .enumerate()
        .filter_map(|(i, f)| {
            rig.project_point(f.position, pose, height)
                .map(|px| (response_score(f.response_key, model.response_seed), i, px))
        })
        .collect();
    if visible.len() > model.max_features {
        visible.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        visible.truncate(model.max_features);
        visible.sort_unstable_by_key(|v| v.1);
    }
    if model.dropout_rate > 0.0 {
        visible.retain(|_| rng.gen::<f64>() >= model.dropout_rate);
    }
    visible.into_iter().map(|(_, _, px)| px).collect()
}
