//! Localization-health stand-in for a visual odometry pipeline: tracking is
//! lost after too few inliers for too long, and the pose estimate then drifts.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HealthParams {
    /// Minimum inlier count for a healthy frame.
    pub n_min: usize,
    /// Consecutive unhealthy frames before tracking is declared lost.
    pub k_frames: usize,
    /// Estimate drift per lost frame, meters.
    pub drift_rate: f64,
}

impl Default for HealthParams {
    fn default() -> Self {
        Self {
            n_min: 8,
            k_frames: 15,
            drift_rate: 0.02,
        }
    }
}

const HISTORY_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationHealth {
    pub params: HealthParams,
    /// Most recent inlier counts, oldest first.
    pub n_f_history: VecDeque<usize>,
    pub lost: bool,
    below_streak: usize,
    drift_dir: Vec2<f64>,
    frames: usize,
    lost_frames: usize,
    ever_lost: bool,
}

impl LocalizationHealth {
    pub fn new(params: HealthParams) -> Self {
        Self {
            params,
            n_f_history: VecDeque::with_capacity(HISTORY_LEN),
            lost: false,
            below_streak: 0,
            drift_dir: Vec2::zero(),
            frames: 0,
            lost_frames: 0,
            ever_lost: false,
        }
    }

    /// Feeds one frame and returns the estimated-pose increment for a true
    /// increment `true_delta`.
    pub fn update<R: Rng>(&mut self, n_f: usize, true_delta: Vec2<f64>, rng: &mut R) -> Vec2<f64> {
        if self.n_f_history.len() == HISTORY_LEN {
            self.n_f_history.pop_front();
        }
        self.n_f_history.push_back(n_f);
        self.frames += 1;

        if n_f < self.params.n_min {
            self.below_streak += 1;
            if !self.lost && self.below_streak >= self.params.k_frames {
                self.lost = true;
                self.ever_lost = true;
                let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                self.drift_dir = Vec2::new(angle.cos(), angle.sin());
            }
        } else {
            self.below_streak = 0;
            self.lost = false;
        }

        if self.lost {
            self.lost_frames += 1;
            true_delta + self.drift_dir * self.params.drift_rate
        } else {
            true_delta
        }
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn lost_frames(&self) -> usize {
        self.lost_frames
    }

    pub fn ever_lost(&self) -> bool {
        self.ever_lost
    }

    /// Fraction of frames with working localization (1 before any frame).
    pub fn localized_fraction(&self) -> f64 {
        if self.frames == 0 {
            1.0
        } else {
            1.0 - self.lost_frames as f64 / self.frames as f64
        }
    }
}
