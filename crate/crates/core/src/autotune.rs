//! λ scheduling from the tracked-feature count and low-pass smoothing of the
//! feature velocity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("lambda bounds must satisfy 0 <= min <= max <= 1 (got {min}, {max})")]
    LambdaBounds { min: f64, max: f64 },
    #[error("feature thresholds must satisfy 0 < t_min < t_max (got {t_min}, {t_max})")]
    Thresholds { t_min: u32, t_max: u32 },
}

/// Piecewise-linear map from tracked-feature count to λ, saturating at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSchedule<T> {
    pub lambda_min: T,
    pub lambda_max: T,
    pub t_min: u32,
    pub t_max: u32,
}

impl<T: Scalar> LambdaSchedule<T> {
    pub fn new(lambda_min: T, lambda_max: T, t_min: u32, t_max: u32) -> Result<Self, ScheduleError> {
        let s = Self {
            lambda_min,
            lambda_max,
            t_min,
            t_max,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        let (lo, hi) = (self.lambda_min, self.lambda_max);
        if !(lo >= T::zero() && lo <= hi && hi <= T::one()) {
            return Err(ScheduleError::LambdaBounds {
                min: lo.to_f64().unwrap_or(f64::NAN),
                max: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !(self.t_min > 0 && self.t_min < self.t_max) {
            return Err(ScheduleError::Thresholds {
                t_min: self.t_min,
                t_max: self.t_max,
            });
        }
        Ok(())
    }

    /// Thresholds at 25% and 90% of `max_features`, λ ∈ [0.1, 0.9].
    pub fn for_feature_cap(max_features: u32) -> Self {
        let t_min = ((max_features as f64) * 0.25).round().max(1.0) as u32;
        let t_max = ((max_features as f64) * 0.9).round().max(t_min as f64 + 1.0) as u32;
        Self {
            lambda_min: T::lit(0.1),
            lambda_max: T::lit(0.9),
            t_min,
            t_max,
        }
    }

    pub fn alpha(&self) -> T {
        (self.lambda_max - self.lambda_min) / T::lit(f64::from(self.t_max - self.t_min))
    }

    pub fn beta(&self) -> T {
        self.lambda_min - self.alpha() * T::lit(f64::from(self.t_min))
    }

    /// λ for a (possibly fractional) feature count.
    pub fn lambda_of(&self, n_f: T) -> T {
        let t_min = T::lit(f64::from(self.t_min));
        let t_max = T::lit(f64::from(self.t_max));
        if n_f < t_min {
            self.lambda_min
        } else if n_f > t_max {
            self.lambda_max
        } else {
            (self.alpha() * n_f + self.beta()).max(self.lambda_min).min(self.lambda_max)
        }
    }

    pub fn lambda_for_count(&self, n_f: usize) -> T {
        self.lambda_of(T::lit(n_f as f64))
    }
}

impl<T: Scalar> Default for LambdaSchedule<T> {
    fn default() -> Self {
        Self::for_feature_cap(100)
    }
}

/// `dt / (dt + 1/(2π f_c))`, the exponential-smoothing gain of a first-order
/// low-pass with cutoff `cutoff_hz` sampled every `dt` seconds.
pub fn smoothing_factor<T: Scalar>(dt: T, cutoff_hz: T) -> T {
    let tau = (T::TAU() * cutoff_hz).recip();
    dt / (dt + tau)
}

/// First-order low-pass on a 2-vector. The first sample passes through.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LowPassFilter<T> {
    last_output: Option<Vec2<T>>,
}

impl<T: Scalar> LowPassFilter<T> {
    pub fn new() -> Self {
        Self { last_output: None }
    }

    pub fn is_initialized(&self) -> bool {
        self.last_output.is_some()
    }

    pub fn last_output(&self) -> Option<Vec2<T>> {
        self.last_output
    }

    pub fn reset(&mut self) {
        self.last_output = None;
    }

    /// Panics if `dt` or `cutoff_hz` is not positive.
    pub fn step(&mut self, sample: Vec2<T>, dt: T, cutoff_hz: T) -> Vec2<T> {
        assert!(dt > T::zero() && cutoff_hz > T::zero(), "dt and cutoff must be positive");
        let out = match self.last_output {
            None => sample,
            Some(y) => y + (sample - y) * smoothing_factor(dt, cutoff_hz),
        };
        self.last_output = Some(out);
        out
    }
}
