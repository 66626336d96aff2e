//! Feature-based artificial potential field navigation.
//!
//! Image features become attractive or neutral charges depending on their
//! bearing relative to the goal direction; the resulting force is blended
//! with the goal velocity so a vehicle with a downward camera keeps enough
//! texture in view to stay localized.
//!
//! The field, camera and auto-tuning math is generic over [`Scalar`]
//! (`f32`/`f64`); the simulator in [`sim`] runs in `f64`.

// `!(x > 0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autotune;
pub mod camera;
pub mod field;
pub mod scalar;
pub mod sim;
pub mod vec2;

pub use autotune::{smoothing_factor, LambdaSchedule, LowPassFilter, ScheduleError};
pub use camera::{BodyToImage, BodyVelocity, CameraError, CameraRig, Intrinsics, PlanarPose};
pub use field::{
    assign_charge, blend, charge_map, classify_point, feature_angle, feature_velocity, field_map, force_from_charge,
    is_local_minimum, sector_angle, total_force, Charge, FieldCell, FieldError, FieldMap, FieldParams, ForceVec,
    PixelGrid, PixelVec, RegionClass, FORCE_EPSILON, LOCAL_MINIMUM_TOLERANCE,
};
pub use scalar::Scalar;
pub use vec2::Vec2;

pub type PixelVec64 = PixelVec<f64>;
pub type PixelVec32 = PixelVec<f32>;
pub type Charge64 = Charge<f64>;
pub type Charge32 = Charge<f32>;
pub type FieldParams64 = FieldParams<f64>;
pub type FieldParams32 = FieldParams<f32>;
pub type CameraRig64 = CameraRig<f64>;
pub type CameraRig32 = CameraRig<f32>;
pub type LambdaSchedule64 = LambdaSchedule<f64>;
pub type LambdaSchedule32 = LambdaSchedule<f32>;
