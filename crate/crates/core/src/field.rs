//! Feature-based potential field.
//!
//! Every tracked feature becomes a charge whose energy depends on its bearing
//! relative to the image-frame goal direction. Charges attract the evaluation
//! point with a force that is zero inside a dead zone, ramps linearly over the
//! spread and then saturates at the charge energy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::vec2::Vec2;

/// Undistorted image coordinates (u, v) in pixels.
pub type PixelVec<T> = Vec2<T>;

/// Dimensionless image-plane force.
pub type ForceVec<T> = Vec2<T>;

/// Total forces at or below this norm carry no usable direction.
pub const FORCE_EPSILON: f64 = 1e-9;

/// Default cone half-width (radians) for the opposed-direction test: 15°.
pub const LOCAL_MINIMUM_TOLERANCE: f64 = 15.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
}

fn out_of_range<T: Scalar>(name: &'static str, value: T, range: &'static str) -> FieldError {
    FieldError::OutOfRange {
        name,
        value: value.to_f64().unwrap_or(f64::NAN),
        range,
    }
}

/// A feature turned into a charge: offset from the optical center, energy in
/// `[0, 1]` and the cutoff angle that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Charge<T> {
    pub offset: PixelVec<T>,
    pub energy: T,
    pub sector_angle: T,
}

impl<T: Scalar> Charge<T> {
    /// Pixel position of the feature for a given optical center.
    pub fn position(&self, optical_center: PixelVec<T>) -> PixelVec<T> {
        optical_center + self.offset
    }
}

/// Tunables of the charging policy, the force law and the blending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams<T> {
    /// Weight of the goal velocity in the blend, in `[0, 1]`.
    pub lambda: T,
    /// Central angle of the neutral circular segment, radians in `[0, 2π)`.
    pub theta_cs_hat: T,
    /// Dead-zone radius in pixels.
    pub dead_radius: T,
    /// Spread in pixels over which a charge ramps up to full strength.
    pub spread: T,
}

impl<T: Scalar> FieldParams<T> {
    pub fn new(lambda: T, theta_cs_hat: T, dead_radius: T, spread: T) -> Result<Self, FieldError> {
        let params = Self {
            lambda,
            theta_cs_hat,
            dead_radius,
            spread,
        };
        params.validate()?;
        Ok(params)
    }

    /// λ = 0.4, θ̂_cs = 60°, r = 50 px, s = 150 px.
    pub fn simulation_defaults() -> Self {
        Self {
            lambda: T::lit(0.4),
            theta_cs_hat: T::lit(60.0).to_radians(),
            dead_radius: T::lit(50.0),
            spread: T::lit(150.0),
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if !(self.lambda >= T::zero() && self.lambda <= T::one()) {
            return Err(out_of_range("lambda", self.lambda, "[0, 1]"));
        }
        if !(self.theta_cs_hat >= T::zero() && self.theta_cs_hat < T::TAU()) {
            return Err(out_of_range("theta_cs_hat", self.theta_cs_hat, "[0, 2π)"));
        }
        if !(self.dead_radius >= T::zero() && self.dead_radius.is_finite()) {
            return Err(out_of_range("dead_radius", self.dead_radius, "[0, ∞)"));
        }
        if !(self.spread > T::zero() && self.spread.is_finite()) {
            return Err(out_of_range("spread", self.spread, "(0, ∞)"));
        }
        Ok(())
    }

    /// Energy cutoff angle derived from `theta_cs_hat`.
    pub fn sector_angle(&self) -> T {
        T::PI() - self.theta_cs_hat / T::lit(2.0)
    }
}

/// Image region classification by the angle between goal and feature velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionClass {
    GoalFriendly,
    FeatureFriendly,
}

impl RegionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionClass::GoalFriendly => "goal_friendly",
            RegionClass::FeatureFriendly => "feature_friendly",
        }
    }
}

/// Cutoff angle θ_cs = π − θ̂_cs / 2 for a circular segment of central angle `theta_cs_hat`.
pub fn sector_angle<T: Scalar>(theta_cs_hat: T) -> Result<T, FieldError> {
    if !(theta_cs_hat >= T::zero() && theta_cs_hat < T::TAU()) {
        return Err(out_of_range("theta_cs_hat", theta_cs_hat, "[0, 2π)"));
    }
    Ok(T::PI() - theta_cs_hat / T::lit(2.0))
}

/// Angle in `[0, π]` between the feature offset `p_i − p_o` and the goal direction.
pub fn feature_angle<T: Scalar>(
    feature: PixelVec<T>,
    optical_center: PixelVec<T>,
    goal_dir: PixelVec<T>,
) -> Result<T, FieldError> {
    offset_angle(feature - optical_center, goal_dir)
}

fn offset_angle<T: Scalar>(offset: PixelVec<T>, goal_dir: PixelVec<T>) -> Result<T, FieldError> {
    let offset_norm = offset.norm();
    let goal_norm = goal_dir.norm();
    if !(offset_norm > T::zero()) {
        return Err(FieldError::Degenerate("feature coincides with the optical center"));
    }
    if !(goal_norm > T::zero()) {
        return Err(FieldError::Degenerate("zero goal direction"));
    }
    Ok(offset.angle_to(goal_dir))
}

/// Charging policy: `1 − θ_i/θ_cs` inside the cutoff, zero beyond it.
pub fn assign_charge<T: Scalar>(theta_i: T, theta_cs: T) -> T {
    if theta_i <= theta_cs {
        (T::one() - theta_i / theta_cs).max(T::zero())
    } else {
        T::zero()
    }
}

/// Builds one charge per feature. Features sitting exactly on the optical
/// center carry no bearing and are skipped.
pub fn charge_map<T: Scalar>(
    features: &[PixelVec<T>],
    optical_center: PixelVec<T>,
    goal_dir: PixelVec<T>,
    theta_cs_hat: T,
) -> Result<Vec<Charge<T>>, FieldError> {
    if !goal_dir.is_finite() {
        return Err(FieldError::NonFinite("goal direction"));
    }
    if !(goal_dir.norm() > T::zero()) {
        return Err(FieldError::Degenerate("zero goal direction"));
    }
    if !optical_center.is_finite() {
        return Err(FieldError::NonFinite("optical center"));
    }
    let theta_cs = sector_angle(theta_cs_hat)?;
    let mut charges = Vec::with_capacity(features.len());
    for &feature in features {
        if !feature.is_finite() {
            return Err(FieldError::NonFinite("feature pixel"));
        }
        let offset = feature - optical_center;
        if offset.x == T::zero() && offset.y == T::zero() {
            continue;
        }
        let theta_i = offset_angle(offset, goal_dir)?;
        charges.push(Charge {
            offset,
            energy: assign_charge(theta_i, theta_cs),
            sector_angle: theta_cs,
        });
    }
    Ok(charges)
}

/// Attractive force of one charge at `eval_point`.
pub fn force_from_charge<T: Scalar>(
    charge: &Charge<T>,
    eval_point: PixelVec<T>,
    optical_center: PixelVec<T>,
    dead_radius: T,
    spread: T,
) -> ForceVec<T> {
    let delta = charge.position(optical_center) - eval_point;
    let distance = delta.norm();
    if distance < dead_radius || !(distance > T::zero()) {
        return ForceVec::zero();
    }
    let magnitude = if distance <= spread + dead_radius {
        (distance - dead_radius) / spread * charge.energy
    } else {
        charge.energy
    };
    delta * (magnitude / distance)
}

/// Sum of all charge forces at `eval_point`, accumulated in charge order.
pub fn total_force<T: Scalar>(
    charges: &[Charge<T>],
    eval_point: PixelVec<T>,
    optical_center: PixelVec<T>,
    dead_radius: T,
    spread: T,
) -> ForceVec<T> {
    charges.iter().fold(ForceVec::zero(), |acc, charge| {
        acc + force_from_charge(charge, eval_point, optical_center, dead_radius, spread)
    })
}

/// Feature velocity direction: the normalized force, absent when `‖f‖ ≤ ε_f`.
pub fn feature_velocity<T: Scalar>(force: ForceVec<T>) -> Option<PixelVec<T>> {
    feature_velocity_with(force, T::lit(FORCE_EPSILON))
}

pub fn feature_velocity_with<T: Scalar>(force: ForceVec<T>, epsilon: T) -> Option<PixelVec<T>> {
    let n = force.norm();
    if n > epsilon && n.is_finite() {
        Some(force * n.recip())
    } else {
        None
    }
}

/// `λ·v_g + (1 − λ)·v_f`, or `v_g` alone when there is no feature velocity.
pub fn blend<T: Scalar>(goal_unit: PixelVec<T>, feature_unit: Option<PixelVec<T>>, lambda: T) -> PixelVec<T> {
    match feature_unit {
        None => goal_unit,
        Some(_) if lambda == T::one() => goal_unit,
        Some(vf) if lambda == T::zero() => vf,
        Some(vf) => goal_unit * lambda + vf * (T::one() - lambda),
    }
}

/// Goal-friendly when the inner product is non-negative (acute or right angle).
pub fn classify_point<T: Scalar>(goal_dir: PixelVec<T>, feature_dir: PixelVec<T>) -> Result<RegionClass, FieldError> {
    if !(goal_dir.norm() > T::zero()) || !(feature_dir.norm() > T::zero()) {
        return Err(FieldError::Degenerate("zero direction in region classification"));
    }
    Ok(if goal_dir.dot(feature_dir) >= T::zero() {
        RegionClass::GoalFriendly
    } else {
        RegionClass::FeatureFriendly
    })
}

/// True when the feature velocity points within `angle_tol` of straight against the goal.
pub fn is_local_minimum<T: Scalar>(goal_dir: PixelVec<T>, feature_dir: PixelVec<T>, angle_tol: T) -> bool {
    if !(goal_dir.norm() > T::zero()) || !(feature_dir.norm() > T::zero()) {
        return false;
    }
    goal_dir.angle_to(feature_dir) > T::PI() - angle_tol
}

/// Regular lattice of evaluation points in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelGrid<T> {
    pub origin: PixelVec<T>,
    pub step: PixelVec<T>,
    pub cols: usize,
    pub rows: usize,
}

impl<T: Scalar> PixelGrid<T> {
    /// `cols × rows` cell centers covering a `width × height` image.
    pub fn covering(width: T, height: T, cols: usize, rows: usize) -> Self {
        let step = PixelVec::new(width / T::lit(cols as f64), height / T::lit(rows as f64));
        Self {
            origin: step * T::lit(0.5),
            step,
            cols,
            rows,
        }
    }

    pub fn point(&self, col: usize, row: usize) -> PixelVec<T> {
        PixelVec::new(
            self.origin.x + self.step.x * T::lit(col as f64),
            self.origin.y + self.step.y * T::lit(row as f64),
        )
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCell<T> {
    pub point: PixelVec<T>,
    /// Raw total force, not normalized.
    pub force: ForceVec<T>,
    pub region: RegionClass,
}

/// Field evaluated over a pixel lattice, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap<T> {
    pub grid: PixelGrid<T>,
    pub charges: Vec<Charge<T>>,
    pub cells: Vec<FieldCell<T>>,
}

impl<T: Scalar> FieldMap<T> {
    pub fn cell(&self, col: usize, row: usize) -> &FieldCell<T> {
        &self.cells[row * self.grid.cols + col]
    }
}

/// Evaluates the field at every lattice point. Charges depend only on the
/// optical center and goal direction, so they are built once.
pub fn field_map<T: Scalar>(
    features: &[PixelVec<T>],
    optical_center: PixelVec<T>,
    goal_dir: PixelVec<T>,
    params: &FieldParams<T>,
    grid: &PixelGrid<T>,
) -> Result<FieldMap<T>, FieldError> {
    params.validate()?;
    let charges = charge_map(features, optical_center, goal_dir, params.theta_cs_hat)?;
    let mut cells = Vec::with_capacity(grid.len());
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let point = grid.point(col, row);
            let force = total_force(&charges, point, optical_center, params.dead_radius, params.spread);
            let region = match feature_velocity(force) {
                Some(dir) => classify_point(goal_dir, dir)?,
                None => RegionClass::GoalFriendly,
            };
            cells.push(FieldCell { point, force, region });
        }
    }
    Ok(FieldMap {
        grid: *grid,
        charges,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    #[test]
    fn sector_angle_cases() {
        assert_eq!(sector_angle(0.0).unwrap(), PI);
        assert_abs_diff_eq!(sector_angle(60f64.to_radians()).unwrap(), 150f64.to_radians(), epsilon = 1e-12);
        let eps = 1e-6;
        assert_abs_diff_eq!(sector_angle(2.0 * PI - eps).unwrap(), eps / 2.0, epsilon = 1e-12);
        assert!(sector_angle(2.0 * PI).is_err());
        assert!(sector_angle(-0.1).is_err());
        assert!(sector_angle(f64::NAN).is_err());
    }

    #[test]
    fn feature_angle_cases() {
        let o = v(360.0, 240.0);
        assert_eq!(feature_angle(o + v(5.0, 0.0), o, v(2.0, 0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(feature_angle(o + v(-5.0, 0.0), o, v(2.0, 0.0)).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(feature_angle(o + v(1.0, 1.0), o, v(1.0, 0.0)).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        assert!(matches!(feature_angle(o, o, v(1.0, 0.0)), Err(FieldError::Degenerate(_))));
        assert!(matches!(feature_angle(o + v(1.0, 0.0), o, v(0.0, 0.0)), Err(FieldError::Degenerate(_))));
    }

    #[test]
    fn feature_angle_clamps_rounding_drift() {
        // nearly parallel vectors whose cosine can round above 1
        let a = feature_angle(v(0.1 + 0.2, 0.3), v(0.0, 0.0), v(0.3, 0.30000000000000004)).unwrap();
        assert!(a.is_finite() && a >= 0.0);
    }

    #[test]
    fn assign_charge_cases() {
        let cs = 150f64.to_radians();
        assert_eq!(assign_charge(0.0, cs), 1.0);
        assert_eq!(assign_charge(cs, cs), 0.0);
        assert_abs_diff_eq!(assign_charge(75f64.to_radians(), cs), 0.5, epsilon = 1e-12);
        assert_eq!(assign_charge(160f64.to_radians(), cs), 0.0);
    }

    #[test]
    fn charge_map_cases() {
        let o = v(360.0, 240.0);
        let goal = v(1.0, 0.0);
        let theta_hat = 60f64.to_radians();
        assert!(charge_map(&[], o, goal, theta_hat).unwrap().is_empty());

        let at = |deg: f64| o + v(100.0 * deg.to_radians().cos(), 100.0 * deg.to_radians().sin());
        let charges = charge_map(&[at(0.0), at(75.0), at(-160.0)], o, goal, theta_hat).unwrap();
        let energies: Vec<f64> = charges.iter().map(|c| c.energy).collect();
        assert_abs_diff_eq!(energies[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(energies[1], 0.5, epsilon = 1e-12);
        assert_eq!(energies[2], 0.0);

        // behind the camera, inside the neutral segment
        let neutral = charge_map(&[at(170.0), at(-155.0), at(180.0)], o, goal, theta_hat).unwrap();
        assert!(neutral.iter().all(|c| c.energy == 0.0));

        let skipped = charge_map(&[o, at(10.0)], o, goal, theta_hat).unwrap();
        assert_eq!(skipped.len(), 1);

        assert!(charge_map(&[at(0.0)], o, v(0.0, 0.0), theta_hat).is_err());
    }

    fn unit_charge_at(offset: Vec2<f64>, energy: f64) -> Charge<f64> {
        Charge {
            offset,
            energy,
            sector_angle: PI,
        }
    }

    #[test]
    fn force_branches() {
        let o = v(360.0, 240.0);
        let (r, s) = (50.0, 150.0);
        let dead = force_from_charge(&unit_charge_at(v(25.0, 0.0), 1.0), o, o, r, s);
        assert_eq!(dead, v(0.0, 0.0));

        let mid = force_from_charge(&unit_charge_at(v(r + s / 2.0, 0.0), 1.0), o, o, r, s);
        assert_abs_diff_eq!(mid.x, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.y, 0.0, epsilon = 1e-12);

        let far = force_from_charge(&unit_charge_at(v(0.0, -(s + r + 1.0)), 0.7), o, o, r, s);
        assert_abs_diff_eq!(far.norm(), 0.7, epsilon = 1e-12);
        assert!(far.y < 0.0);

        // coincident charge with r = 0 has no direction
        let here = force_from_charge(&unit_charge_at(v(0.0, 0.0), 1.0), o, o, 0.0, s);
        assert_eq!(here, v(0.0, 0.0));
    }

    #[test]
    fn total_force_symmetry_and_empty() {
        let o = v(360.0, 240.0);
        assert_eq!(total_force::<f64>(&[], o, o, 50.0, 150.0), v(0.0, 0.0));
        let pair = [unit_charge_at(v(80.0, 120.0), 0.6), unit_charge_at(v(80.0, -120.0), 0.6)];
        let f = total_force(&pair, o, o, 50.0, 150.0);
        assert_eq!(f.y, 0.0);
        assert!(f.x > 0.0);
    }

    #[test]
    fn total_force_matches_polar_oracle() {
        // independent route: magnitude from the piecewise law, direction from atan2
        fn oracle(q: f64, dx: f64, dy: f64, r: f64, s: f64) -> (f64, f64) {
            let d = dx.hypot(dy);
            let m = if d < r {
                0.0
            } else if d <= s + r {
                (d - r) / s * q
            } else {
                q
            };
            let phi = dy.atan2(dx);
            (m * phi.cos(), m * phi.sin())
        }
        let o = v(360.0, 240.0);
        let goal = v(1.0, 0.0);
        let at = |deg: f64, rad: f64| o + v(rad * deg.to_radians().cos(), rad * deg.to_radians().sin());
        let features = [at(0.0, 230.0), at(75.0, 120.0), at(-160.0, 90.0)];
        let charges = charge_map(&features, o, goal, 60f64.to_radians()).unwrap();
        let pc = v(350.0, 250.0);
        let f = total_force(&charges, pc, o, 50.0, 150.0);
        let energies = [1.0, 0.5, 0.0];
        let (mut ex, mut ey) = (0.0, 0.0);
        for (p, q) in features.iter().zip(energies) {
            let (fx, fy) = oracle(q, p.x - pc.x, p.y - pc.y, 50.0, 150.0);
            ex += fx;
            ey += fy;
        }
        assert_abs_diff_eq!(f.x, ex, epsilon = 1e-12);
        assert_abs_diff_eq!(f.y, ey, epsilon = 1e-12);
    }

    #[test]
    fn feature_velocity_cases() {
        let u = feature_velocity(v(3.0, 4.0)).unwrap();
        assert_abs_diff_eq!(u.x, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(u.y, 0.8, epsilon = 1e-15);
        assert!(feature_velocity(v(0.0, 0.0)).is_none());
        assert!(feature_velocity(v(-1e-12, 0.0)).is_none());
    }

    #[test]
    fn blend_cases() {
        let g = v(1.0, 0.0);
        let f = v(0.0, 1.0);
        assert_eq!(blend(g, Some(f), 1.0), g);
        assert_eq!(blend(g, Some(f), 0.0), f);
        assert_eq!(blend(g, Some(f), 0.5), v(0.5, 0.5));
        assert_eq!(blend(g, None, 0.2), g);
    }

    #[test]
    fn classify_cases() {
        let g = v(1.0, 0.0);
        assert_eq!(classify_point(g, v(1.0, 0.2)).unwrap(), RegionClass::GoalFriendly);
        assert_eq!(classify_point(g, v(-1.0, 0.2)).unwrap(), RegionClass::FeatureFriendly);
        assert_eq!(classify_point(g, v(0.0, 1.0)).unwrap(), RegionClass::GoalFriendly);
        assert!(classify_point(g, v(0.0, 0.0)).is_err());
    }

    #[test]
    fn local_minimum_cases() {
        let tol = LOCAL_MINIMUM_TOLERANCE;
        let g = v(1.0, 0.0);
        assert!(is_local_minimum(g, -g, tol));
        assert!(!is_local_minimum(g, g, tol));
        let inside = v((PI - tol / 2.0).cos(), (PI - tol / 2.0).sin());
        assert!(is_local_minimum(g, inside, tol));
        let outside = v((PI - 2.0 * tol).cos(), (PI - 2.0 * tol).sin());
        assert!(!is_local_minimum(g, outside, tol));
        assert!(!is_local_minimum(g, v(0.0, 1.0), tol));
        assert_abs_diff_eq!(tol, FRAC_PI_2 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn field_map_empty_and_single_source() {
        let o = v(360.0, 240.0);
        let params = FieldParams::simulation_defaults();
        let grid = PixelGrid::covering(720.0, 480.0, 36, 24);
        let empty = field_map(&[], o, v(1.0, 0.0), &params, &grid).unwrap();
        assert!(empty.cells.iter().all(|c| c.force == v(0.0, 0.0) && c.region == RegionClass::GoalFriendly));

        let src = o + v(100.0, 0.0);
        let single = field_map(&[src], o, v(1.0, 0.0), &params, &grid).unwrap();
        for cell in &single.cells {
            let to_src = src - cell.point;
            if to_src.norm() > params.dead_radius {
                let dir = cell.force.normalized().unwrap();
                assert_abs_diff_eq!(dir.cross(to_src.normalized().unwrap()), 0.0, epsilon = 1e-12);
                assert!(dir.dot(to_src) > 0.0);
            } else {
                assert_eq!(cell.force, v(0.0, 0.0));
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(FieldParams::new(1.2, 0.5, 50.0, 150.0).is_err());
        assert!(FieldParams::new(0.5, 0.5, -1.0, 150.0).is_err());
        assert!(FieldParams::new(0.5, 0.5, 50.0, 0.0).is_err());
        assert!(FieldParams::new(0.5, 7.0, 50.0, 150.0).is_err());
        let p = FieldParams::new(0.5f32, 0.5, 0.0, 1.0).unwrap();
        assert!((p.sector_angle() - (std::f32::consts::PI - 0.25)).abs() < 1e-6);
    }
}
