//! Field map against a from-scratch per-point evaluation.

use featnav_core::field::{self, FieldParams, PixelGrid, RegionClass};
use featnav_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Force law written out in plain floats, independent of the library helpers.
fn oracle_force(features: &[(f64, f64)], o: (f64, f64), goal: (f64, f64), at: (f64, f64), p: &FieldParams<f64>) -> (f64, f64) {
    let theta_cs = std::f64::consts::PI - p.theta_cs_hat / 2.0;
    let goal_angle = goal.1.atan2(goal.0);
    let (mut fx, mut fy) = (0.0, 0.0);
    for &(x, y) in features {
        let (ox, oy) = (x - o.0, y - o.1);
        if ox == 0.0 && oy == 0.0 {
            continue;
        }
        let mut theta = (oy.atan2(ox) - goal_angle).abs();
        if theta > std::f64::consts::PI {
            theta = 2.0 * std::f64::consts::PI - theta;
        }
        let q = if theta <= theta_cs { 1.0 - theta / theta_cs } else { 0.0 };
        let (dx, dy) = (x - at.0, y - at.1);
        let d = dx.hypot(dy);
        if d < p.dead_radius || d == 0.0 {
            continue;
        }
        let m = if d <= p.spread + p.dead_radius { (d - p.dead_radius) / p.spread * q } else { q };
        fx += m * dx / d;
        fy += m * dy / d;
    }
    (fx, fy)
}

#[test]
fn field_map_matches_per_point_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let params = FieldParams::simulation_defaults();
    let o = Vec2::new(360.0, 240.0);
    let grid = PixelGrid::covering(720.0, 480.0, 72, 48);
    for trial in 0..5 {
        let n = 10 + 20 * trial;
        let features: Vec<_> = (0..n)
            .map(|_| Vec2::new(rng.gen_range(0.0..720.0), rng.gen_range(0.0..480.0)))
            .collect();
        let raw: Vec<_> = features.iter().map(|p| (p.x, p.y)).collect();
        let goal = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let map = field::field_map(&features, o, goal, &params, &grid).unwrap();
        assert_eq!(map.cells.len(), 72 * 48);

        let charges = field::charge_map(&features, o, goal, params.theta_cs_hat).unwrap();
        for row in 0..grid.rows {
            for col in 0..grid.cols {
                let cell = map.cell(col, row);
                let at = grid.point(col, row);
                assert_eq!(cell.point, at);

                let direct = field::total_force(&charges, at, o, params.dead_radius, params.spread);
                assert!((cell.force - direct).norm() <= 1e-12);

                let (ex, ey) = oracle_force(&raw, (o.x, o.y), (goal.x, goal.y), (at.x, at.y), &params);
                let scale = 1.0f64.max(ex.hypot(ey));
                assert!(
                    (cell.force.x - ex).abs() <= 1e-12 * scale && (cell.force.y - ey).abs() <= 1e-12 * scale,
                    "cell ({col}, {row}): {:?} vs ({ex}, {ey})",
                    cell.force
                );

                let expect = if ex.hypot(ey) <= field::FORCE_EPSILON || ex * goal.x + ey * goal.y >= 0.0 {
                    RegionClass::GoalFriendly
                } else {
                    RegionClass::FeatureFriendly
                };
                assert_eq!(cell.region, expect, "cell ({col}, {row})");
            }
        }
    }
}

#[test]
fn empty_frame_is_uniformly_goal_friendly() {
    let grid = PixelGrid::covering(720.0, 480.0, 72, 48);
    let map = field::field_map(&[], Vec2::new(360.0, 240.0), Vec2::new(1.0, 0.0), &FieldParams::simulation_defaults(), &grid)
        .unwrap();
    assert!(map.cells.iter().all(|c| c.force == Vec2::zero() && c.region == RegionClass::GoalFriendly));
}

#[test]
fn single_charge_gives_radial_field() {
    let o = Vec2::new(360.0, 240.0);
    let feature: Vec2<f64> = Vec2::new(400.0, 240.0);
    let grid = PixelGrid::covering(720.0, 480.0, 36, 24);
    let map = field::field_map(&[feature], o, Vec2::new(1.0, 0.0), &FieldParams::simulation_defaults(), &grid).unwrap();
    for c in &map.cells {
        let to = feature - c.point;
        if c.force.norm() > 0.0 {
            assert!(c.force.cross(to).abs() <= 1e-9 * to.norm() && c.force.dot(to) > 0.0);
        } else {
            assert!(to.norm() <= 50.0);
        }
    }
}
