use std::f64::consts::PI;

use featnav_core::field::{self, Charge, RegionClass};
use featnav_core::{PixelVec64, Vec2};
use proptest::prelude::*;

const R: f64 = 50.0;
const S: f64 = 150.0;

fn v(x: f64, y: f64) -> PixelVec64 {
    Vec2::new(x, y)
}

fn close(a: PixelVec64, b: PixelVec64, tol: f64) -> bool {
    let scale = 1.0_f64.max(a.norm()).max(b.norm());
    (a - b).norm() <= tol * scale
}

fn charge_at(offset: PixelVec64, energy: f64) -> Charge<f64> {
    Charge {
        offset,
        energy,
        sector_angle: PI,
    }
}

fn pixel() -> impl Strategy<Value = PixelVec64> {
    (-400.0..1100.0f64, -300.0..800.0f64).prop_map(|(x, y)| v(x, y))
}

fn unit_dir() -> impl Strategy<Value = PixelVec64> {
    (0.0..2.0 * PI).prop_map(|a| v(a.cos(), a.sin()))
}

fn config() -> impl Strategy<Value = (Vec<PixelVec64>, PixelVec64, PixelVec64, PixelVec64, f64)> {
    (
        prop::collection::vec(pixel(), 1..40),
        pixel(),
        unit_dir(),
        pixel(),
        0.0..(2.0 * PI - 1e-3),
    )
}

fn force_of(features: &[PixelVec64], o: PixelVec64, goal: PixelVec64, at: PixelVec64, theta_hat: f64) -> PixelVec64 {
    let charges = field::charge_map(features, o, goal, theta_hat).unwrap();
    field::total_force(&charges, at, o, R, S)
}

fn rotate_about(p: PixelVec64, c: PixelVec64, a: f64) -> PixelVec64 {
    c + (p - c).rotated(a)
}

#[test]
fn force_is_continuous_at_both_knots() {
    for energy in [0.0, 0.25, 1.0] {
        for dir in [v(1.0, 0.0), v(0.0, -1.0), v(0.6, 0.8)] {
            let at = |d: f64| field::force_from_charge(&charge_at(dir * d, energy), v(0.0, 0.0), v(0.0, 0.0), R, S);
            for knot in [R, R + S] {
                let h = 1e-10;
                assert!((at(knot - h) - at(knot)).norm() <= 1e-9);
                assert!((at(knot + h) - at(knot)).norm() <= 1e-9);
            }
            assert_eq!(at(R).norm(), 0.0);
            assert!((at(R + S).norm() - energy).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn force_magnitude_is_monotone_in_distance(d1 in 0.0..1000.0f64, d2 in 0.0..1000.0f64, q in 0.0..=1.0f64, a in 0.0..2.0 * PI) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let dir = v(a.cos(), a.sin());
        let m = |d: f64| field::force_from_charge(&charge_at(dir * d, q), v(0.0, 0.0), v(0.0, 0.0), R, S).norm();
        prop_assert!(m(lo) <= m(hi) + 1e-12);
        prop_assert!(m(hi) <= q + 1e-12);
    }

    #[test]
    fn force_points_at_the_charge(offset in pixel(), at in pixel(), q in 0.01..=1.0f64) {
        let o = v(360.0, 240.0);
        let c = charge_at(offset - o, q);
        let f = field::force_from_charge(&c, at, o, R, S);
        if f.norm() > 0.0 {
            let towards = offset - at;
            prop_assert!(f.cross(towards).abs() <= 1e-9 * towards.norm() && f.dot(towards) > 0.0);
        }
    }

    #[test]
    fn rotating_the_frame_rotates_the_force((features, o, goal, at, theta_hat) in config(), a in 0.0..2.0 * PI) {
        let f = force_of(&features, o, goal, at, theta_hat);
        let rotated: Vec<_> = features.iter().map(|&p| rotate_about(p, o, a)).collect();
        let g = force_of(&rotated, o, goal.rotated(a), rotate_about(at, o, a), theta_hat);
        prop_assert!(close(g, f.rotated(a), 1e-9), "{g:?} vs {:?}", f.rotated(a));
    }

    #[test]
    fn translating_the_frame_leaves_the_force((features, o, goal, at, theta_hat) in config(), t in pixel()) {
        let f = force_of(&features, o, goal, at, theta_hat);
        let moved: Vec<_> = features.iter().map(|&p| p + t).collect();
        let g = force_of(&moved, o + t, goal, at + t, theta_hat);
        prop_assert!(close(g, f, 1e-9), "{g:?} vs {f:?}");
    }

    #[test]
    fn mirrored_features_cancel_laterally(half in prop::collection::vec(pixel(), 1..30), theta_hat in 0.0..(2.0 * PI - 1e-3)) {
        let o = v(360.0, 240.0);
        let mut features = Vec::new();
        for p in half {
            features.push(p);
            features.push(v(p.x, 2.0 * o.y - p.y));
        }
        let f = force_of(&features, o, v(1.0, 0.0), o, theta_hat);
        prop_assert!(f.y.abs() <= 1e-9);
    }

    #[test]
    fn charges_lie_in_unit_interval(features in prop::collection::vec(pixel(), 0..40), goal in unit_dir(), theta_hat in 0.0..(2.0 * PI - 1e-3)) {
        let o = v(360.0, 240.0);
        for c in field::charge_map(&features, o, goal, theta_hat).unwrap() {
            prop_assert!((0.0..=1.0).contains(&c.energy));
            prop_assert_eq!(c.sector_angle, PI - theta_hat / 2.0);
        }
    }

    #[test]
    fn feature_velocity_is_unit_or_absent(x in -1e3..1e3f64, y in -1e3..1e3f64) {
        match field::feature_velocity(v(x, y)) {
            Some(d) => prop_assert!((d.norm() - 1.0).abs() <= 1e-12),
            None => prop_assert!(v(x, y).norm() <= field::FORCE_EPSILON),
        }
    }

    #[test]
    fn blend_endpoints_are_exact(g in unit_dir(), f in unit_dir(), lambda in 0.0..=1.0f64) {
        prop_assert_eq!(field::blend(g, Some(f), 1.0), g);
        prop_assert_eq!(field::blend(g, Some(f), 0.0), f);
        prop_assert_eq!(field::blend(g, None, lambda), g);
        let b = field::blend(g, Some(f), lambda);
        prop_assert!(close(b, g * lambda + f * (1.0 - lambda), 1e-15));
    }

    #[test]
    fn classification_ignores_scale(g in unit_dir(), f in unit_dir(), a in 1e-3..1e3f64, b in 1e-3..1e3f64) {
        let base = field::classify_point(g, f).unwrap();
        prop_assert_eq!(field::classify_point(g * a, f * b).unwrap(), base);
        let expect = if g.dot(f) >= 0.0 { RegionClass::GoalFriendly } else { RegionClass::FeatureFriendly };
        prop_assert_eq!(base, expect);
    }

    #[test]
    fn local_minimum_implies_feature_friendly(g in unit_dir(), f in unit_dir()) {
        if field::is_local_minimum(g, f, field::LOCAL_MINIMUM_TOLERANCE) {
            prop_assert_eq!(field::classify_point(g, f).unwrap(), RegionClass::FeatureFriendly);
        }
    }
}

#[test]
fn single_precision_matches_double() {
    let features = [v(500.0, 100.0), v(120.0, 400.0), v(700.0, 260.0)];
    let o = v(360.0, 240.0);
    let f64_force = force_of(&features, o, v(1.0, 0.2), v(300.0, 200.0), 1.0);
    let features32: Vec<Vec2<f32>> = features.iter().map(|p| Vec2::new(p.x as f32, p.y as f32)).collect();
    let o32 = Vec2::new(360.0f32, 240.0);
    let charges = field::charge_map(&features32, o32, Vec2::new(1.0, 0.2), 1.0).unwrap();
    let f32_force = field::total_force(&charges, Vec2::new(300.0, 200.0), o32, 50.0, 150.0);
    assert!((f64::from(f32_force.x) - f64_force.x).abs() < 1e-4);
    assert!((f64::from(f32_force.y) - f64_force.y).abs() < 1e-4);
}
