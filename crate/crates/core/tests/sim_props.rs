use featnav_core::sim::*;
use featnav_core::Vec2;
use proptest::prelude::*;

fn episode(kind: ScenarioKind, mode: Mode, seed: u64) -> Episode {
    let world = make_scenario(kind, seed);
    run_episode(&world, &EpisodeSetup::new(mode, seed)).unwrap()
}

#[test]
fn identical_inputs_give_identical_logs() {
    for kind in [ScenarioKind::CorridorGap, ScenarioKind::DeadEnd] {
        let a = episode(kind, Mode::ActiveAutotune, 5);
        let b = episode(kind, Mode::ActiveAutotune, 5);
        assert_eq!(a, b);
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.log.write_csv(&mut ca).unwrap();
        b.log.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
    }
}

#[test]
fn passive_commands_are_parallel_to_the_line() {
    for (kind, feedback) in [
        (ScenarioKind::UniformTexture, PoseFeedback::Estimated),
        (ScenarioKind::CorridorGap, PoseFeedback::MotionCapture),
    ] {
        let mut setup = EpisodeSetup::new(Mode::Passive, 2);
        setup.sim.feedback = feedback;
        let ep = run_episode(&make_scenario(kind, 2), &setup).unwrap();
        let axis = Vec2::new(1.0, 0.0);
        for r in &ep.log.records {
            let c = r.command.normalized().unwrap();
            assert!(c.cross(axis).abs() <= 1e-9 && c.dot(axis) > 0.0);
        }
        assert_eq!(ep.metrics.max_lateral_deviation, 0.0);
        assert_eq!(ep.metrics.overhead_ratio, 1.0);
    }
}

#[test]
fn uniform_passive_reaches_goal() {
    let m = episode(ScenarioKind::UniformTexture, Mode::Passive, 0).metrics;
    assert!(m.goal_success && m.localization_success);
    assert_eq!(m.final_estimation_error, 0.0);
}

#[test]
fn corridor_passive_loses_tracking() {
    let m = episode(ScenarioKind::CorridorGap, Mode::Passive, 0).metrics;
    assert!(!m.localization_success);
    assert!(m.localized_fraction < 1.0);
}

#[test]
fn corridor_active_detours_and_keeps_tracking() {
    let m = episode(ScenarioKind::CorridorGap, Mode::ActiveFixed, 0).metrics;
    assert!(m.goal_success && m.localization_success);
    assert!(m.path_length > 10.0);
}

#[test]
fn dead_end_reports_a_stall() {
    let m = episode(ScenarioKind::DeadEnd, Mode::ActiveFixed, 3).metrics;
    assert!(m.stalled && !m.goal_success);
}

#[test]
fn mirrored_frame_on_axis_has_no_lateral_feature_velocity() {
    let world = make_scenario(ScenarioKind::SymmetricBifurcation, 3);
    let setup = EpisodeSetup::new(Mode::ActiveFixed, 3);
    let settings = ControllerSettings {
        mode: Mode::ActiveFixed,
        field: setup.field,
        schedule: setup.schedule,
        max_speed: 0.5,
        k_p: 1.0,
        dt: 1.0 / 30.0,
        filter_cutoff_hz: 20.0,
        local_min_tol: featnav_core::LOCAL_MINIMUM_TOLERANCE,
    };
    let model = DetectionModel {
        dropout_rate: 0.0,
        ..DetectionModel::default()
    };
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    for i in 0..=100 {
        let pose = featnav_core::PlanarPose::at(Vec2::new(i as f64 * 0.1, 0.0));
        let det = detect_features(&pose, 1.0, &world, &setup.rig, &model, &mut rng);
        let mut filter = featnav_core::LowPassFilter::new();
        let out = control_step(&settings, &mut filter, &setup.rig, &pose, world.goal, &det);
        if let Some(vf) = out.diagnostics.feature_velocity {
            assert!(vf.y.abs() <= 1e-9, "x = {}: {vf:?}", pose.position.x);
        }
    }
}

#[test]
fn scenario_round_trips_through_toml() {
    for kind in ScenarioKind::ALL {
        let world = make_scenario(kind, 9);
        let text = toml::to_string(&world).unwrap();
        let back: WorldScenario = toml::from_str(&text).unwrap();
        assert_eq!(back, world);
    }
}

#[test]
fn log_round_trips_through_csv() {
    let ep = episode(ScenarioKind::CorridorGap, Mode::ActiveAutotune, 1);
    let mut buf = Vec::new();
    ep.log.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(log::CSV_HEADER.as_bytes()));
    assert_eq!(TrajectoryLog::read_csv(buf.as_slice()).unwrap(), ep.log);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn episode_invariants(kind_idx in 0usize..6, mode_idx in 0usize..3, seed in 0u64..1000) {
        let kind = ScenarioKind::ALL[kind_idx];
        let mode = [Mode::Passive, Mode::ActiveFixed, Mode::ActiveAutotune][mode_idx];
        let setup = EpisodeSetup::new(mode, seed);
        let ep = run_episode(&make_scenario(kind, seed), &setup).unwrap();
        let m = &ep.metrics;
        prop_assert!(m.overhead_ratio >= 1.0);
        prop_assert!((0.0..=1.0).contains(&m.localized_fraction));
        prop_assert_eq!(m.steps, ep.log.len());
        if m.localization_success {
            prop_assert_eq!(m.final_estimation_error, 0.0);
        }
        if mode == Mode::ActiveAutotune {
            for r in &ep.log.records {
                prop_assert!(r.lambda >= setup.schedule.lambda_min && r.lambda <= setup.schedule.lambda_max);
            }
        }
        for r in &ep.log.records {
            prop_assert!(r.command.norm() <= setup.sim.max_speed + 1e-12);
        }
    }
}
