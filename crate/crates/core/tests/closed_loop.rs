use vegnav::costmap::{build_layer, critical_sum, MapGeometry};
use vegnav::harness::{
    archive_to_json, bundled_scenario, metrics_to_csv, run_batch, run_trial, Outcome, ScenarioSpec,
    BUNDLED_SCENARIOS,
};
use vegnav::planner::Variant;
use vegnav::world::raycast_scan;
use vegnav::{FrameTransform, Pose2D};

fn open_field(name: &str, goal_x: f64) -> ScenarioSpec {
    let text = format!(
        r#"
name = "{name}"
duration = 30.0
start = {{ x = 1.0, y = 3.0, theta = 0.0 }}
goal = {{ x = {goal_x}, y = 3.0 }}

[world]
width = 100
height = 60
resolution = 0.1
"#
    );
    ScenarioSpec::from_toml(&text).unwrap()
}

#[test]
fn open_field_is_crossed_in_a_straight_line() {
    let spec = open_field("open", 6.0);
    for variant in Variant::ALL {
        let r = run_trial(&spec, variant, 3).unwrap();
        assert_eq!(r.outcome, Outcome::Success, "{variant:?}");
        let ratio = r.path_length / r.reach_distance;
        assert!((ratio - 1.0).abs() <= 0.02, "{variant:?}: ratio {ratio}");
        assert!(r.recoveries.is_empty());
    }
}

#[test]
fn grass_wall_freezes_the_baseline_but_not_vern() {
    let spec = bundled_scenario("scenario2").unwrap();
    assert_eq!(run_trial(&spec, Variant::DwaBaseline, 0).unwrap().outcome, Outcome::Frozen);
    assert_eq!(run_trial(&spec, Variant::Vern, 0).unwrap().outcome, Outcome::Success);
}

#[test]
fn tree_ahead_fills_all_three_layers_of_one_cell() {
    let spec = ScenarioSpec::from_toml(
        r#"
name = "tree"
start = { x = 1.0, y = 2.0, theta = 0.0 }
goal = { x = 5.0, y = 2.0 }

[world]
width = 60
height = 40
resolution = 0.1

[[world.blob]]
class = "tree"
kind = "disc"
center = [3.05, 2.05]
radius = 0.04
"#,
    )
    .unwrap();
    let world = spec.build_world().unwrap();
    let pose = Pose2D::new(1.05, 2.05, 0.0);
    let g = MapGeometry::default();
    let layers: Vec<_> = spec
        .lidar
        .heights
        .iter()
        .map(|z| {
            let scan = raycast_scan(&world, &pose, *z, 720, 4.0).unwrap();
            build_layer(&scan, g, FrameTransform::identity())
        })
        .collect();
    let crit = critical_sum(&layers[0], &layers[1], &layers[2]).unwrap();
    let full: Vec<usize> = (0..g.len()).filter(|i| crit.values()[*i] == 300.0).collect();
    assert!(!full.is_empty());
    for i in full {
        let c = g.cell_center(i % g.size, i / g.size);
        assert!((c.x - 2.0).abs() <= 0.1 && c.y.abs() <= 0.1, "{c:?}");
    }
}

#[test]
fn batch_has_one_record_per_trial_and_reruns_identically() {
    let specs: Vec<_> = (0..4).map(|i| open_field(&format!("open{i}"), 2.0 + 0.5 * i as f64)).collect();
    let a = run_batch(&specs, &Variant::ALL, 10, 5).unwrap();
    assert_eq!(a.records.len(), 160);
    assert_eq!(a.metrics().len(), 16);
    let b = run_batch(&specs, &Variant::ALL, 10, 5).unwrap();
    assert_eq!(archive_to_json(&a).unwrap(), archive_to_json(&b).unwrap());
    assert_eq!(metrics_to_csv(&a.metrics()), metrics_to_csv(&b.metrics()));
}

#[test]
fn single_trial_rates_are_zero_or_one() {
    let spec = bundled_scenario("scenario2").unwrap();
    let a = run_batch(&[spec], &[Variant::DwaBaseline, Variant::Vern], 1, 9).unwrap();
    for m in a.metrics() {
        for rate in [m.success_rate, m.freezing_rate, m.collision_rate, m.timeout_rate] {
            assert!(rate == 0.0 || rate == 1.0, "{m:?}");
        }
    }
}

#[test]
fn bundled_scenarios_survive_a_toml_round_trip() {
    for (name, _) in BUNDLED_SCENARIOS {
        let spec = bundled_scenario(name).unwrap();
        let back = ScenarioSpec::from_toml(&spec.to_toml().unwrap()).unwrap();
        assert_eq!(spec, back, "{name}");
        assert_eq!(spec.hash(), back.hash());
    }
}
