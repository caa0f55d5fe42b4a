use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use vegnav::costmap::{
    apply_clearing, clear_value, mark_unsafe, ClearingWeights, CostMap, MapGeometry,
    QuadrantEvidence, MAX_COST,
};
use vegnav::perception::{summarize, PredictionMatrix, QuadrantClassification};
use vegnav::planner::{dynamic_window, recovery_command, rollout, PlannerParams};
use vegnav::world::VegClass;
use vegnav::{FrameTransform, Point2, Pose2D};

fn weights() -> impl Strategy<Value = ClearingWeights> {
    (0.01..5.0f64, 1e-3..5.0f64, 0.01..5.0f64, 1e-3..5.0f64).prop_map(|(w_s, dd, w_npv, db)| {
        let w_d = w_s + dd;
        ClearingWeights::new(w_s, w_d, w_npv, w_d + 1.0 + db).unwrap()
    })
}

fn quadrant(class: VegClass, kappa: f64) -> QuadrantClassification {
    QuadrantClassification { class, distance: -kappa.ln(), confidence: kappa, pliable: class.is_pliable() }
}

proptest! {
    #[test]
    fn pliable_never_costs_more_than_non_pliable(
        w in weights(),
        k1 in 1e-9..=1.0f64,
        k2 in 1e-9..=1.0f64,
        h1 in 0.0..=FRAC_PI_2,
        h2 in 0.0..=FRAC_PI_2,
        pv in prop::sample::select(vec![VegClass::SparseGrass, VegClass::DenseGrass]),
        npv in prop::sample::select(vec![VegClass::Bush, VegClass::Tree]),
    ) {
        let a = clear_value(&quadrant(pv, k1), h1, &w);
        let b = clear_value(&quadrant(npv, k2), h2, &w);
        prop_assert!(a <= w.w_d + 1.0 + 1e-12);
        prop_assert!(b >= w.b_npv);
        prop_assert!(a < b);
    }

    #[test]
    fn height_penalty_of_non_pliable_dominates(h in 0.0..=FRAC_PI_2) {
        prop_assert!(h.sin() >= 2.0 * h / std::f64::consts::PI - 1e-15);
    }

    #[test]
    fn clearing_never_raises_a_cost(
        w in weights(),
        costs in prop::collection::vec(prop::sample::select(vec![0.0, 100.0, MAX_COST]), 49),
        kappa in 1e-6..=1.0f64,
        h in 0.0..=FRAC_PI_2,
        class in prop::sample::select(VegClass::TRAINED.to_vec()),
    ) {
        let g = MapGeometry::new(7, 0.1).unwrap();
        let cells: Vec<(usize, usize)> = (0..7).flat_map(|y| (0..7).map(move |x| (x, y))).collect();
        let mut low = CostMap::new(g, FrameTransform::identity());
        for (&(ix, iy), c) in cells.iter().zip(costs) {
            low.set(ix, iy, c);
        }
        let ev = [QuadrantEvidence { cells: &cells, classification: quadrant(class, kappa), height: h }];
        let out = apply_clearing(&low, &ev, &w);
        for (a, b) in low.values().iter().zip(out.values()) {
            prop_assert!(b <= a);
            prop_assert_eq!(*a == MAX_COST, *b == MAX_COST);
        }
    }

    #[test]
    fn confidence_falls_with_distance(d in prop::collection::vec(0.0..1.0f64, 16), alpha in 0.1..10.0f64) {
        let rows = [
            [d[0], d[1], d[2], d[3]],
            [d[4], d[5], d[6], d[7]],
            [d[8], d[9], d[10], d[11]],
            [d[12], d[13], d[14], d[15]],
        ];
        let s = summarize(&PredictionMatrix::new(rows).unwrap(), alpha);
        for (q, row) in s.iter().zip(rows) {
            let min = row.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(q.distance, min);
            prop_assert!((q.confidence - (-alpha * min).exp()).abs() < 1e-12);
            prop_assert_eq!(q.pliable, q.class.is_pliable());
        }
    }

    #[test]
    fn rollout_keeps_constant_speed_and_turn_rate(v in 0.0..1.0f64, omega in -1.0..1.0f64) {
        let t = rollout(&Pose2D::new(0.0, 0.0, 0.0), v, omega, 1.5, 0.1);
        prop_assert_eq!(t.poses.len(), 16);
        for pair in t.poses.windows(2) {
            let step = pair[0].position().distance(&pair[1].position());
            // chord of an arc of length v * 0.1
            let arc = v * 0.1;
            let chord = if omega.abs() < 1e-9 { arc } else { 2.0 * (v / omega).abs() * (omega * 0.1 / 2.0).abs().sin() };
            prop_assert!((step - chord).abs() < 1e-9);
            prop_assert!(pair[1].theta > -std::f64::consts::PI && pair[1].theta <= std::f64::consts::PI);
        }
    }

    #[test]
    fn window_stays_inside_the_velocity_limits(v in 0.0..1.0f64, omega in -1.0..1.0f64, scale in 0.05..=1.0f64) {
        let p = PlannerParams::default();
        let w = dynamic_window((v, omega), &p, scale);
        prop_assert!(w.v.0 >= 0.0 && w.v.0 <= w.v.1 && w.v.1 <= p.v_max * scale + 1e-12);
        prop_assert!(w.omega.0 <= w.omega.1);
        prop_assert!(w.omega.1 <= p.omega_max * scale + 1e-12 && w.omega.0 >= -p.omega_max * scale - 1e-12);
    }

    #[test]
    fn recovery_command_is_clamped_and_aimed_at_the_target(
        x in -5.0..5.0f64, y in -5.0..5.0f64, tx in -5.0..5.0f64, ty in -5.0..5.0f64,
        k_p in 0.1..3.0f64, v_max in 0.1..2.0f64,
    ) {
        let (vx, vy) = recovery_command(&Pose2D::new(x, y, 0.0), Point2::new(tx, ty), k_p, v_max);
        prop_assert!(vx.hypot(vy) <= v_max + 1e-12);
        let (dx, dy) = (tx - x, ty - y);
        // parallel and pointing the same way
        prop_assert!((vx * dy - vy * dx).abs() < 1e-9);
        prop_assert!(vx * dx + vy * dy >= 0.0);
    }

    // radii of at least half a cell diagonal, so the cell holding the point is covered
    #[test]
    fn stamping_twice_changes_nothing(px in -4.0..4.0f64, py in -4.0..4.0f64, radius in 0.08..0.6f64) {
        let mut once = CostMap::centered_on(MapGeometry::default(), &Pose2D::new(1.0, 2.0, 0.5));
        mark_unsafe(&mut once, Point2::new(px, py), radius);
        let mut twice = once.clone();
        mark_unsafe(&mut twice, Point2::new(px, py), radius);
        prop_assert_eq!(once.values(), twice.values());
        if let Some((ix, iy)) = once.cell_of_odom(Point2::new(px, py)) {
            prop_assert_eq!(once.get(ix, iy), MAX_COST);
        }
    }

    #[test]
    fn transforms_undo_each_other(x in -50.0..50.0f64, y in -50.0..50.0f64, th in -10.0..10.0f64,
                                  px in -50.0..50.0f64, py in -50.0..50.0f64) {
        let t = FrameTransform::new(x, y, th);
        let p = Point2::new(px, py);
        let q = t.inverse().apply(t.apply(p));
        prop_assert!((q.x - p.x).abs() < 1e-9 && (q.y - p.y).abs() < 1e-9);
    }
}
