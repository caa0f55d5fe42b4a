//! Property checks runnable outside the test harness (`vegnav check-invariants`).
//!
//! Each check draws seeded random cases and reports the first violation.

use rand::Rng;
use std::f64::consts::FRAC_PI_2;

use crate::costmap::{
    admissibility_threshold, apply_clearing, clear_value, is_inadmissible, ClearingWeights,
    CostMap, MapGeometry, QuadrantEvidence, MAX_COST,
};
use crate::fewshot::{loss_gradient, pair_loss, EmbedderParams, LabeledPair};
use crate::geometry::{FrameTransform, Point2, Pose2D};
use crate::harness::{bundled_scenario, run_trial};
use crate::perception::{extract_footprints, CameraModel, QuadrantClassification};
use crate::planner::{select_velocity, PlanOutcome, PlannerParams, Variant};
use crate::rng::{derive_seed, label_hash, seeded_rng, SimRng};
use crate::world::{
    raycast_scan, step_dynamics, Cell, DynamicsParams, RobotState, VegClass, VelocityCommand,
    WorldGrid,
};

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub name: &'static str,
    pub cases: usize,
    /// First violation found, if any.
    pub violation: Option<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

type Check = fn(&mut SimRng) -> (usize, Option<String>);

const CHECKS: [(&str, Check); 9] = [
    ("transform compose with inverse is identity", transform_inverse),
    ("pliable clear values stay below non-pliable ones", pliable_below_non_pliable),
    ("confidence decreases with distance", confidence_monotone),
    ("raycast hits match a fine point sampler", raycast_soundness),
    ("more drag never means more displacement", drag_monotone),
    ("contrastive gradient matches finite differences", gradient_check),
    ("quadrant footprints are disjoint", footprints_disjoint),
    ("cleared costs stay in [0, 100] or MAX_COST", cleared_range),
    ("selected velocities are admissible and inside the window", selection_admissible),
];

/// Runs every check plus a closed-loop determinism check.
pub fn run_all(seed: u64) -> Vec<InvariantReport> {
    let mut out: Vec<InvariantReport> = CHECKS
        .iter()
        .map(|(name, check)| {
            let mut rng = seeded_rng(derive_seed(&[seed, label_hash(name)]));
            let (cases, violation) = check(&mut rng);
            InvariantReport {
                name,
                cases,
                violation,
            }
        })
        .collect();
    out.push(trial_determinism(seed));
    out
}

fn transform_inverse(rng: &mut SimRng) -> (usize, Option<String>) {
    let n = 10_000;
    for _ in 0..n {
        let t = FrameTransform::new(
            rng.random_range(-100.0..100.0),
            rng.random_range(-100.0..100.0),
            rng.random_range(-10.0..10.0),
        );
        let id = t.compose(&t.inverse());
        let p = Point2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let q = id.apply(p);
        if (q.x - p.x).abs() > 1e-9 || (q.y - p.y).abs() > 1e-9 {
            return (n, Some(format!("{t:?} maps {p:?} to {q:?}")));
        }
    }
    (n, None)
}

fn random_weights(rng: &mut SimRng) -> ClearingWeights {
    let w_s = rng.random_range(0.01..5.0);
    let w_d = w_s + rng.random_range(0.01..5.0);
    let w_npv = rng.random_range(0.01..5.0);
    let b_npv = w_d + 1.0 + rng.random_range(0.01..5.0);
    ClearingWeights::new(w_s, w_d, w_npv, b_npv).expect("constructed to be valid")
}

fn classification(class: VegClass, kappa: f64) -> QuadrantClassification {
    QuadrantClassification {
        class,
        distance: -kappa.ln() / 2.0,
        confidence: kappa,
        pliable: class.is_pliable(),
    }
}

fn pliable_below_non_pliable(rng: &mut SimRng) -> (usize, Option<String>) {
    let (draws, samples) = (20, 10_000);
    for _ in 0..draws {
        let w = random_weights(rng);
        let mut pv_max = f64::NEG_INFINITY;
        let mut npv_min = f64::INFINITY;
        for _ in 0..samples {
            let kappa = 1.0 - rng.random::<f64>();
            let h = rng.random_range(0.0..=FRAC_PI_2);
            for class in VegClass::TRAINED {
                let v = clear_value(&classification(class, kappa), h, &w);
                if class.is_pliable() {
                    pv_max = pv_max.max(v);
                } else {
                    npv_min = npv_min.min(v);
                }
            }
        }
        if !(pv_max <= w.w_d + 1.0 && w.w_d + 1.0 < w.b_npv && w.b_npv <= npv_min) {
            return (draws * samples, Some(format!("{w:?}: pv max {pv_max}, npv min {npv_min}")));
        }
    }
    (draws * samples, None)
}

fn confidence_monotone(rng: &mut SimRng) -> (usize, Option<String>) {
    use crate::perception::{summarize, PredictionMatrix};
    let n = 10_000;
    for _ in 0..n {
        let alpha = rng.random_range(0.1..10.0);
        let d1 = rng.random::<f64>();
        let d2 = rng.random::<f64>();
        let m = PredictionMatrix([[d1, 1.0, 1.0, 1.0], [d2, 1.0, 1.0, 1.0], [1.0; 4], [1.0; 4]]);
        let s = summarize(&m, alpha);
        let (k1, k2) = (s[0].confidence, s[1].confidence);
        let ordered = (d1 < d2 && k1 > k2) || (d1 > d2 && k1 < k2) || d1 == d2;
        if !ordered || !(k1 > 0.0 && k1 <= 1.0) {
            return (n, Some(format!("d ({d1}, {d2}) gave kappa ({k1}, {k2})")));
        }
    }
    (n, None)
}

fn random_world(rng: &mut SimRng, n: usize, fill: f64) -> WorldGrid {
    let mut w = WorldGrid::empty(n, n, 0.1);
    for iy in 0..n {
        for ix in 0..n {
            if rng.random::<f64>() < fill {
                let class = VegClass::TRAINED[rng.random_range(0..4)];
                w.set(
                    ix,
                    iy,
                    Cell {
                        class,
                        plant_height: rng.random_range(0.1..3.0),
                        drag: 0.0,
                    },
                );
            }
        }
    }
    w
}

fn raycast_soundness(rng: &mut SimRng) -> (usize, Option<String>) {
    let cases = 40;
    let mut beams = 0;
    for _ in 0..cases {
        let w = random_world(rng, 50, 0.03);
        let pose = Pose2D::new(rng.random_range(1.0..4.0), rng.random_range(1.0..4.0), rng.random_range(-3.0..3.0));
        let z = [0.2, 0.7, 1.2][rng.random_range(0..3)];
        let scan = match raycast_scan(&w, &pose, z, 32, 3.0) {
            Ok(s) => s,
            Err(e) => return (beams, Some(e.to_string())),
        };
        for (b, r) in scan.bearings.iter().zip(&scan.ranges) {
            beams += 1;
            let (s, c) = (pose.theta + b).sin_cos();
            // first occluding 1 mm sample
            let mut first = 3.0;
            for k in 0..3000 {
                let t = k as f64 * 1e-3;
                match w.cell_at(Point2::new(pose.x + c * t, pose.y + s * t)) {
                    Some(cell) if cell.occludes(z) => {
                        first = t;
                        break;
                    }
                    Some(_) => {}
                    None => break,
                }
            }
            // no occluder before the reported hit, and an occluder just past it
            let ok = if *r < 3.0 {
                let behind = Point2::new(pose.x + c * (r + 1e-6), pose.y + s * (r + 1e-6));
                first >= *r - 1e-9 && w.cell_at(behind).is_some_and(|cell| cell.occludes(z))
            } else {
                first >= 3.0 - 1e-3
            };
            if !ok {
                return (beams, Some(format!("pose {pose:?} bearing {b}: range {r}, sampler {first}")));
            }
        }
    }
    (beams, None)
}

fn drag_monotone(rng: &mut SimRng) -> (usize, Option<String>) {
    let n = 500;
    for _ in 0..n {
        let mut w = WorldGrid::empty(40, 40, 0.1);
        for iy in 15..25 {
            for ix in 15..25 {
                w.set(ix, iy, Cell { class: VegClass::DenseGrass, plant_height: 1.0, drag: rng.random_range(0.0..0.05) });
            }
        }
        let mut heavier = w.clone();
        let (ix, iy) = (rng.random_range(15..25), rng.random_range(15..25));
        heavier.cell_mut(ix, iy).drag += rng.random_range(0.0..0.5);
        let s = RobotState::new(Pose2D::new(2.0, 2.0, rng.random_range(-3.0..3.0)), 0.3);
        let cmd = VelocityCommand::Unicycle { v: rng.random_range(0.0..1.0), omega: rng.random_range(-1.0..1.0) };
        let p = DynamicsParams::default();
        let (a, _) = step_dynamics(&s, cmd, &w, 0.1, &p, &mut seeded_rng(1));
        let (b, _) = step_dynamics(&s, cmd, &heavier, 0.1, &p, &mut seeded_rng(1));
        let da = a.pose.position().distance(&s.pose.position());
        let db = b.pose.position().distance(&s.pose.position());
        if db > da + 1e-12 {
            return (n, Some(format!("extra drag at ({ix}, {iy}) moved {db} > {da}")));
        }
    }
    (n, None)
}

fn gradient_check(rng: &mut SimRng) -> (usize, Option<String>) {
    let n = 50;
    let margin = 1.0;
    let eps = 1e-5;
    for case in 0..n {
        let params = EmbedderParams::init(6, 5, 3, rng.random());
        let a: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pair = LabeledPair { a, b, label: rng.random_range(0..2) };
        let analytic = loss_gradient(&params, &pair, margin);
        let mut max_err: f64 = 0.0;
        for i in 0..params.weights.len() {
            let mut up = params.clone();
            up.weights[i] += eps;
            let mut down = params.clone();
            down.weights[i] -= eps;
            let fd = (pair_loss(&up, &pair, margin) - pair_loss(&down, &pair, margin)) / (2.0 * eps);
            let scale = analytic[i].abs().max(fd.abs()).max(1e-6);
            max_err = max_err.max((analytic[i] - fd).abs() / scale);
        }
        let h = |x: &[f64]| crate::fewshot::embed(&params, x).expect("dims match");
        let d = crate::fewshot::pair_distance(&h(&pair.a), &h(&pair.b)).expect("dims match");
        if (d - margin).abs() > 1e-3 && max_err > 1e-4 {
            return (case + 1, Some(format!("relative error {max_err} at distance {d}")));
        }
    }
    (n, None)
}

fn footprints_disjoint(rng: &mut SimRng) -> (usize, Option<String>) {
    let n = 50;
    let w = WorldGrid::empty(100, 100, 0.1);
    let g = MapGeometry::default();
    for _ in 0..n {
        let pose = Pose2D::new(rng.random_range(1.0..9.0), rng.random_range(1.0..9.0), rng.random_range(-3.0..3.0));
        let fps = extract_footprints(&w, &pose, &CameraModel::default(), &g);
        let mut owner = vec![0u8; w.width() * w.height()];
        for fp in &fps {
            for (ix, iy) in &fp.world_cells {
                let o = &mut owner[iy * w.width() + ix];
                if *o != 0 {
                    return (n, Some(format!("world cell ({ix}, {iy}) in two quadrants at {pose:?}")));
                }
                *o = 1;
            }
        }
    }
    (n, None)
}

fn random_low_layer(rng: &mut SimRng, g: MapGeometry) -> CostMap {
    let mut low = CostMap::new(g, FrameTransform::identity());
    for iy in 0..g.size {
        for ix in 0..g.size {
            if rng.random::<f64>() < 0.1 {
                low.set(ix, iy, 100.0);
            }
        }
    }
    low
}

fn cleared_range(rng: &mut SimRng) -> (usize, Option<String>) {
    let n = 200;
    let g = MapGeometry::default();
    let fps = extract_footprints(&WorldGrid::empty(10, 10, 0.1), &Pose2D::new(0.5, 0.5, 0.0), &CameraModel::default(), &g);
    for _ in 0..n {
        let w = random_weights(rng);
        let mut low = random_low_layer(rng, g);
        low.set(rng.random_range(0..g.size), rng.random_range(0..g.size), MAX_COST);
        let ev: Vec<QuadrantEvidence<'_>> = fps
            .iter()
            .map(|fp| QuadrantEvidence {
                cells: &fp.map_cells,
                classification: classification(VegClass::TRAINED[rng.random_range(0..4)], 1.0 - rng.random::<f64>()),
                height: rng.random_range(0.0..=FRAC_PI_2),
            })
            .collect();
        let out = apply_clearing(&low, &ev, &w);
        for (v, l) in out.values().iter().zip(low.values()) {
            let ok = (*v == MAX_COST) == (*l == MAX_COST) && (*v == MAX_COST || (0.0..=100.0 + 1e-9).contains(v));
            if !ok || (*l == 0.0 && *v != 0.0) {
                return (n, Some(format!("low {l} became {v}")));
            }
        }
    }
    (n, None)
}

fn selection_admissible(rng: &mut SimRng) -> (usize, Option<String>) {
    let n = 30;
    let p = PlannerParams::default();
    let thr = admissibility_threshold(&ClearingWeights::default());
    for _ in 0..n {
        let mut map = random_low_layer(rng, MapGeometry::default());
        for v in [40usize, 41, 39] {
            map.set(v, 40, 0.0);
        }
        let cur = (rng.random_range(0.0..1.0), rng.random_range(-1.0..1.0));
        let goal = Point2::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        if let PlanOutcome::Command(c) = select_velocity(cur, &map, goal, None, &p, thr) {
            if !c.window.contains(c.v, c.omega) {
                return (n, Some(format!("({}, {}) outside {:?}", c.v, c.omega, c.window)));
            }
            if let Some(&i) = c.cells.iter().find(|&&i| is_inadmissible(map.values()[i], thr)) {
                return (n, Some(format!("trajectory crosses cell {i} with cost {}", map.values()[i])));
            }
        }
    }
    (n, None)
}

fn trial_determinism(seed: u64) -> InvariantReport {
    let name = "identical seeds give identical trials";
    let violation = (|| {
        let spec = bundled_scenario("entrapment").map_err(|e| e.to_string())?;
        let a = run_trial(&spec, Variant::Vern, seed).map_err(|e| e.to_string())?;
        let b = run_trial(&spec, Variant::Vern, seed).map_err(|e| e.to_string())?;
        let (ja, jb) = (serde_json::to_string(&a), serde_json::to_string(&b));
        if ja.map_err(|e| e.to_string())? != jb.map_err(|e| e.to_string())? {
            return Err("serialized results differ".to_string());
        }
        Ok(())
    })()
    .err();
    InvariantReport {
        name,
        cases: 1,
        violation,
    }
}
