use serde::{Deserialize, Serialize};

use super::params::PlannerParams;
use super::rollout::{rollout, Trajectory};
use super::window::{dynamic_window, VelocityWindow};
use crate::costmap::{is_inadmissible, CostMap, MapGeometry, MAX_COST};
use crate::geometry::{normalize_angle, Point2, Pose2D};

/// Map cells swept by the trajectory: centers within `radius` of any pose
/// after the start. Cells outside the map are dropped. Sorted by index.
pub fn trajectory_cells(traj: &Trajectory, geometry: &MapGeometry, radius: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut seen = vec![false; geometry.len()];
    collect_cells(traj, geometry, radius, &mut seen, &mut out);
    out.sort_unstable();
    out
}

fn collect_cells(
    traj: &Trajectory,
    g: &MapGeometry,
    radius: f64,
    seen: &mut [bool],
    out: &mut Vec<usize>,
) {
    let reach = (radius / g.resolution).ceil() as i64;
    let r2 = (radius + 1e-9) * (radius + 1e-9);
    let n = g.size as i64;
    let c = g.center() as f64;
    for pose in traj.poses.iter().skip(1) {
        let (cx, cy) = g.cell_coords(pose.position());
        // the disc meets each row in a contiguous run around the column
        // nearest the pose; grow that run cell by cell
        let mid = cx.clamp(0, n - 1);
        for iy in (cy - reach).max(0)..=(cy + reach).min(n - 1) {
            let dy = (iy as f64 - c) * g.resolution - pose.y;
            let inside = |ix: i64| {
                let dx = (ix as f64 - c) * g.resolution - pose.x;
                dx * dx + dy * dy <= r2
            };
            if !inside(mid) {
                continue;
            }
            let mut lo = mid;
            while lo > 0 && inside(lo - 1) {
                lo -= 1;
            }
            let mut hi = mid;
            while hi < n - 1 && inside(hi + 1) {
                hi += 1;
            }
            let row = iy as usize * g.size;
            for ix in lo..=hi {
                let i = row + ix as usize;
                if !seen[i] {
                    seen[i] = true;
                    out.push(i);
                }
            }
        }
    }
    for &i in out.iter() {
        seen[i] = false;
    }
}

/// Sum of cell costs normalized by `cells * 100`; infinite on `MAX_COST`.
pub fn obs_cost(map: &CostMap, cells: &[usize]) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    let v = map.values();
    let mut sum = 0.0;
    for &i in cells {
        if v[i] == MAX_COST {
            return f64::INFINITY;
        }
        sum += v[i];
    }
    sum / (cells.len() as f64 * 100.0)
}

/// `true` unless some swept cell is above the threshold or `MAX_COST`.
pub fn admissible(map: &CostMap, cells: &[usize], threshold: f64) -> bool {
    let v = map.values();
    cells.iter().all(|&i| !is_inadmissible(v[i], threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub head: f64,
    pub obs: f64,
    pub vel: f64,
    pub total: f64,
}

fn heading_term(end: &Pose2D, goal: Point2, tolerance: f64) -> f64 {
    if end.position().distance(&goal) <= tolerance {
        return 0.0;
    }
    let bearing = (goal.y - end.y).atan2(goal.x - end.x);
    normalize_angle(bearing - end.theta).abs() / std::f64::consts::PI
}

/// Objective of a trajectory whose swept cells are already known. `goal` is
/// in the map's body frame.
pub fn objective(
    traj: &Trajectory,
    cells: &[usize],
    map: &CostMap,
    goal: Point2,
    params: &PlannerParams,
) -> Objective {
    let head = heading_term(traj.end(), goal, params.goal_tolerance);
    let obs = obs_cost(map, cells);
    let vel = (params.v_max - traj.v) / params.v_max;
    let [g1, g2, g3] = params.gamma;
    let total = if obs.is_finite() {
        g1 * head + g2 * obs + g3 * vel
    } else {
        f64::INFINITY
    };
    Objective {
        head,
        obs,
        vel,
        total,
    }
}

/// Per-cell quadrant membership and per-quadrant confidence used for
/// cautious stunting.
#[derive(Debug, Clone, PartialEq)]
pub struct Caution {
    pub quadrant_of: Vec<Option<u8>>,
    pub kappa: [f64; 4],
}

impl Caution {
    pub fn new(geometry: &MapGeometry, quadrant_cells: [&[(usize, usize)]; 4], kappa: [f64; 4]) -> Self {
        let mut quadrant_of = vec![None; geometry.len()];
        for (q, cells) in quadrant_cells.iter().enumerate() {
            for &(ix, iy) in cells.iter() {
                quadrant_of[geometry.index(ix, iy)] = Some(q as u8);
            }
        }
        Self { quadrant_of, kappa }
    }

    /// Smallest confidence among quadrants in which the swept cells carry a
    /// nonzero cost; 1 when there are none.
    pub fn factor(&self, map: &CostMap, cells: &[usize]) -> f64 {
        let v = map.values();
        cells
            .iter()
            .filter(|&&i| v[i] > 0.0)
            .filter_map(|&i| self.quadrant_of[i])
            .map(|q| self.kappa[q as usize])
            .fold(1.0, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityChoice {
    pub v: f64,
    pub omega: f64,
    pub objective: Objective,
    pub window: VelocityWindow,
    /// Stunting factor applied, if any.
    pub stunt: Option<f64>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanOutcome {
    Command(VelocityChoice),
    Frozen,
}

impl PlanOutcome {
    pub fn is_frozen(&self) -> bool {
        matches!(self, PlanOutcome::Frozen)
    }
}

/// Best admissible sample of the window's `n_v x n_omega` grid. Ties keep
/// the first sample in `v`-major order.
fn search_window(
    window: &VelocityWindow,
    map: &CostMap,
    goal: Point2,
    params: &PlannerParams,
    threshold: f64,
    seen: &mut [bool],
) -> Option<VelocityChoice> {
    let origin = Pose2D::default();
    let g = map.geometry;
    let mut best: Option<VelocityChoice> = None;
    let mut cells = Vec::new();
    for v in window.v_samples(params.n_v) {
        for omega in window.omega_samples(params.n_omega) {
            let traj = rollout(&origin, v, omega, params.horizon, params.rollout_step);
            cells.clear();
            collect_cells(&traj, &g, params.footprint_radius, seen, &mut cells);
            if !admissible(map, &cells, threshold) {
                continue;
            }
            let obj = objective(&traj, &cells, map, goal, params);
            if best.as_ref().is_none_or(|b| obj.total < b.objective.total) {
                let mut sorted = cells.clone();
                sorted.sort_unstable();
                best = Some(VelocityChoice {
                    v,
                    omega,
                    objective: obj,
                    window: *window,
                    stunt: None,
                    cells: sorted,
                });
            }
        }
    }
    best
}

/// Picks `(v, omega)` minimizing the objective over admissible samples of
/// the dynamic window. With `caution`, a provisional best that crosses
/// costly cells of a quadrant with confidence below 1 triggers a second
/// search in the velocity space scaled by that confidence.
pub fn select_velocity(
    current: (f64, f64),
    map: &CostMap,
    goal: Point2,
    caution: Option<&Caution>,
    params: &PlannerParams,
    threshold: f64,
) -> PlanOutcome {
    let mut seen = vec![false; map.geometry.len()];
    let window = dynamic_window(current, params, 1.0);
    let Some(best) = search_window(&window, map, goal, params, threshold, &mut seen) else {
        return PlanOutcome::Frozen;
    };
    let kappa = caution.map_or(1.0, |c| c.factor(map, &best.cells));
    if kappa >= 1.0 {
        return PlanOutcome::Command(best);
    }
    let stunted = dynamic_window(current, params, kappa);
    match search_window(&stunted, map, goal, params, threshold, &mut seen) {
        Some(mut choice) => {
            choice.stunt = Some(kappa);
            PlanOutcome::Command(choice)
        }
        None => PlanOutcome::Frozen,
    }
}
