use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::params::PlannerParams;
use crate::costmap::{is_inadmissible, CostMap, UnsafeRegistry};
use crate::geometry::{Point2, Pose2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Normal,
    Cautious,
    Recovering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RecoveryError {
    #[error("no safe locations recorded")]
    EmptyBuffer,
    #[error("no recorded safe location is reachable along a traversable segment")]
    NoReachablePoint,
}

/// Cross-cycle planner memory, all locations in the odom frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerState {
    pub mode: Mode,
    safe: VecDeque<Point2>,
    capacity: usize,
    last_safe_t: f64,
    pub unsafe_points: UnsafeRegistry,
    target: Option<Point2>,
    /// Positions the robot has occupied, thinned to one per map cell.
    trail: Vec<Point2>,
}

const TRAIL_CAPACITY: usize = 8192;

impl PlannerState {
    pub fn new(params: &PlannerParams) -> Self {
        Self::with_unsafe(params, UnsafeRegistry::new(params.unsafe_radius))
    }

    /// Starts with previously marked unsafe locations.
    pub fn with_unsafe(params: &PlannerParams, unsafe_points: UnsafeRegistry) -> Self {
        Self {
            mode: Mode::Normal,
            safe: VecDeque::with_capacity(params.safe_capacity),
            capacity: params.safe_capacity,
            last_safe_t: 0.0,
            unsafe_points,
            target: None,
            trail: Vec::new(),
        }
    }

    pub fn safe_points(&self) -> impl ExactSizeIterator<Item = &Point2> {
        self.safe.iter()
    }

    pub fn target(&self) -> Option<Point2> {
        self.target
    }

    pub fn trail(&self) -> &[Point2] {
        &self.trail
    }

    pub fn note_position(&mut self, p: Point2, spacing: f64) {
        if self.trail.last().is_none_or(|q| q.distance(&p) >= spacing) {
            if self.trail.len() == TRAIL_CAPACITY {
                self.trail.remove(0);
            }
            self.trail.push(p);
        }
    }

    /// Normal/Cautious to Recovering; the only way into recovery.
    pub fn begin_recovery(&mut self, target: Point2) {
        debug_assert!(self.mode != Mode::Recovering);
        self.mode = Mode::Recovering;
        self.target = Some(target);
    }

    /// Leaves recovery once within `tolerance` of the target.
    pub fn finish_recovery_if_arrived(&mut self, p: Point2, tolerance: f64) -> bool {
        match self.target {
            Some(t) if self.mode == Mode::Recovering && t.distance(&p) <= tolerance => {
                self.mode = Mode::Normal;
                self.target = None;
                true
            }
            _ => false,
        }
    }

    /// Stamps all unsafe locations onto a freshly built map.
    pub fn stamp_unsafe(&self, map: &mut CostMap) -> usize {
        self.unsafe_points.stamp(map)
    }
}

/// Appends the position every `t_safe` seconds while nothing adverse is
/// detected and the robot is not recovering.
pub fn record_safe(state: &mut PlannerState, t: f64, p: Point2, adverse_free: bool, t_safe: f64) -> bool {
    if !adverse_free || state.mode == Mode::Recovering || t - state.last_safe_t < t_safe - 1e-9 {
        return false;
    }
    if state.safe.len() == state.capacity {
        state.safe.pop_front();
    }
    state.safe.push_back(p);
    state.last_safe_t = t;
    true
}

/// Map cells crossed by the straight segment between two odom points,
/// sampled at a quarter cell. Cells outside the map are omitted; the second
/// value reports whether any sample fell outside.
pub fn segment_cells(map: &CostMap, a: Point2, b: Point2) -> (Vec<(usize, usize)>, bool) {
    let g = map.geometry;
    let (pa, pb) = (map.to_body(a), map.to_body(b));
    let n = ((pa.distance(&pb) / (g.resolution / 4.0)).ceil() as usize).max(1);
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut outside = false;
    for i in 0..=n {
        let s = i as f64 / n as f64;
        let p = Point2::new(pa.x + (pb.x - pa.x) * s, pa.y + (pb.y - pa.y) * s);
        match g.cell_of(p) {
            Some(c) if !out.contains(&c) => out.push(c),
            Some(_) => {}
            None => outside = true,
        }
    }
    (out, outside)
}

/// Segment check used for recovery targets. A cell passes if it is not
/// `MAX_COST` and either lies at or below the admissibility threshold or
/// was already driven over (within `trail_radius` of the trail). Cells
/// within `skip_radius` of the robot are ignored, since the robot's own spot
/// has just been marked unsafe.
pub fn segment_traversable(
    map: &CostMap,
    robot: Point2,
    target: Point2,
    threshold: f64,
    trail: &[Point2],
    trail_radius: f64,
    skip_radius: f64,
) -> bool {
    let (cells, outside) = segment_cells(map, robot, target);
    if outside {
        return false;
    }
    cells.into_iter().all(|(ix, iy)| {
        let c = map.to_odom(map.geometry.cell_center(ix, iy));
        if c.distance(&robot) <= skip_radius + 1e-9 {
            return true;
        }
        let v = map.get(ix, iy);
        if v == crate::costmap::MAX_COST {
            return false;
        }
        !is_inadmissible(v, threshold) || trail.iter().any(|t| t.distance(&c) <= trail_radius)
    })
}

/// Marks the robot's location unsafe (also on `map`) and returns the
/// recorded safe location nearest the goal that is clear of every unsafe
/// area and reachable along a traversable straight segment.
pub fn select_recovery_point(
    state: &mut PlannerState,
    robot: &Pose2D,
    goal: Point2,
    map: &mut CostMap,
    threshold: f64,
    params: &PlannerParams,
) -> Result<Point2, RecoveryError> {
    let here = robot.position();
    state.unsafe_points.add(here);
    state.unsafe_points.stamp(map);
    if state.safe.is_empty() {
        return Err(RecoveryError::EmptyBuffer);
    }
    let clearance = params.recovery_clearance;
    let trail_radius = params.unsafe_radius - map.geometry.resolution / 2.0;
    let mut best: Option<(f64, Point2)> = None;
    for &s in &state.safe {
        if state.unsafe_points.points().iter().any(|u| u.distance(&s) <= clearance) {
            continue;
        }
        if !segment_traversable(map, here, s, threshold, &state.trail, trail_radius, params.unsafe_radius) {
            continue;
        }
        let d = s.distance(&goal);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, s));
        }
    }
    best.map(|(_, p)| p).ok_or(RecoveryError::NoReachablePoint)
}

/// Proportional holonomic command toward the target, odom frame, with the
/// speed clamped to `v_max` and no rotation.
pub fn recovery_command(pose: &Pose2D, target: Point2, k_p: f64, v_max: f64) -> (f64, f64) {
    let (vx, vy) = (k_p * (target.x - pose.x), k_p * (target.y - pose.y));
    let speed = vx.hypot(vy);
    if speed > v_max {
        (vx * v_max / speed, vy * v_max / speed)
    } else {
        (vx, vy)
    }
}
