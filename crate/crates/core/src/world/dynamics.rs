//! Robot kinematics with a lumped drag / snag model for pliable vegetation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{VegClass, WorldGrid};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Point2, Pose2D};

/// Commanded velocity. Holonomic components are expressed in the odom frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VelocityCommand {
    Unicycle { v: f64, omega: f64 },
    Holonomic { vx: f64, vy: f64 },
}

impl VelocityCommand {
    pub const STOP: VelocityCommand = VelocityCommand::Unicycle { v: 0.0, omega: 0.0 };

    pub fn is_zero(&self) -> bool {
        match *self {
            VelocityCommand::Unicycle { v, omega } => v == 0.0 && omega == 0.0,
            VelocityCommand::Holonomic { vx, vy } => vx == 0.0 && vy == 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub pose: Pose2D,
    /// Realized `(v, omega)` over the last step.
    pub velocity: (f64, f64),
    pub radius: f64,
    pub snagged: bool,
    /// Seconds of sustained straight holonomic motion still needed to break free.
    pub escape_remaining: f64,
}

impl RobotState {
    pub fn new(pose: Pose2D, radius: f64) -> Self {
        assert!(radius > 0.0, "robot radius must be positive");
        Self {
            pose,
            velocity: (0.0, 0.0),
            radius,
            snagged: false,
            escape_remaining: 0.0,
        }
    }

    /// Puts the robot into the snagged state regardless of the snag draw.
    pub fn force_snag(&mut self, escape_time: f64) {
        self.snagged = true;
        self.escape_remaining = escape_time;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsParams {
    /// Snag hazard rate (1/s) while any footprint cell is dense grass at
    /// least `snag_min_height` tall.
    pub p_snag: f64,
    pub escape_time: f64,
    /// Dense grass shorter than this (m) cannot snag the legs.
    pub snag_min_height: f64,
}

impl DynamicsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_snag >= 0.0 && self.p_snag.is_finite()) {
            return Err(Error::config("p_snag must be a nonnegative rate"));
        }
        if !(self.escape_time > 0.0) {
            return Err(Error::config("escape_time must be positive"));
        }
        if !(self.snag_min_height >= 0.0) {
            return Err(Error::config("snag_min_height must be nonnegative"));
        }
        Ok(())
    }
}

impl Default for DynamicsParams {
    fn default() -> Self {
        Self {
            p_snag: 0.0,
            escape_time: 1.0,
            snag_min_height: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventSet {
    pub collision: bool,
    pub snag_onset: bool,
    pub escaped: bool,
    pub out_of_bounds: bool,
}

/// Cells whose centers lie inside the disc (boundary inclusive).
pub fn footprint_cells(world: &WorldGrid, center: Point2, radius: f64) -> Vec<(usize, usize)> {
    let res = world.resolution();
    let (x0, y0) = world.cell_coords(Point2::new(center.x - radius, center.y - radius));
    let (x1, y1) = world.cell_coords(Point2::new(center.x + radius, center.y + radius));
    let mut out = Vec::new();
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            if !world.in_grid(ix, iy) {
                continue;
            }
            let cx = (ix as f64 + 0.5) * res;
            let cy = (iy as f64 + 0.5) * res;
            if (cx - center.x).hypot(cy - center.y) <= radius + 1e-9 {
                out.push((ix as usize, iy as usize));
            }
        }
    }
    out
}

/// True iff a non-pliable cell intersects the closed robot disc.
pub fn collision_check(world: &WorldGrid, pose: &Pose2D, radius: f64) -> bool {
    let res = world.resolution();
    let (x0, y0) = world.cell_coords(Point2::new(pose.x - radius, pose.y - radius));
    let (x1, y1) = world.cell_coords(Point2::new(pose.x + radius, pose.y + radius));
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            if !world.in_grid(ix, iy) {
                continue;
            }
            if !world.cell(ix as usize, iy as usize).class.is_non_pliable() {
                continue;
            }
            let nx = pose.x.clamp(ix as f64 * res, (ix + 1) as f64 * res);
            let ny = pose.y.clamp(iy as f64 * res, (iy + 1) as f64 * res);
            if (nx - pose.x).hypot(ny - pose.y) <= radius + 1e-9 {
                return true;
            }
        }
    }
    false
}

fn attenuation(world: &WorldGrid, state: &RobotState) -> f64 {
    let drag: f64 = footprint_cells(world, state.pose.position(), state.radius)
        .into_iter()
        .map(|(ix, iy)| world.cell(ix, iy).drag)
        .sum();
    (1.0 - drag).max(0.0)
}

/// Whether any footprint cell is dense grass at least `min_height` tall.
pub fn in_dense_grass(world: &WorldGrid, state: &RobotState, min_height: f64) -> bool {
    footprint_cells(world, state.pose.position(), state.radius)
        .into_iter()
        .any(|(ix, iy)| {
            let c = world.cell(ix, iy);
            c.class == VegClass::DenseGrass && c.plant_height >= min_height
        })
}

/// Advances the robot by `dt`.
///
/// Realized velocity is the command scaled by `max(0, 1 - sum of footprint
/// drag)`. While in dense grass at least `snag_min_height` tall a snag
/// starts with probability `p_snag * dt`; a snagged robot does not move until it has been driven by a
/// nonzero holonomic command for `escape_time` seconds in a row.
pub fn step_dynamics<R: Rng + ?Sized>(
    state: &RobotState,
    cmd: VelocityCommand,
    world: &WorldGrid,
    dt: f64,
    params: &DynamicsParams,
    rng: &mut R,
) -> (RobotState, EventSet) {
    debug_assert!(dt > 0.0);
    let mut next = *state;
    let mut events = EventSet::default();

    // one draw per step keeps the stream aligned whatever the terrain
    let draw: f64 = rng.random();
    if !next.snagged && in_dense_grass(world, &next, params.snag_min_height) && draw < params.p_snag * dt {
        next.force_snag(params.escape_time);
        events.snag_onset = true;
    }

    if next.snagged {
        match cmd {
            VelocityCommand::Holonomic { vx, vy } if vx != 0.0 || vy != 0.0 => {
                next.escape_remaining -= dt;
                if next.escape_remaining <= 1e-9 {
                    next.snagged = false;
                    next.escape_remaining = 0.0;
                    events.escaped = true;
                }
            }
            _ => next.escape_remaining = params.escape_time,
        }
        next.velocity = (0.0, 0.0);
    } else {
        let k = attenuation(world, &next);
        let p = next.pose;
        match cmd {
            VelocityCommand::Unicycle { v, omega } => {
                let (v, w) = (v * k, omega * k);
                let pose = if w.abs() < 1e-12 {
                    Pose2D::new(p.x + v * dt * p.theta.cos(), p.y + v * dt * p.theta.sin(), p.theta)
                } else {
                    let th = p.theta + w * dt;
                    let r = v / w;
                    Pose2D::new(
                        p.x + r * (th.sin() - p.theta.sin()),
                        p.y - r * (th.cos() - p.theta.cos()),
                        th,
                    )
                };
                next.pose = pose;
                next.velocity = (v, w);
            }
            VelocityCommand::Holonomic { vx, vy } => {
                next.pose = Pose2D::new(p.x + vx * k * dt, p.y + vy * k * dt, p.theta);
                next.velocity = ((vx * vx + vy * vy).sqrt() * k, 0.0);
            }
        }
        next.pose.theta = normalize_angle(next.pose.theta);
    }

    if !world.contains(next.pose.position()) {
        events.out_of_bounds = true;
    } else if collision_check(world, &next.pose, next.radius) {
        events.collision = true;
    }
    (next, events)
}
