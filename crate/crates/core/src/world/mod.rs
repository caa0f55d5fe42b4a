//! Ground-truth vegetation world, robot kinematics and lidar simulation.

mod dynamics;
mod grid;
mod raycast;

pub use dynamics::{
    collision_check, footprint_cells, in_dense_grass, step_dynamics, DynamicsParams, EventSet, RobotState,
    VelocityCommand,
};
pub use grid::{build_world, BlobShape, Cell, VegBlob, VegClass, WorldGrid, WorldSpec};
pub use raycast::{raycast_scan, Lidar, ScanLayer};

/// Default robot footprint radius (m).
pub const ROBOT_RADIUS: f64 = 0.3;
