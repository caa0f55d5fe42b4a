//! Dynamic-window velocity search over the vegetation-aware cost map,
//! cautious velocity stunting, adverse-phenomena detection and holonomic
//! recovery toward stored safe locations.

mod adverse;
mod guidance;
mod params;
mod recovery;
mod rollout;
mod search;
mod variant;
mod window;

pub use adverse::{detect_adverse, detect_sustained, Adverse, HistoryEntry};
pub use guidance::{clearance, cost_to_goal, step_costs, steering_target};
pub use params::PlannerParams;
pub use recovery::{
    record_safe, recovery_command, segment_cells, segment_traversable, select_recovery_point,
    Mode, PlannerState, RecoveryError,
};
pub use rollout::{rollout, Trajectory};
pub use search::{
    admissible, objective, obs_cost, select_velocity, trajectory_cells, Caution, Objective,
    PlanOutcome, VelocityChoice,
};
pub use variant::Variant;
pub use window::{dynamic_window, VelocityWindow};
