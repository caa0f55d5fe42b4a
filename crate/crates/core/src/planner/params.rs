use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    /// Heading, obstacle and velocity weights of the objective.
    pub gamma: [f64; 3],
    pub v_max: f64,
    pub omega_max: f64,
    pub a_v: f64,
    pub a_omega: f64,
    /// Control period (s).
    pub dt: f64,
    pub horizon: f64,
    pub rollout_step: f64,
    pub n_v: usize,
    pub n_omega: usize,
    /// Swept-area radius used when collecting trajectory cells.
    pub footprint_radius: f64,
    pub goal_tolerance: f64,
    pub k_p: f64,
    pub freeze_window: f64,
    /// Consecutive cycles without an admissible velocity before the planner
    /// counts as frozen.
    pub freeze_debounce: usize,
    /// Net displacement below which a full window counts as no progress.
    pub epsilon: f64,
    pub t_safe: f64,
    pub safe_capacity: usize,
    pub arrival_tolerance: f64,
    pub unsafe_radius: f64,
    /// Arc length along the cheapest local route to the heading target (m).
    pub guide_lookahead: f64,
    /// Weight of normalized cell cost in the route search.
    pub guide_cost_weight: f64,
    /// Extra per-cell charge within `footprint_radius` of an inadmissible cell,
    /// doubling toward the cell itself.
    pub guide_block_penalty: f64,
    /// Width of the band outside `footprint_radius` with a graded charge.
    pub guide_margin: f64,
    /// Charge at the inner edge of that band.
    pub guide_inflation: f64,
    /// Extra route cost tolerated to keep last cycle's target.
    pub guide_hysteresis: f64,
    /// Minimum distance between a recovery target and any unsafe location.
    pub recovery_clearance: f64,
    /// Recovery attempts longer than this are abandoned.
    pub recovery_timeout: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            gamma: [1.0, 2.0, 1.0],
            v_max: 1.0,
            omega_max: 1.0,
            a_v: 2.0,
            a_omega: 3.0,
            dt: 0.1,
            horizon: 1.5,
            rollout_step: 0.1,
            n_v: 11,
            n_omega: 21,
            footprint_radius: 0.35,
            goal_tolerance: 0.3,
            k_p: 1.0,
            freeze_window: 5.0,
            freeze_debounce: 5,
            epsilon: 0.3,
            t_safe: 1.0,
            safe_capacity: 256,
            arrival_tolerance: 0.2,
            unsafe_radius: 0.3,
            guide_lookahead: 2.0,
            guide_cost_weight: 1.0,
            guide_block_penalty: 100.0,
            guide_margin: 0.5,
            guide_inflation: 5.0,
            guide_hysteresis: 1.0,
            recovery_clearance: 1.0,
            recovery_timeout: 20.0,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.v_max,
            self.omega_max,
            self.a_v,
            self.a_omega,
            self.dt,
            self.horizon,
            self.rollout_step,
            self.footprint_radius,
            self.goal_tolerance,
            self.k_p,
            self.freeze_window,
            self.epsilon,
            self.t_safe,
            self.arrival_tolerance,
            self.unsafe_radius,
            self.recovery_timeout,
            self.guide_lookahead,
            self.guide_margin,
        ];
        if positive.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::config("planner parameters must be positive and finite"));
        }
        if self.gamma.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::config("objective weights must be positive"));
        }
        if self.n_v < 5 || self.n_omega < 5 {
            return Err(Error::config("velocity grid needs at least 5 samples per axis"));
        }
        if !(self.guide_cost_weight >= 0.0 && self.guide_block_penalty >= 0.0 && self.guide_inflation >= 0.0 && self.guide_hysteresis >= 0.0) {
            return Err(Error::config("route search weights must be non-negative"));
        }
        if self.recovery_clearance < self.unsafe_radius + self.footprint_radius {
            return Err(Error::config("recovery clearance must cover the unsafe radius plus the footprint"));
        }
        if self.freeze_debounce == 0 {
            return Err(Error::config("freeze debounce must be at least one cycle"));
        }
        if self.safe_capacity == 0 {
            return Err(Error::config("safe buffer capacity must be positive"));
        }
        Ok(())
    }
}
