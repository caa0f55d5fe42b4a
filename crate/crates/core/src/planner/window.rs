use serde::{Deserialize, Serialize};

use super::params::PlannerParams;

/// Velocity intervals searched in one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityWindow {
    pub v: (f64, f64),
    pub omega: (f64, f64),
    /// Velocity limits used for the static space (after any stunting).
    pub v_limit: f64,
    pub omega_limit: f64,
    /// Set when the acceleration window did not reach the static space and
    /// the interval collapsed onto its nearest reachable edge.
    pub clamped: bool,
}

impl VelocityWindow {
    /// `n` evenly spaced values over `[lo, hi]`, endpoints included.
    fn samples(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| {
            if n == 1 || hi == lo {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
    }

    pub fn v_samples(&self, n: usize) -> impl Iterator<Item = f64> {
        Self::samples(self.v.0, self.v.1, n)
    }

    pub fn omega_samples(&self, n: usize) -> impl Iterator<Item = f64> {
        Self::samples(self.omega.0, self.omega.1, n)
    }

    pub fn contains(&self, v: f64, omega: f64) -> bool {
        const TOL: f64 = 1e-12;
        v >= self.v.0 - TOL && v <= self.v.1 + TOL && omega >= self.omega.0 - TOL && omega <= self.omega.1 + TOL
    }
}

fn intersect(center: f64, reach: f64, lo: f64, hi: f64) -> ((f64, f64), bool) {
    let a = (center - reach).max(lo);
    let b = (center + reach).min(hi);
    if a <= b {
        ((a, b), false)
    } else if b < lo {
        ((lo, lo), true)
    } else {
        ((hi, hi), true)
    }
}

/// Reachable velocities within one control period, intersected with
/// `[0, scale * v_max] x [-scale * omega_max, scale * omega_max]`.
///
/// `scale` is the cautious stunting factor (1 leaves the limits unchanged).
/// When the current velocity is already above a stunted limit the interval
/// collapses onto the limit.
pub fn dynamic_window(current: (f64, f64), params: &PlannerParams, scale: f64) -> VelocityWindow {
    debug_assert!(scale > 0.0 && scale <= 1.0);
    let v_limit = params.v_max * scale;
    let omega_limit = params.omega_max * scale;
    let (v, cv) = intersect(current.0, params.a_v * params.dt, 0.0, v_limit);
    let (omega, co) = intersect(current.1, params.a_omega * params.dt, -omega_limit, omega_limit);
    VelocityWindow {
        v,
        omega,
        v_limit,
        omega_limit,
        clamped: cv || co,
    }
}
