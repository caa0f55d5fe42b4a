use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_angle, Pose2D};

/// Forward-simulated constant-velocity motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub v: f64,
    pub omega: f64,
    /// Poses at `0, step, 2 step, ..`; the first is the start pose.
    pub poses: Vec<Pose2D>,
}

impl Trajectory {
    pub fn end(&self) -> &Pose2D {
        self.poses.last().expect("trajectory has a start pose")
    }
}

/// Exact arc integration of `(v, omega)` from `pose` over `horizon` seconds.
pub fn rollout(pose: &Pose2D, v: f64, omega: f64, horizon: f64, step: f64) -> Trajectory {
    debug_assert!(step > 0.0);
    let n = (horizon / step).round().max(1.0) as usize;
    let (x0, y0, th0) = (pose.x, pose.y, pose.theta);
    let (s0, c0) = th0.sin_cos();
    let poses = (0..=n)
        .map(|i| {
            let t = i as f64 * step;
            if omega.abs() < 1e-9 {
                Pose2D {
                    x: x0 + v * t * c0,
                    y: y0 + v * t * s0,
                    theta: th0,
                }
            } else {
                let th = th0 + omega * t;
                let r = v / omega;
                Pose2D {
                    x: x0 + r * (th.sin() - s0),
                    y: y0 - r * (th.cos() - c0),
                    theta: normalize_angle(th),
                }
            }
        })
        .collect();
    Trajectory { v, omega, poses }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line() {
        let t = rollout(&Pose2D::new(0.0, 0.0, 0.0), 1.0, 0.0, 1.0, 0.1);
        assert_eq!(t.poses.len(), 11);
        assert!((t.end().x - 1.0).abs() < 1e-12 && t.end().y.abs() < 1e-12);
    }

    #[test]
    fn rotation_in_place() {
        let t = rollout(&Pose2D::new(1.0, 2.0, 0.0), 0.0, 1.0, 1.0, 0.1);
        assert!(t.poses.iter().all(|p| p.x == 1.0 && p.y == 2.0));
        assert!((t.end().theta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_arc() {
        let t = rollout(&Pose2D::new(0.0, 0.0, 0.0), 1.0, 1.0, 1.0, 0.1);
        assert!((t.end().x - 1f64.sin()).abs() < 1e-12);
        assert!((t.end().y - (1.0 - 1f64.cos())).abs() < 1e-12);
        assert!((t.end().x - 0.841).abs() < 1e-3 && (t.end().y - 0.460).abs() < 1e-3);
    }

    #[test]
    fn arc_matches_fine_euler() {
        let t = rollout(&Pose2D::new(0.5, -1.0, 0.7), 0.8, -0.6, 1.5, 0.5);
        let (mut x, mut y, mut th) = (0.5, -1.0, 0.7f64);
        let h = 1e-5;
        for _ in 0..(1.5 / h) as usize {
            x += 0.8 * th.cos() * h;
            y += 0.8 * th.sin() * h;
            th += -0.6 * h;
        }
        assert!((t.end().x - x).abs() < 1e-4 && (t.end().y - y).abs() < 1e-4);
    }
}
