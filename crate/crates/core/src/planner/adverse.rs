use serde::{Deserialize, Serialize};

use crate::geometry::Pose2D;

/// One control step: the pose reached, whether the command driving the step
/// was nonzero, and whether the planner reported no admissible velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub t: f64,
    pub pose: Pose2D,
    pub cmd_nonzero: bool,
    pub frozen: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Adverse {
    None,
    Freezing,
    Entrapment,
}

impl Adverse {
    pub fn is_none(self) -> bool {
        self == Adverse::None
    }
}

fn stationary(a: &Pose2D, b: &Pose2D) -> bool {
    a.x == b.x && a.y == b.y && a.theta == b.theta
}

/// Classifies the most recent `window` seconds of history.
///
/// A planner freeze in the latest entry is `Freezing` at once; otherwise
/// the result is that of [`detect_sustained`].
pub fn detect_adverse(history: &[HistoryEntry], window: f64, epsilon: f64) -> Adverse {
    match history.last() {
        Some(last) if last.frozen => Adverse::Freezing,
        _ => detect_sustained(history, window, epsilon),
    }
}

/// Window-based conditions only:
///
/// * every step over the window commanded but motionless is `Entrapment`;
/// * net displacement below `epsilon` over the window is `Freezing`, unless
///   the latest step shows the entrapment signature (the robot is held, not
///   dithering).
///
/// Histories shorter than the window give `None`.
pub fn detect_sustained(history: &[HistoryEntry], window: f64, epsilon: f64) -> Adverse {
    let Some(last) = history.last() else {
        return Adverse::None;
    };
    if last.t - history[0].t < window - 1e-9 {
        return Adverse::None;
    }
    let start = history
        .iter()
        .position(|e| e.t >= last.t - window - 1e-9)
        .expect("last entry is inside the window");
    let span = &history[start..];
    let held = |w: &[HistoryEntry]| w[1].cmd_nonzero && stationary(&w[0].pose, &w[1].pose);
    if span.windows(2).all(held) {
        return Adverse::Entrapment;
    }
    let held_now = held(&history[history.len() - 2..]);
    let moved = span[0].pose.position().distance(&last.pose.position());
    if moved < epsilon && !held_now {
        return Adverse::Freezing;
    }
    Adverse::None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: usize, dt: f64, speed: f64, cmd: bool) -> Vec<HistoryEntry> {
        (0..=n)
            .map(|i| HistoryEntry {
                t: i as f64 * dt,
                pose: Pose2D::new(i as f64 * dt * speed, 0.0, 0.0),
                cmd_nonzero: cmd,
                frozen: false,
            })
            .collect()
    }

    #[test]
    fn frozen_is_immediate() {
        let mut h = run(3, 0.1, 1.0, true);
        h.last_mut().unwrap().frozen = true;
        assert_eq!(detect_adverse(&h, 5.0, 0.3), Adverse::Freezing);
    }

    #[test]
    fn commanded_without_motion_is_entrapment() {
        let h = run(50, 0.1, 0.0, true);
        assert_eq!(detect_adverse(&h, 5.0, 0.3), Adverse::Entrapment);
    }

    #[test]
    fn progress_is_fine() {
        assert_eq!(detect_adverse(&run(60, 0.1, 0.5, true), 5.0, 0.3), Adverse::None);
    }

    #[test]
    fn short_history_is_none() {
        assert_eq!(detect_adverse(&run(20, 0.1, 0.0, true), 5.0, 0.3), Adverse::None);
    }

    #[test]
    fn standing_still_is_freezing() {
        assert_eq!(detect_adverse(&run(50, 0.1, 0.0, false), 5.0, 0.3), Adverse::Freezing);
    }

    #[test]
    fn dithering_is_freezing() {
        let h: Vec<_> = (0..=60)
            .map(|i| HistoryEntry {
                t: i as f64 * 0.1,
                pose: Pose2D::new(if i % 2 == 0 { 0.0 } else { 0.1 }, 0.0, 0.0),
                cmd_nonzero: true,
                frozen: false,
            })
            .collect();
        assert_eq!(detect_adverse(&h, 5.0, 0.3), Adverse::Freezing);
    }

    #[test]
    fn fresh_snag_is_not_freezing() {
        // moved 0.2 m then held for the rest of the window
        let mut h = run(50, 0.1, 0.0, true);
        for (i, e) in h.iter_mut().enumerate() {
            e.pose.x = (i.min(2) as f64) * 0.1;
        }
        assert_eq!(detect_adverse(&h, 5.0, 0.3), Adverse::None);
    }
}
