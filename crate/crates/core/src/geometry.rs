//! Planar poses and rigid transforms.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Robot pose in the odom frame. `theta` is kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Transform that maps points expressed in this pose's body frame into
    /// the parent frame.
    pub fn as_transform(&self) -> FrameTransform {
        FrameTransform::new(self.x, self.y, self.theta)
    }
}

/// Rigid 2D transform: rotate by `rotation`, then translate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTransform {
    pub translation: (f64, f64),
    pub rotation: f64,
}

impl Default for FrameTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl FrameTransform {
    pub fn new(tx: f64, ty: f64, rotation: f64) -> Self {
        Self {
            translation: (tx, ty),
            rotation: normalize_angle(rotation),
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let (s, c) = self.rotation.sin_cos();
        Point2::new(
            c * p.x - s * p.y + self.translation.0,
            s * p.x + c * p.y + self.translation.1,
        )
    }

    pub fn apply_pose(&self, pose: &Pose2D) -> Pose2D {
        let p = self.apply(pose.position());
        Pose2D::new(p.x, p.y, pose.theta + self.rotation)
    }

    pub fn inverse(&self) -> Self {
        let (s, c) = self.rotation.sin_cos();
        let (tx, ty) = self.translation;
        Self::new(-(c * tx + s * ty), s * tx - c * ty, -self.rotation)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &FrameTransform) -> Self {
        let t = self.apply(Point2::new(other.translation.0, other.translation.1));
        Self::new(t.x, t.y, self.rotation + other.rotation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_keeps_pi_and_maps_minus_pi() {
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-9);
        assert!((normalize_angle(0.5 - 4.0 * PI) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn transform_rotates_then_translates() {
        let t = FrameTransform::new(1.0, 2.0, PI / 2.0);
        let p = t.apply(Point2::new(1.0, 0.0));
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn compose_with_inverse_is_identity(
            tx in -50.0f64..50.0, ty in -50.0f64..50.0, r in -10.0f64..10.0,
            px in -10.0f64..10.0, py in -10.0f64..10.0,
        ) {
            let t = FrameTransform::new(tx, ty, r);
            let id = t.compose(&t.inverse());
            prop_assert!(id.translation.0.abs() < 1e-9);
            prop_assert!(id.translation.1.abs() < 1e-9);
            prop_assert!(id.rotation.abs() < 1e-9);
            let q = t.inverse().apply(t.apply(Point2::new(px, py)));
            prop_assert!((q.x - px).abs() < 1e-9 && (q.y - py).abs() < 1e-9);
        }

        #[test]
        fn normalized_angle_in_half_open_range(a in -1e4f64..1e4) {
            let n = normalize_angle(a);
            prop_assert!(n > -PI && n <= PI);
            prop_assert!(((n - a) / (2.0 * PI)).fract().abs() < 1e-6
                || (((n - a) / (2.0 * PI)).fract().abs() - 1.0).abs() < 1e-6);
        }
    }
}
