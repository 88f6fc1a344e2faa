//! Kinematic single-track vehicle model.
//!
//! The reference point of every [`Pose`] is the midpoint of the rear axle. Motion
//! primitives hold one of six control actions for a given arc length at unit speed,
//! which traces either a straight segment or a circular arc of the minimum turning
//! radius. Propagation is closed-form.

use std::f64::consts::{PI, TAU};

use crate::error::{PlanError, Result};

/// Wraps an angle into `[-π, π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to TAU for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Smallest signed difference `a - b` between two headings.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

/// Continuous vehicle configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn distance(&self, other: &Pose) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Expresses `other` in the frame attached to `self`.
    pub fn relative(&self, other: &Pose) -> Pose {
        let (s, c) = self.theta.sin_cos();
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        Pose::new(c * dx + s * dy, -s * dx + c * dy, other.theta - self.theta)
    }

    /// Maps a point given in this pose's local frame into the world frame.
    pub fn transform_point(&self, local_x: f64, local_y: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (
            self.x + c * local_x - s * local_y,
            self.y + s * local_x + c * local_y,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }

    pub fn flipped(self) -> Direction {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Steering {
    Left,
    Straight,
    Right,
}

impl Steering {
    /// Sign of the path curvature; left turns are counter-clockwise.
    pub fn curvature_sign(self) -> f64 {
        match self {
            Steering::Left => 1.0,
            Steering::Straight => 0.0,
            Steering::Right => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlAction {
    pub direction: Direction,
    pub steering: Steering,
}

impl ControlAction {
    pub const fn new(direction: Direction, steering: Steering) -> Self {
        Self {
            direction,
            steering,
        }
    }

    /// The action that retraces this one backwards along the same curve.
    pub fn reversed(self) -> Self {
        Self::new(self.direction.flipped(), self.steering)
    }
}

/// Every control action, in the fixed expansion order used by the planners.
pub const ACTIONS: [ControlAction; 6] = [
    ControlAction::new(Direction::Forward, Steering::Left),
    ControlAction::new(Direction::Forward, Steering::Straight),
    ControlAction::new(Direction::Forward, Steering::Right),
    ControlAction::new(Direction::Reverse, Steering::Left),
    ControlAction::new(Direction::Reverse, Steering::Straight),
    ControlAction::new(Direction::Reverse, Steering::Right),
];

/// Vehicle geometry and kinematic limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    pub wheelbase: f64,
    pub body_length: f64,
    pub body_width: f64,
    /// Distance from the rear axle to the rear bumper.
    pub rear_overhang: f64,
    pub alpha_max: f64,
    pub n_disks: usize,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            wheelbase: 2.6,
            body_length: 4.0,
            body_width: 1.8,
            rear_overhang: 0.65,
            alpha_max: 0.6,
            n_disks: 3,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.wheelbase,
            self.body_length,
            self.body_width,
            self.rear_overhang,
            self.alpha_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(PlanError::InvalidVehicle("non-finite dimension".into()));
        }
        if !(self.alpha_max > 0.0 && self.alpha_max < PI / 2.0) {
            return Err(PlanError::InvalidVehicle(format!(
                "alpha_max {} outside (0, pi/2)",
                self.alpha_max
            )));
        }
        if self.wheelbase <= 0.0 {
            return Err(PlanError::InvalidVehicle(
                "wheelbase must be positive".into(),
            ));
        }
        if self.body_length <= self.wheelbase {
            return Err(PlanError::InvalidVehicle(
                "body length must exceed the wheelbase".into(),
            ));
        }
        if self.body_width <= 0.0 {
            return Err(PlanError::InvalidVehicle(
                "body width must be positive".into(),
            ));
        }
        if self.rear_overhang < 0.0 || self.rear_overhang > self.body_length - self.wheelbase {
            return Err(PlanError::InvalidVehicle(
                "rear overhang must lie in [0, length - wheelbase]".into(),
            ));
        }
        if self.n_disks == 0 {
            return Err(PlanError::InvalidVehicle(
                "n_disks must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn min_turning_radius(&self) -> f64 {
        min_turning_radius(self)
    }
}

/// `R_min = L / tan(alpha_max)`.
pub fn min_turning_radius(params: &VehicleParams) -> f64 {
    params.wheelbase / params.alpha_max.tan()
}

/// Closed-form propagation of a constant control along a path of length `arc_length`
/// with curvature `steering.curvature_sign() / radius`.
pub fn propagate(pose: &Pose, action: ControlAction, arc_length: f64, radius: f64) -> Pose {
    let ds = action.direction.sign() * arc_length;
    match action.steering {
        Steering::Straight => {
            let (s, c) = pose.theta.sin_cos();
            Pose::new(pose.x + ds * c, pose.y + ds * s, pose.theta)
        }
        steering => {
            let k = steering.curvature_sign() / radius;
            let theta_end = pose.theta + k * ds;
            Pose::new(
                pose.x + (theta_end.sin() - pose.theta.sin()) / k,
                pose.y + (pose.theta.cos() - theta_end.cos()) / k,
                theta_end,
            )
        }
    }
}

pub fn integrate_step(
    pose: &Pose,
    action: ControlAction,
    arc_length: f64,
    params: &VehicleParams,
) -> Pose {
    propagate(pose, action, arc_length, params.min_turning_radius())
}

/// Successors under all six actions, in [`ACTIONS`] order.
pub fn expand_primitives(
    pose: &Pose,
    params: &VehicleParams,
    arc_length: f64,
) -> Vec<(ControlAction, Pose)> {
    let radius = params.min_turning_radius();
    ACTIONS
        .iter()
        .map(|&a| (a, propagate(pose, a, arc_length, radius)))
        .collect()
}

/// Equal disks along the longitudinal axis covering the body rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskFootprint {
    /// Disk centers in the vehicle frame (rear-axle origin, x forward).
    pub centers: Vec<(f64, f64)>,
    pub radius: f64,
    /// Disk spacing `d = 2 sqrt(r^2 - w^2/4)`.
    pub spacing: f64,
}

impl DiskFootprint {
    pub fn transform(&self, pose: &Pose) -> Vec<(f64, f64, f64)> {
        transform_disks(self, pose)
    }
}

/// Covers the `l x w` body with `n` disks of radius `r = sqrt(l^2/n^2 + w^2/4)`.
///
/// The body is split into `n` equal sub-rectangles of length `l/n`; one disk sits
/// at the center of each, so the union reaches from the rear bumper to the front
/// bumper.
pub fn footprint_disks(params: &VehicleParams) -> DiskFootprint {
    let n = params.n_disks as f64;
    let l = params.body_length;
    let half_w = params.body_width / 2.0;
    let radius = (l * l / (n * n) + half_w * half_w).sqrt();
    let spacing = 2.0 * (radius * radius - half_w * half_w).max(0.0).sqrt();
    let pitch = l / n;
    let centers = (0..params.n_disks)
        .map(|i| (-params.rear_overhang + pitch * (i as f64 + 0.5), 0.0))
        .collect();
    DiskFootprint {
        centers,
        radius,
        spacing,
    }
}

/// Disk centers and radius in the world frame for a vehicle at `pose`.
pub fn transform_disks(footprint: &DiskFootprint, pose: &Pose) -> Vec<(f64, f64, f64)> {
    footprint
        .centers
        .iter()
        .map(|&(cx, cy)| {
            let (x, y) = pose.transform_point(cx, cy);
            (x, y, footprint.radius)
        })
        .collect()
}
