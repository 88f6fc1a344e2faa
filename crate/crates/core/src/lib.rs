//! Kinodynamic motion planning for car-like vehicles in parking lots.
//!
//! The crate provides a Hybrid A* baseline and a shared multi-heuristic A* planner
//! that share the same vehicle model, collision checker and heuristics, plus a
//! bidirectional driver that joins a forward and a backward search with a
//! Reeds-Shepp connector.

pub mod error;
pub mod heuristics;
pub mod reeds_shepp;
pub mod search;
pub mod vehicle;
pub mod world;

pub use error::{PlanError, Result};
pub use vehicle::{ControlAction, Direction, DiskFootprint, Pose, Steering, VehicleParams};
