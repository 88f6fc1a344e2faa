use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("invalid vehicle parameters: {0}")]
    InvalidVehicle(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed map file at line {line}: {message}")]
    MapFormat { line: usize, message: String },
    #[error("start pose ({x:.3}, {y:.3}) is in collision")]
    StartInCollision { x: f64, y: f64 },
    #[error("goal pose ({x:.3}, {y:.3}) lies inside an obstacle")]
    GoalInObstacle { x: f64, y: f64 },
    #[error("no collision-free analytic connector between the two search fronts")]
    CombineFailed,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PlanError>;
