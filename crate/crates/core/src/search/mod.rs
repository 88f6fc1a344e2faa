//! Hybrid A*, shared multi-heuristic A* and the bidirectional driver.
//!
//! Both engines run on the same machinery: an append-only node arena, one retained
//! node per grid bin, and one priority queue per heuristic. Hybrid A* is the
//! single-queue case keyed by `g + h_hybrid_max`.

mod bidirectional;
mod contract;
mod engine;

use std::f64::consts::{PI, TAU};
use std::time::Duration;

use crate::error::{PlanError, Result};
use crate::heuristics::{CostmapCache, GoalHeuristics, HeuristicKind, HeuristicSet};
use crate::vehicle::{angle_diff, propagate, ControlAction, Direction, Pose};
use crate::world::World;

pub use bidirectional::{bidirectional_plan, combine_paths, Engine};
pub use contract::check_path_contract;
pub use engine::{hybrid_astar, smha_star};

/// Arc-length spacing used for every collision check along edges and connectors.
pub const SAMPLE_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub weight_w1: f64,
    pub weight_w2: f64,
    /// Cost multiplier applied to reverse motion.
    pub reverse_penalty: f64,
    /// Flat cost in meters added at every forward/reverse switch.
    pub direction_switch_penalty: f64,
    pub arc_length_min: f64,
    pub arc_length_max: f64,
    /// `(clearance, arc length)` steps, ascending in clearance.
    pub clearance_thresholds: Vec<(f64, f64)>,
    pub d_fw1: f64,
    pub d_fw2: f64,
    pub goal_xy_tol: f64,
    pub goal_theta_tol: f64,
    /// Pops allowed per search stage.
    pub max_iterations: usize,
    pub theta_bins: usize,
    /// Backward-stage goals discarded before giving up on stitching.
    pub max_combine_retries: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            weight_w1: 2.0,
            weight_w2: 8.0,
            reverse_penalty: 2.0,
            direction_switch_penalty: 2.0,
            arc_length_min: 0.5,
            arc_length_max: 2.5,
            clearance_thresholds: vec![(0.5, 1.0), (1.5, 1.5), (3.0, 2.0), (5.0, 2.5)],
            d_fw1: 5.0,
            d_fw2: 1.0,
            goal_xy_tol: 0.3,
            goal_theta_tol: 0.1,
            max_iterations: 200_000,
            theta_bins: 72,
            max_combine_retries: 16,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(PlanError::InvalidConfig(m.to_string()));
        if !(self.weight_w1 >= 1.0 && self.weight_w2 >= 1.0) {
            return bad("w1 and w2 must be at least 1");
        }
        if !(self.reverse_penalty >= 1.0) {
            return bad("reverse_penalty must be at least 1");
        }
        if !(self.direction_switch_penalty >= 0.0) {
            return bad("direction switch penalty must be non-negative");
        }
        if !(self.arc_length_min > 0.0 && self.arc_length_min <= self.arc_length_max)
            || !self.arc_length_max.is_finite()
        {
            return bad("arc lengths must satisfy 0 < min <= max");
        }
        let mut last = f64::NEG_INFINITY;
        for &(c, a) in &self.clearance_thresholds {
            if !(c >= last) || !(a >= self.arc_length_min && a <= self.arc_length_max) {
                return bad("clearance thresholds must be ascending and within [arc_min, arc_max]");
            }
            last = c;
        }
        if !(self.d_fw2 > 0.0 && self.d_fw2 <= self.d_fw1) {
            return bad("need 0 < d_fw2 <= d_fw1");
        }
        if !(self.goal_xy_tol > 0.0 && self.goal_theta_tol > 0.0) {
            return bad("goal tolerances must be positive");
        }
        if self.max_iterations == 0 || self.theta_bins == 0 {
            return bad("max_iterations and theta_bins must be positive");
        }
        Ok(())
    }
}

/// Piecewise-constant primitive length: short near obstacles, long in the open.
pub fn adaptive_arc_length(clearance: f64, config: &PlannerConfig) -> f64 {
    if clearance == f64::INFINITY {
        return config.arc_length_max;
    }
    let mut arc = config.arc_length_min;
    for &(c, a) in &config.clearance_thresholds {
        if clearance >= c {
            arc = arc.max(a);
        }
    }
    arc.clamp(config.arc_length_min, config.arc_length_max)
}

/// Room around `pose` used to size its primitives. Disk centers must stay on the
/// map, so the border counts like an obstacle here.
pub fn primitive_clearance(world: &World, pose: &Pose) -> f64 {
    world.clearance(pose).min(world.border_distance(pose))
}

pub fn edge_cost(
    action: ControlAction,
    arc_length: f64,
    previous: Option<ControlAction>,
    config: &PlannerConfig,
) -> f64 {
    let mut cost = arc_length;
    if action.direction == Direction::Reverse {
        cost *= config.reverse_penalty;
    }
    if previous.is_some_and(|p| p.direction != action.direction) {
        cost += config.direction_switch_penalty;
    }
    cost
}

/// Cost of driving `actions` in order.
pub fn path_cost(actions: &[(ControlAction, f64)], config: &PlannerConfig) -> f64 {
    let mut prev = None;
    let mut total = 0.0;
    for &(a, len) in actions {
        total += edge_cost(a, len, prev, config);
        prev = Some(a);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinKey {
    pub ix: i64,
    pub iy: i64,
    pub itheta: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBinning {
    pub xy_resolution: f64,
    pub theta_bins: usize,
}

impl GridBinning {
    pub fn bin(&self, pose: &Pose) -> BinKey {
        let n = self.theta_bins as i64;
        let t = ((pose.theta + PI) / TAU * n as f64).floor() as i64;
        BinKey {
            ix: (pose.x / self.xy_resolution).floor() as i64,
            iy: (pose.y / self.xy_resolution).floor() as i64,
            itheta: t.rem_euclid(n),
        }
    }
}

/// Termination test of a search stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GoalRegion {
    /// Within `xy_tol` meters and `theta_tol` radians of the target pose.
    Pose { xy_tol: f64, theta_tol: f64 },
    /// Within `radius` meters of the target position, any heading.
    Disk { radius: f64 },
}

impl GoalRegion {
    pub fn contains(&self, target: &Pose, pose: &Pose) -> bool {
        match *self {
            GoalRegion::Pose { xy_tol, theta_tol } => {
                pose.distance(target) <= xy_tol
                    && angle_diff(pose.theta, target.theta).abs() <= theta_tol
            }
            GoalRegion::Disk { radius } => pose.distance(target) <= radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanStatus {
    Found,
    Infeasible,
    IterationLimit,
}

impl PlanStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanStatus::Found => "found",
            PlanStatus::Infeasible => "infeasible",
            PlanStatus::IterationLimit => "iteration_limit",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    pub expanded_states: usize,
    pub iterations: usize,
    pub wall_time: Duration,
    /// Distinct bins that ever held a node.
    pub bins_touched: usize,
    /// Largest number of expansions of any single bin.
    pub max_bin_expansions: usize,
    pub total_bin_expansions: usize,
}

impl SearchStats {
    pub(crate) fn absorb(&mut self, other: &SearchStats) {
        self.expanded_states += other.expanded_states;
        self.iterations += other.iterations;
        self.bins_touched += other.bins_touched;
        self.max_bin_expansions = self.max_bin_expansions.max(other.max_bin_expansions);
        self.total_bin_expansions += other.total_bin_expansions;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub status: PlanStatus,
    pub start: Pose,
    pub goal: Pose,
    /// Samples at most [`SAMPLE_STEP`] apart, each tagged with the direction of the
    /// motion arriving at it.
    pub poses: Vec<(Pose, Direction)>,
    /// Primitive sequence, including any stitched analytic segments.
    pub actions: Vec<(ControlAction, f64)>,
    pub cost: f64,
    pub stats: SearchStats,
    /// Poses of expanded nodes in expansion order.
    pub expansions: Vec<Pose>,
    /// Minimum anchor key at every anchor pop.
    pub anchor_min_keys: Vec<f64>,
}

impl PlanResult {
    /// A result without a path.
    pub fn unsolved(status: PlanStatus, start: Pose, goal: Pose) -> Self {
        Self {
            status,
            start,
            goal,
            poses: Vec::new(),
            actions: Vec::new(),
            cost: f64::INFINITY,
            stats: SearchStats::default(),
            expansions: Vec::new(),
            anchor_min_keys: Vec::new(),
        }
    }

    pub fn is_found(&self) -> bool {
        self.status == PlanStatus::Found
    }
}

/// Samples the path obtained by driving `actions` from `start`. The first sample
/// carries the direction of the first action.
pub fn sample_actions(
    start: &Pose,
    actions: &[(ControlAction, f64)],
    radius: f64,
    step: f64,
) -> Vec<(Pose, Direction)> {
    let first = actions
        .first()
        .map_or(Direction::Forward, |(a, _)| a.direction);
    let mut out = vec![(*start, first)];
    let mut origin = *start;
    for &(action, len) in actions {
        if len <= 0.0 {
            continue;
        }
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push((
                propagate(&origin, action, len * k as f64 / n as f64, radius),
                action.direction,
            ));
        }
        origin = propagate(&origin, action, len, radius);
    }
    out
}

/// World plus the shared costmap cache; one per map, shared by all planners.
pub struct SearchContext<'a> {
    pub world: &'a World,
    pub costmaps: &'a CostmapCache,
    pub grid_hash: String,
}

impl<'a> SearchContext<'a> {
    pub fn new(world: &'a World, costmaps: &'a CostmapCache) -> Self {
        Self {
            world,
            costmaps,
            grid_hash: world.grid.content_hash(),
        }
    }

    pub fn heuristics_to(&self, target: &Pose) -> Result<GoalHeuristics> {
        Ok(GoalHeuristics {
            goal: *target,
            radius: self.world.min_turning_radius(),
            costmap: self
                .costmaps
                .get_or_build(self.world, &self.grid_hash, target)?,
        })
    }
}

/// Queue layout handed to the engine.
#[derive(Debug, Clone)]
pub(crate) struct QueueSpec {
    pub anchor: HeuristicKind,
    pub inadmissibles: Vec<HeuristicKind>,
    pub w1: f64,
    pub w2: f64,
}

impl QueueSpec {
    pub fn hybrid() -> Self {
        Self {
            anchor: HeuristicKind::HybridMax,
            inadmissibles: Vec::new(),
            w1: 1.0,
            w2: 1.0,
        }
    }

    pub fn smha(set: &HeuristicSet, config: &PlannerConfig) -> Self {
        Self {
            anchor: set.anchor,
            inadmissibles: set.inadmissibles.clone(),
            w1: config.weight_w1,
            w2: config.weight_w2,
        }
    }
}
