use std::str::FromStr;
use std::time::Instant;

use super::engine::{check_endpoints, Outcome, Stage};
use super::{
    path_cost, sample_actions, GoalRegion, PlanResult, PlanStatus, PlannerConfig, QueueSpec,
    SearchContext, SAMPLE_STEP,
};
use crate::error::{PlanError, Result};
use crate::heuristics::HeuristicSet;
use crate::reeds_shepp::{rs_all_paths, rs_sample, RsPath};
use crate::vehicle::{ControlAction, Pose};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    HybridAstar,
    Smha,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::HybridAstar => "hybrid",
            Engine::Smha => "smha",
        }
    }
}

impl FromStr for Engine {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hybrid" => Ok(Engine::HybridAstar),
            "smha" => Ok(Engine::Smha),
            other => Err(PlanError::InvalidConfig(format!(
                "unknown engine '{other}'"
            ))),
        }
    }
}

/// Shortest collision-free Reeds-Shepp connector from `a` to `b`, falling back to
/// longer words when shorter ones collide.
pub fn combine_paths(a: &Pose, b: &Pose, radius: f64, world: &World) -> Result<RsPath> {
    rs_all_paths(a, b, radius)
        .into_iter()
        .find(|p| {
            rs_sample(p, a, radius, SAMPLE_STEP)
                .iter()
                .all(|(q, _)| world.is_free(q))
        })
        .ok_or(PlanError::CombineFailed)
}

fn end_pose(start: &Pose, actions: &[(ControlAction, f64)], radius: f64) -> Pose {
    actions.iter().fold(*start, |p, &(a, len)| {
        crate::vehicle::propagate(&p, a, len, radius)
    })
}

/// Forward search to within `d_fw1` of the goal, backward search from the goal to
/// within `d_fw2` of where the forward search stopped, then an analytic connector
/// between the two fronts.
pub fn bidirectional_plan(
    start: &Pose,
    goal: &Pose,
    ctx: &SearchContext,
    heuristics: &HeuristicSet,
    config: &PlannerConfig,
    engine: Engine,
) -> Result<PlanResult> {
    config.validate()?;
    let spec = match engine {
        Engine::HybridAstar => QueueSpec::hybrid(),
        Engine::Smha => {
            heuristics.validate()?;
            QueueSpec::smha(heuristics, config)
        }
    };
    check_endpoints(ctx.world, start, goal)?;
    let t0 = Instant::now();
    let radius = ctx.world.min_turning_radius();

    let mut forward = Stage::new(
        ctx.world,
        *start,
        ctx.heuristics_to(goal)?,
        GoalRegion::Disk {
            radius: config.d_fw1,
        },
        spec.clone(),
        config,
        false,
    );
    let fw_outcome = forward.run();
    let mut result = PlanResult::unsolved(PlanStatus::Infeasible, *start, *goal);
    result.stats = forward.stats.clone();
    result.expansions = std::mem::take(&mut forward.expansions);
    result.anchor_min_keys = std::mem::take(&mut forward.anchor_min_keys);
    let fw_goal = match fw_outcome {
        Outcome::Found(g) => g,
        Outcome::Exhausted => {
            result.stats.wall_time = t0.elapsed();
            return Ok(result);
        }
        Outcome::IterationLimit => {
            result.status = PlanStatus::IterationLimit;
            result.stats.wall_time = t0.elapsed();
            return Ok(result);
        }
    };
    let fw_actions = forward.goal_actions(fw_goal);
    let x_f1 = end_pose(start, &fw_actions, radius);

    let mut backward = Stage::new(
        ctx.world,
        *goal,
        ctx.heuristics_to(&x_f1)?,
        GoalRegion::Disk {
            radius: config.d_fw2,
        },
        spec,
        config,
        true,
    );
    let mut retries = 0;
    let joined = loop {
        match backward.run() {
            Outcome::Found(g) => {
                let bw_actions = backward.goal_actions(g);
                let x_f2 = end_pose(goal, &bw_actions, radius);
                match combine_paths(&x_f1, &x_f2, radius, ctx.world) {
                    Ok(connector) => break Ok((bw_actions, connector)),
                    Err(_) if retries < config.max_combine_retries => {
                        retries += 1;
                        backward.discard(g);
                    }
                    Err(_) => break Err(PlanStatus::Infeasible),
                }
            }
            Outcome::Exhausted => break Err(PlanStatus::Infeasible),
            Outcome::IterationLimit => break Err(PlanStatus::IterationLimit),
        }
    };
    result.stats.absorb(&backward.stats);
    result.expansions.append(&mut backward.expansions);
    result.anchor_min_keys.append(&mut backward.anchor_min_keys);
    let (bw_actions, connector) = match joined {
        Ok(parts) => parts,
        Err(status) => {
            result.status = status;
            result.stats.wall_time = t0.elapsed();
            return Ok(result);
        }
    };

    let mut actions = fw_actions;
    actions.extend(
        connector
            .segments
            .iter()
            .map(|s| (s.action(), s.signed_length.abs())),
    );
    // the backward branch was grown from the goal; drive it in reverse order
    actions.extend(bw_actions.iter().rev().map(|&(a, len)| (a.reversed(), len)));
    actions.retain(|&(_, len)| len > 0.0);

    result.status = PlanStatus::Found;
    result.poses = sample_actions(start, &actions, radius, SAMPLE_STEP);
    result.cost = path_cost(&actions, config);
    result.actions = actions;
    result.stats.wall_time = t0.elapsed();
    Ok(result)
}
