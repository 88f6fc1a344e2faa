use std::cmp::Reverse;
use std::collections::HashMap;
use std::time::Instant;

use ordered_float::OrderedFloat;
use priority_queue::PriorityQueue;

use super::{
    adaptive_arc_length, edge_cost, primitive_clearance, sample_actions, BinKey, GoalRegion,
    GridBinning, PlanResult, PlanStatus, PlannerConfig, QueueSpec, SearchContext, SearchStats,
    SAMPLE_STEP,
};
use crate::error::{PlanError, Result};
use crate::heuristics::{GoalHeuristics, HeuristicSet, HeuristicValues};
use crate::reeds_shepp::{rs_sample, rs_shortest_path};
use crate::vehicle::{propagate, ControlAction, Pose, ACTIONS};
use crate::world::World;

type Queue = PriorityQueue<BinKey, Reverse<(OrderedFloat<f64>, BinKey)>>;

#[derive(Debug, Clone)]
struct Node {
    pose: Pose,
    g: f64,
    parent: Option<usize>,
    incoming: Option<(ControlAction, f64)>,
    bin: BinKey,
    h: HeuristicValues,
}

#[derive(Debug, Clone, Copy)]
struct BinEntry {
    node: usize,
    closed_anchor: bool,
    closed_inad: bool,
    expansions: usize,
}

#[derive(Debug, Clone)]
struct GoalRecord {
    node: usize,
    /// Analytic segments appended after `node`, empty for a plain region hit.
    tail: Vec<(ControlAction, f64)>,
    cost: f64,
    discarded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Found(usize),
    Exhausted,
    IterationLimit,
}

/// One resumable best-first search towards `heuristics.goal`.
pub(crate) struct Stage<'a> {
    world: &'a World,
    heuristics: GoalHeuristics,
    region: GoalRegion,
    spec: QueueSpec,
    config: &'a PlannerConfig,
    /// Charge edges as if driven in the opposite direction (backward search).
    flip_costs: bool,
    binning: GridBinning,
    radius: f64,
    nodes: Vec<Node>,
    bins: HashMap<BinKey, BinEntry>,
    queues: Vec<Queue>,
    goals: Vec<GoalRecord>,
    round_robin: usize,
    shot_countdown: usize,
    pub stats: SearchStats,
    pub expansions: Vec<Pose>,
    pub anchor_min_keys: Vec<f64>,
}

impl<'a> Stage<'a> {
    pub fn new(
        world: &'a World,
        start: Pose,
        heuristics: GoalHeuristics,
        region: GoalRegion,
        spec: QueueSpec,
        config: &'a PlannerConfig,
        flip_costs: bool,
    ) -> Self {
        let binning = GridBinning {
            xy_resolution: world.grid.resolution(),
            theta_bins: config.theta_bins,
        };
        let queues = (0..=spec.inadmissibles.len())
            .map(|_| Queue::new())
            .collect();
        let mut stage = Self {
            world,
            region,
            spec,
            config,
            flip_costs,
            binning,
            radius: world.min_turning_radius(),
            nodes: Vec::new(),
            bins: HashMap::new(),
            queues,
            goals: Vec::new(),
            round_robin: 0,
            shot_countdown: 0,
            stats: SearchStats::default(),
            expansions: Vec::new(),
            anchor_min_keys: Vec::new(),
            heuristics,
        };
        let bin = stage.binning.bin(&start);
        let h = stage.heuristics.values(&start);
        stage.nodes.push(Node {
            pose: start,
            g: 0.0,
            parent: None,
            incoming: None,
            bin,
            h,
        });
        stage.bins.insert(
            bin,
            BinEntry {
                node: 0,
                closed_anchor: false,
                closed_inad: false,
                expansions: 0,
            },
        );
        if stage.region.contains(&stage.heuristics.goal, &start) {
            stage.goals.push(GoalRecord {
                node: 0,
                tail: Vec::new(),
                cost: 0.0,
                discarded: false,
            });
        }
        stage.enqueue(bin, 0, false);
        stage
    }

    fn step_cost(&self, action: ControlAction, len: f64, prev: Option<ControlAction>) -> f64 {
        if self.flip_costs {
            edge_cost(
                action.reversed(),
                len,
                prev.map(ControlAction::reversed),
                self.config,
            )
        } else {
            edge_cost(action, len, prev, self.config)
        }
    }

    fn key(&self, queue: usize, node: &Node) -> f64 {
        let kind = if queue == 0 {
            self.spec.anchor
        } else {
            self.spec.inadmissibles[queue - 1]
        };
        node.g + self.spec.w1 * kind.select(&node.h)
    }

    fn min_key(&self, queue: usize) -> Option<f64> {
        self.queues[queue].peek().map(|(_, Reverse((k, _)))| k.0)
    }

    fn enqueue(&mut self, bin: BinKey, id: usize, closed_inad: bool) {
        let node = &self.nodes[id];
        let k0 = self.key(0, node);
        let keys: Vec<f64> = (1..self.queues.len()).map(|i| self.key(i, node)).collect();
        self.queues[0].push(bin, Reverse((OrderedFloat(k0), bin)));
        if closed_inad {
            return;
        }
        for (i, ki) in keys.into_iter().enumerate() {
            if ki <= self.spec.w2 * k0 {
                self.queues[i + 1].push(bin, Reverse((OrderedFloat(ki), bin)));
            } else {
                self.queues[i + 1].remove(&bin);
            }
        }
    }

    fn best_goal(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, g) in self.goals.iter().enumerate() {
            if !g.discarded && best.is_none_or(|b| g.cost < self.goals[b].cost) {
                best = Some(i);
            }
        }
        best
    }

    /// Rejects a goal returned by [`Stage::run`] so that the next run looks further.
    pub fn discard(&mut self, goal: usize) {
        self.goals[goal].discarded = true;
    }

    pub fn goal_cost(&self, goal: usize) -> f64 {
        self.goals[goal].cost
    }

    /// Primitive sequence from the root to the goal, analytic tail included.
    pub fn goal_actions(&self, goal: usize) -> Vec<(ControlAction, f64)> {
        let rec = &self.goals[goal];
        let mut actions = Vec::new();
        let mut cur = Some(rec.node);
        while let Some(id) = cur {
            if let Some(inc) = self.nodes[id].incoming {
                actions.push(inc);
            }
            cur = self.nodes[id].parent;
        }
        actions.reverse();
        actions.extend(rec.tail.iter().copied());
        actions
    }

    pub fn run(&mut self) -> Outcome {
        loop {
            let anchor_min = match self.min_key(0) {
                Some(k) if k.is_finite() => k,
                _ => {
                    return self.best_goal().map_or(Outcome::Exhausted, Outcome::Found);
                }
            };
            let mut queue = 0;
            let n_inad = self.queues.len() - 1;
            if n_inad > 0 {
                let i = 1 + self.round_robin;
                self.round_robin = (self.round_robin + 1) % n_inad;
                if self
                    .min_key(i)
                    .is_some_and(|k| k <= self.spec.w2 * anchor_min)
                {
                    queue = i;
                }
            }
            let min_key = self.min_key(queue).expect("chosen queue is non-empty");
            if let Some(best) = self.best_goal() {
                if self.goals[best].cost <= min_key {
                    return Outcome::Found(best);
                }
            }
            if self.stats.iterations >= self.config.max_iterations {
                return Outcome::IterationLimit;
            }
            self.stats.iterations += 1;
            let (bin, _) = self.queues[queue].pop().expect("chosen queue is non-empty");
            for (i, q) in self.queues.iter_mut().enumerate() {
                if i != queue {
                    q.remove(&bin);
                }
            }
            let entry = self.bins.get_mut(&bin).expect("queued bins are tracked");
            if queue == 0 {
                entry.closed_anchor = true;
                self.anchor_min_keys.push(min_key);
            } else {
                entry.closed_inad = true;
            }
            let id = entry.node;
            self.expand(id);
        }
    }

    fn edge_free(&self, pose: &Pose, action: ControlAction, arc: f64) -> bool {
        let n = (arc / SAMPLE_STEP).ceil().max(1.0) as usize;
        (1..=n).all(|k| {
            let p = propagate(pose, action, arc * k as f64 / n as f64, self.radius);
            self.world.is_free(&p)
        })
    }

    fn try_shot(&mut self, id: usize) {
        let node = &self.nodes[id];
        let path = rs_shortest_path(&node.pose, &self.heuristics.goal, self.radius);
        let samples = rs_sample(&path, &node.pose, self.radius, SAMPLE_STEP);
        if !samples.iter().all(|(p, _)| self.world.is_free(p)) {
            return;
        }
        let tail: Vec<(ControlAction, f64)> = path
            .segments
            .iter()
            .map(|s| (s.action(), s.signed_length.abs()))
            .collect();
        let mut prev = node.incoming.map(|(a, _)| a);
        let mut cost = node.g;
        for &(a, len) in &tail {
            cost += self.step_cost(a, len, prev);
            prev = Some(a);
        }
        self.goals.push(GoalRecord {
            node: id,
            tail,
            cost,
            discarded: false,
        });
    }

    fn expand(&mut self, id: usize) {
        let Node {
            pose,
            g,
            incoming,
            bin,
            h,
            ..
        } = self.nodes[id].clone();
        let entry = self.bins.get_mut(&bin).expect("expanded bin is tracked");
        entry.expansions += 1;
        self.stats.max_bin_expansions = self.stats.max_bin_expansions.max(entry.expansions);
        self.stats.total_bin_expansions += 1;
        self.expansions.push(pose);

        if self.shot_countdown == 0 {
            self.try_shot(id);
            let every = (self.spec.anchor.select(&h) / self.config.arc_length_max)
                .floor()
                .clamp(1.0, 1e6) as usize;
            self.shot_countdown = every - 1;
        } else {
            self.shot_countdown -= 1;
        }

        let prev = incoming.map(|(a, _)| a);
        let arc = adaptive_arc_length(primitive_clearance(self.world, &pose), self.config);
        let mut any_free = false;
        for action in ACTIONS {
            if !self.edge_free(&pose, action, arc) {
                continue;
            }
            any_free = true;
            let succ = propagate(&pose, action, arc, self.radius);
            let succ_bin = self.binning.bin(&succ);
            if succ_bin == bin {
                continue;
            }
            let g_new = g + self.step_cost(action, arc, prev);
            let closed_inad = match self.bins.get(&succ_bin) {
                Some(e) if e.closed_anchor || g_new >= self.nodes[e.node].g => continue,
                Some(e) => e.closed_inad,
                None => false,
            };
            let nid = self.nodes.len();
            self.nodes.push(Node {
                pose: succ,
                g: g_new,
                parent: Some(id),
                incoming: Some((action, arc)),
                bin: succ_bin,
                h: self.heuristics.values(&succ),
            });
            self.bins
                .entry(succ_bin)
                .and_modify(|e| e.node = nid)
                .or_insert(BinEntry {
                    node: nid,
                    closed_anchor: false,
                    closed_inad: false,
                    expansions: 0,
                });
            if self.region.contains(&self.heuristics.goal, &succ) {
                self.goals.push(GoalRecord {
                    node: nid,
                    tail: Vec::new(),
                    cost: g_new,
                    discarded: false,
                });
            }
            self.enqueue(succ_bin, nid, closed_inad);
        }
        if any_free {
            self.stats.expanded_states += 1;
        }
        self.stats.bins_touched = self.bins.len();
    }
}

pub(crate) fn check_endpoints(world: &World, start: &Pose, goal: &Pose) -> Result<()> {
    if !world.is_free(start) {
        return Err(PlanError::StartInCollision {
            x: start.x,
            y: start.y,
        });
    }
    if !world.is_free(goal) {
        return Err(PlanError::GoalInObstacle {
            x: goal.x,
            y: goal.y,
        });
    }
    Ok(())
}

fn run_single(
    start: &Pose,
    goal: &Pose,
    ctx: &SearchContext,
    spec: QueueSpec,
    config: &PlannerConfig,
) -> Result<PlanResult> {
    config.validate()?;
    check_endpoints(ctx.world, start, goal)?;
    let t0 = Instant::now();
    let heuristics = ctx.heuristics_to(goal)?;
    let region = GoalRegion::Pose {
        xy_tol: config.goal_xy_tol,
        theta_tol: config.goal_theta_tol,
    };
    let mut stage = Stage::new(ctx.world, *start, heuristics, region, spec, config, false);
    let outcome = stage.run();
    let mut result = match outcome {
        Outcome::Found(gi) => {
            let actions = stage.goal_actions(gi);
            let radius = ctx.world.min_turning_radius();
            PlanResult {
                status: PlanStatus::Found,
                start: *start,
                goal: *goal,
                poses: sample_actions(start, &actions, radius, SAMPLE_STEP),
                actions,
                cost: stage.goal_cost(gi),
                stats: SearchStats::default(),
                expansions: Vec::new(),
                anchor_min_keys: Vec::new(),
            }
        }
        Outcome::Exhausted => PlanResult::unsolved(PlanStatus::Infeasible, *start, *goal),
        Outcome::IterationLimit => PlanResult::unsolved(PlanStatus::IterationLimit, *start, *goal),
    };
    result.stats = std::mem::take(&mut stage.stats);
    result.expansions = std::mem::take(&mut stage.expansions);
    result.anchor_min_keys = std::mem::take(&mut stage.anchor_min_keys);
    result.stats.wall_time = t0.elapsed();
    Ok(result)
}

/// Single best-first search keyed by `g + h_hybrid_max`.
pub fn hybrid_astar(
    start: &Pose,
    goal: &Pose,
    ctx: &SearchContext,
    config: &PlannerConfig,
) -> Result<PlanResult> {
    run_single(start, goal, ctx, QueueSpec::hybrid(), config)
}

/// Shared multi-heuristic A* with an anchor queue and one queue per inadmissible
/// heuristic, all sharing cost-to-come and bin ownership.
pub fn smha_star(
    start: &Pose,
    goal: &Pose,
    ctx: &SearchContext,
    heuristics: &HeuristicSet,
    config: &PlannerConfig,
) -> Result<PlanResult> {
    heuristics.validate()?;
    run_single(
        start,
        goal,
        ctx,
        QueueSpec::smha(heuristics, config),
        config,
    )
}
