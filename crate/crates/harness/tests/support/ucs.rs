//! Uniform-cost search over the planners' primitive graph.
//!
//! Same successors (six actions at the room-dependent arc length), same
//! edge sampling, same bins, same goal test and edge costs as the planners, with
//! no heuristic and an analytic shot attempted at every expansion. The result is
//! the cheapest plan this graph offers.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use parkplan_core::reeds_shepp::{rs_sample, rs_shortest_path};
use parkplan_core::search::{
    adaptive_arc_length, edge_cost, primitive_clearance, GoalRegion, GridBinning, PlannerConfig,
    SAMPLE_STEP,
};
use parkplan_core::vehicle::{propagate, ACTIONS};
use parkplan_core::world::World;
use parkplan_core::{ControlAction, Pose};

#[derive(Clone, Copy, PartialEq)]
struct Cost(f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Node {
    pose: Pose,
    g: f64,
    incoming: Option<ControlAction>,
}

pub struct UcsResult {
    pub cost: f64,
    pub expansions: usize,
}

/// `refine` splits every bin into `refine` parts per axis; 1 reproduces the
/// planners' bins exactly.
pub fn uniform_cost(
    world: &World,
    start: &Pose,
    goal: &Pose,
    config: &PlannerConfig,
    refine: usize,
) -> Option<UcsResult> {
    let radius = world.min_turning_radius();
    let binning = GridBinning {
        xy_resolution: world.grid.resolution() / refine as f64,
        theta_bins: config.theta_bins * refine,
    };
    let region = GoalRegion::Pose {
        xy_tol: config.goal_xy_tol,
        theta_tol: config.goal_theta_tol,
    };
    let mut nodes = vec![Node {
        pose: *start,
        g: 0.0,
        incoming: None,
    }];
    let mut owner = HashMap::new();
    let mut closed = HashMap::new();
    owner.insert(binning.bin(start), 0usize);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Cost(0.0), 0usize)));
    let mut best = if region.contains(goal, start) {
        0.0
    } else {
        f64::INFINITY
    };
    let mut expansions = 0;

    while let Some(Reverse((Cost(g), id))) = heap.pop() {
        if g >= best {
            break;
        }
        let bin = binning.bin(&nodes[id].pose);
        if owner[&bin] != id || closed.contains_key(&bin) {
            continue;
        }
        closed.insert(bin, ());
        expansions += 1;
        let pose = nodes[id].pose;
        let prev = nodes[id].incoming;

        let shot = rs_shortest_path(&pose, goal, radius);
        if rs_sample(&shot, &pose, radius, SAMPLE_STEP)
            .iter()
            .all(|(p, _)| world.is_free(p))
        {
            let mut c = g;
            let mut last = prev;
            for s in &shot.segments {
                c += edge_cost(s.action(), s.signed_length.abs(), last, config);
                last = Some(s.action());
            }
            best = best.min(c);
        }

        let arc = adaptive_arc_length(primitive_clearance(world, &pose), config);
        let n = (arc / SAMPLE_STEP).ceil().max(1.0) as usize;
        for action in ACTIONS {
            let free = (1..=n).all(|k| {
                world.is_free(&propagate(&pose, action, arc * k as f64 / n as f64, radius))
            });
            if !free {
                continue;
            }
            let succ = propagate(&pose, action, arc, radius);
            let sb = binning.bin(&succ);
            if sb == bin || closed.contains_key(&sb) {
                continue;
            }
            let g2 = g + edge_cost(action, arc, prev, config);
            if owner.get(&sb).is_some_and(|&o| nodes[o].g <= g2) {
                continue;
            }
            if region.contains(goal, &succ) {
                best = best.min(g2);
            }
            nodes.push(Node {
                pose: succ,
                g: g2,
                incoming: Some(action),
            });
            owner.insert(sb, nodes.len() - 1);
            heap.push(Reverse((Cost(g2), nodes.len() - 1)));
        }
    }
    best.is_finite().then_some(UcsResult {
        cost: best,
        expansions,
    })
}
