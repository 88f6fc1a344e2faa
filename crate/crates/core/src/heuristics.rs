//! Cost-to-go estimates used to order the searches.
//!
//! * non-holonomic without obstacles: Reeds-Shepp length to the goal;
//! * holonomic with obstacles: 8-connected Dijkstra distance from the goal cell over
//!   an inflated grid, interpolated at the query position;
//! * the maximum of the two, which is what the Hybrid A* baseline orders by.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use ordered_float::OrderedFloat;

use crate::error::{PlanError, Result};
use crate::reeds_shepp::rs_length;
use crate::vehicle::{DiskFootprint, Pose};
use crate::world::{compute_distance_field, DistanceField, OccupancyGrid, World};

const NEIGHBORS: [(i64, i64, bool); 8] = [
    (1, 0, false),
    (-1, 0, false),
    (0, 1, false),
    (0, -1, false),
    (1, 1, true),
    (1, -1, true),
    (-1, 1, true),
    (-1, -1, true),
];

/// Per-cell shortest 2D distance (meters) to the goal cell; `f64::INFINITY` where
/// unreachable.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMap2d {
    width: usize,
    height: usize,
    resolution: f64,
    costs: Vec<f64>,
    goal_cell: (usize, usize),
}

impl CostMap2d {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn goal_cell(&self) -> (usize, usize) {
        self.goal_cell
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.costs[iy * self.width + ix]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Binary PGM (P5) rendering; finite costs scale to 0..=254, unreachable is 255.
    /// The first image row is the top (maximum y) of the map.
    pub fn to_pgm(&self) -> Vec<u8> {
        let max = self
            .costs
            .iter()
            .copied()
            .filter(|c| c.is_finite())
            .fold(0.0f64, f64::max);
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                let c = self.at(ix, iy);
                let px = if !c.is_finite() {
                    255
                } else if max > 0.0 {
                    (c / max * 254.0).round() as u8
                } else {
                    0
                };
                out.push(px);
            }
        }
        out
    }
}

/// Dijkstra from the goal's cell. Cells whose obstacle distance is below the disk
/// radius are blocked, except the goal cell itself when it is not occupied.
pub fn build_costmap(
    grid: &OccupancyGrid,
    goal: &Pose,
    footprint: &DiskFootprint,
) -> Result<CostMap2d> {
    let field = compute_distance_field(grid);
    build_costmap_with_field(grid, &field, goal, footprint)
}

pub fn build_costmap_with_field(
    grid: &OccupancyGrid,
    field: &DistanceField,
    goal: &Pose,
    footprint: &DiskFootprint,
) -> Result<CostMap2d> {
    let (w, h) = (grid.width(), grid.height());
    let goal_cell = grid
        .cell_of(goal.x, goal.y)
        .ok_or(PlanError::GoalInObstacle {
            x: goal.x,
            y: goal.y,
        })?;
    if grid.is_occupied(goal_cell.0, goal_cell.1) {
        return Err(PlanError::GoalInObstacle {
            x: goal.x,
            y: goal.y,
        });
    }
    let radius = footprint.radius;
    let passable = |ix: usize, iy: usize| {
        (ix, iy) == goal_cell || (!grid.is_occupied(ix, iy) && field.at(ix, iy) >= radius)
    };

    // costs are kept as (axis steps, diagonal steps) so equal paths evaluate identically
    let res = grid.resolution();
    let value =
        |steps: (u32, u32)| steps.0 as f64 * res + steps.1 as f64 * res * std::f64::consts::SQRT_2;
    let mut steps: Vec<Option<(u32, u32)>> = vec![None; w * h];
    let mut done = vec![false; w * h];
    let start = goal_cell.1 * w + goal_cell.0;
    steps[start] = Some((0, 0));
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((OrderedFloat(0.0), start)));
    while let Some(Reverse((OrderedFloat(cost), idx))) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        let (ix, iy) = ((idx % w) as i64, (idx / w) as i64);
        let here = steps[idx].expect("queued cells have a cost");
        for (dx, dy, diag) in NEIGHBORS {
            let (nx, ny) = (ix + dx, iy + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            let nidx = ny * w + nx;
            if done[nidx] || !passable(nx, ny) {
                continue;
            }
            let cand = if diag {
                (here.0, here.1 + 1)
            } else {
                (here.0 + 1, here.1)
            };
            let cand_cost = value(cand);
            if steps[nidx].is_none_or(|s| cand_cost < value(s)) {
                steps[nidx] = Some(cand);
                heap.push(Reverse((OrderedFloat(cand_cost), nidx)));
            }
        }
        debug_assert!(cost.is_finite());
    }
    let costs = steps
        .into_iter()
        .map(|s| s.map_or(f64::INFINITY, value))
        .collect();
    Ok(CostMap2d {
        width: w,
        height: h,
        resolution: res,
        costs,
        goal_cell,
    })
}

pub fn h_nonholonomic(pose: &Pose, goal: &Pose, radius: f64) -> f64 {
    rs_length(pose, goal, radius)
}

/// Bilinear interpolation of the four surrounding cell-center costs. Falls back to
/// the nearest finite corner when any corner is unreachable.
pub fn h_holonomic(pose: &Pose, costmap: &CostMap2d) -> f64 {
    let res = costmap.resolution;
    let (w, h) = (costmap.width, costmap.height);
    if !(pose.x >= 0.0 && pose.y >= 0.0 && pose.x < w as f64 * res && pose.y < h as f64 * res) {
        return f64::INFINITY;
    }
    let u = (pose.x / res - 0.5).clamp(0.0, (w - 1) as f64);
    let v = (pose.y / res - 0.5).clamp(0.0, (h - 1) as f64);
    let i0 = u.floor() as usize;
    let j0 = v.floor() as usize;
    let i1 = (i0 + 1).min(w - 1);
    let j1 = (j0 + 1).min(h - 1);
    let fu = u - i0 as f64;
    let fv = v - j0 as f64;
    let corners = [
        (i0, j0, (1.0 - fu) * (1.0 - fv)),
        (i1, j0, fu * (1.0 - fv)),
        (i0, j1, (1.0 - fu) * fv),
        (i1, j1, fu * fv),
    ];
    if corners
        .iter()
        .all(|&(i, j, _)| costmap.at(i, j).is_finite())
    {
        return corners
            .iter()
            .map(|&(i, j, wt)| wt * costmap.at(i, j))
            .sum();
    }
    corners
        .iter()
        .filter(|&&(i, j, _)| costmap.at(i, j).is_finite())
        .map(|&(i, j, _)| {
            let dx = (i as f64 + 0.5) * res - pose.x;
            let dy = (j as f64 + 0.5) * res - pose.y;
            (
                OrderedFloat(dx * dx + dy * dy),
                OrderedFloat(costmap.at(i, j)),
            )
        })
        .min()
        .map_or(f64::INFINITY, |(_, c)| c.0)
}

pub fn h_hybrid_max(pose: &Pose, goal: &Pose, radius: f64, costmap: &CostMap2d) -> f64 {
    h_nonholonomic(pose, goal, radius).max(h_holonomic(pose, costmap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeuristicKind {
    NonHolonomic,
    Holonomic,
    HybridMax,
}

impl HeuristicKind {
    pub fn select(self, values: &HeuristicValues) -> f64 {
        match self {
            HeuristicKind::NonHolonomic => values.nonholonomic,
            HeuristicKind::Holonomic => values.holonomic,
            HeuristicKind::HybridMax => values.nonholonomic.max(values.holonomic),
        }
    }
}

/// Both base estimates for one pose; every [`HeuristicKind`] is derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicValues {
    pub nonholonomic: f64,
    pub holonomic: f64,
}

/// One consistent anchor plus the inadmissible heuristics, each driving its own queue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicSet {
    pub anchor: HeuristicKind,
    pub inadmissibles: Vec<HeuristicKind>,
}

impl Default for HeuristicSet {
    fn default() -> Self {
        Self {
            anchor: HeuristicKind::NonHolonomic,
            inadmissibles: vec![HeuristicKind::Holonomic, HeuristicKind::HybridMax],
        }
    }
}

impl HeuristicSet {
    pub fn validate(&self) -> Result<()> {
        if self.inadmissibles.is_empty() {
            return Err(PlanError::InvalidConfig(
                "at least one inadmissible heuristic is required".into(),
            ));
        }
        Ok(())
    }
}

/// Heuristic evaluation towards one goal pose.
#[derive(Debug, Clone)]
pub struct GoalHeuristics {
    pub goal: Pose,
    pub radius: f64,
    pub costmap: Arc<CostMap2d>,
}

impl GoalHeuristics {
    pub fn values(&self, pose: &Pose) -> HeuristicValues {
        HeuristicValues {
            nonholonomic: h_nonholonomic(pose, &self.goal, self.radius),
            holonomic: h_holonomic(pose, &self.costmap),
        }
    }
}

/// Costmaps keyed by (grid digest, goal cell); stands in for an offline lookup table.
#[derive(Debug, Default)]
pub struct CostmapCache {
    entries: Mutex<HashMap<(String, (usize, usize)), Arc<CostMap2d>>>,
}

impl CostmapCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(
        &self,
        world: &World,
        grid_hash: &str,
        goal: &Pose,
    ) -> Result<Arc<CostMap2d>> {
        let cell = world
            .grid
            .cell_of(goal.x, goal.y)
            .ok_or(PlanError::GoalInObstacle {
                x: goal.x,
                y: goal.y,
            })?;
        let key = (grid_hash.to_string(), cell);
        let mut entries = self.entries.lock().expect("costmap cache poisoned");
        if let Some(map) = entries.get(&key) {
            return Ok(Arc::clone(map));
        }
        let map = Arc::new(build_costmap_with_field(
            &world.grid,
            &world.field,
            goal,
            &world.footprint,
        )?);
        entries.insert(key, Arc::clone(&map));
        Ok(map)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("costmap cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
