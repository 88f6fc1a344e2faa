//! Test maps and a brute-force costmap.

use parkplan_core::world::{OccupancyGrid, World};
use parkplan_core::{Pose, VehicleParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn two_chambers() -> World {
    let mut grid = OccupancyGrid::new(120, 60, 0.25).unwrap();
    grid.fill_rect(14.5, 0.0, 15.5, 15.0);
    World::new(grid, VehicleParams::default()).unwrap()
}

pub fn random_pose(rng: &mut ChaCha8Rng, w: f64, h: f64) -> Pose {
    Pose::new(
        rng.random_range(0.0..w),
        rng.random_range(0.0..h),
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

/// Square map of `side` meters with a few rectangular blocks, plus a free start
/// and goal at least `min_gap` meters apart.
pub fn random_scenario(rng: &mut ChaCha8Rng, side: f64, min_gap: f64) -> (World, Pose, Pose) {
    loop {
        let cells = (side / 0.25).round() as usize;
        let mut grid = OccupancyGrid::new(cells, cells, 0.25).unwrap();
        for _ in 0..rng.random_range(1..=3) {
            let (x, y) = (rng.random_range(0.0..side), rng.random_range(0.0..side));
            let (bw, bh) = (rng.random_range(0.5..3.0), rng.random_range(0.5..3.0));
            grid.fill_rect(x, y, x + bw, y + bh);
        }
        let world = World::new(grid, VehicleParams::default()).unwrap();
        for _ in 0..200 {
            let s = random_pose(rng, side, side);
            let g = random_pose(rng, side, side);
            if world.is_free(&s) && world.is_free(&g) && s.distance(&g) >= min_gap {
                return (world, s, g);
            }
        }
    }
}

/// Exact Euclidean distance from every cell center to the nearest occupied one.
pub fn brute_distance(grid: &OccupancyGrid) -> Vec<f64> {
    let (w, h) = (grid.width(), grid.height());
    let occupied: Vec<(usize, usize)> = (0..h)
        .flat_map(|iy| (0..w).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| grid.is_occupied(ix, iy))
        .collect();
    let res = grid.resolution();
    (0..h)
        .flat_map(|iy| (0..w).map(move |ix| (ix, iy)))
        .map(|(ix, iy)| {
            occupied
                .iter()
                .map(|&(ox, oy)| {
                    let dx = ix as f64 - ox as f64;
                    let dy = iy as f64 - oy as f64;
                    (dx * dx + dy * dy).sqrt() * res
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Bellman-Ford relaxation to a fixed point over the 8-connected grid, costs kept
/// as (axis steps, diagonal steps).
pub fn bellman_ford(grid: &OccupancyGrid, goal_cell: (usize, usize), radius: f64) -> Vec<f64> {
    let (w, h) = (grid.width(), grid.height());
    let res = grid.resolution();
    let dist = brute_distance(grid);
    let passable = |ix: usize, iy: usize| {
        (ix, iy) == goal_cell || (!grid.is_occupied(ix, iy) && dist[iy * w + ix] >= radius)
    };
    let value = |s: (u32, u32)| s.0 as f64 * res + s.1 as f64 * res * std::f64::consts::SQRT_2;
    let mut steps: Vec<Option<(u32, u32)>> = vec![None; w * h];
    steps[goal_cell.1 * w + goal_cell.0] = Some((0, 0));
    loop {
        let mut changed = false;
        for iy in 0..h {
            for ix in 0..w {
                if !passable(ix, iy) {
                    continue;
                }
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (ix as i64 + dx, iy as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let Some(s) = steps[ny as usize * w + nx as usize] else {
                            continue;
                        };
                        let cand = if dx != 0 && dy != 0 {
                            (s.0, s.1 + 1)
                        } else {
                            (s.0 + 1, s.1)
                        };
                        let here = &mut steps[iy * w + ix];
                        if here.is_none_or(|c| value(cand) < value(c)) {
                            *here = Some(cand);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    steps
        .into_iter()
        .map(|s| s.map_or(f64::INFINITY, value))
        .collect()
}
