//! Acceptance suite. Each test prints one `criterion N PASS|FAIL` line.
//!
//! Run with `cargo test -p parkplan-harness --test acceptance -- --nocapture --test-threads=1`
//! so that timing comparisons are not disturbed by other tests.

mod support;

use std::sync::OnceLock;
use std::time::Instant;

use parkplan_core::heuristics::{build_costmap, h_nonholonomic, CostmapCache, HeuristicSet};
use parkplan_core::reeds_shepp::{rs_length, rs_shortest_path, SegmentKind};
use parkplan_core::search::{
    bidirectional_plan, check_path_contract, smha_star, Engine, PlanResult, PlanStatus,
    PlannerConfig, SearchContext,
};
use parkplan_core::vehicle::{footprint_disks, propagate, ACTIONS};
use parkplan_core::world::{OccupancyGrid, World};
use parkplan_core::{DiskFootprint, Pose, VehicleParams};
use parkplan_harness::{
    plan_slot, sweep_scenario, RunOutcome, Scenario, ScenarioConfig, SweepSummary,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use support::grids::{bellman_ford, random_pose, random_scenario, two_chambers};
use support::rs_oracle::{brute_force_length, drive, wrap, Turn};
use support::ucs::uniform_cost;
use support::verdict;

const SLOT: usize = 27;

fn scenario() -> &'static Scenario {
    static S: OnceLock<Scenario> = OnceLock::new();
    S.get_or_init(|| Scenario::from_config(ScenarioConfig::parse("").unwrap()).unwrap())
}

fn sweep() -> &'static SweepSummary {
    static S: OnceLock<SweepSummary> = OnceLock::new();
    S.get_or_init(|| sweep_scenario(scenario(), 1).unwrap())
}

fn slot_pair() -> (RunOutcome, RunOutcome) {
    let s = scenario();
    (
        plan_slot(s, SLOT, Engine::HybridAstar).unwrap(),
        plan_slot(s, SLOT, Engine::Smha).unwrap(),
    )
}

/// Three small scenarios per seed, reproducible across criteria.
fn small_scenarios() -> Vec<(World, Pose, Pose)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    (0..20)
        .map(|i| {
            let side = [10.0, 12.5, 15.0][i % 3];
            random_scenario(&mut rng, side, 4.0)
        })
        .collect()
}

fn contract(result: &PlanResult, world: &World) -> Result<(), String> {
    let c = PlannerConfig::default();
    check_path_contract(result, world, c.goal_xy_tol, c.goal_theta_tol)
}

#[test]
fn criterion_1_reeds_shepp() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let pairs: Vec<(Pose, Pose)> = (0..1000)
        .map(|_| {
            (
                random_pose(&mut rng, 20.0, 20.0),
                random_pose(&mut rng, 20.0, 20.0),
            )
        })
        .collect();

    let mut worst_end = 0.0f64;
    for (s, g) in &pairs {
        let path = rs_shortest_path(s, g, 1.0);
        let end = path.segments.iter().fold((s.x, s.y, s.theta), |p, seg| {
            let turn = match seg.kind {
                SegmentKind::Left => Turn::L,
                SegmentKind::Straight => Turn::S,
                SegmentKind::Right => Turn::R,
            };
            drive(p, turn, seg.signed_length)
        });
        let err = (end.0 - g.x)
            .abs()
            .max((end.1 - g.y).abs())
            .max(wrap(end.2 - g.theta).abs());
        worst_end = worst_end.max(err);
    }

    let gaps: Vec<f64> = pairs[..50]
        .par_iter()
        .map(|(s, g)| {
            let (sn, cs) = s.theta.sin_cos();
            let (dx, dy) = (g.x - s.x, g.y - s.y);
            let local = (
                cs * dx + sn * dy,
                -sn * dx + cs * dy,
                wrap(g.theta - s.theta),
            );
            (brute_force_length(local) - rs_length(s, g, 1.0)).abs()
        })
        .collect();
    let worst_gap = gaps.iter().copied().fold(0.0, f64::max);
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        1,
        worst_end < 1e-6 && worst_gap < 1e-3 && secs < 60.0,
        &format!("endpoint error {worst_end:.2e} over 1000 pairs, brute-force gap {worst_gap:.2e} over 50, {secs:.1} s"),
    );
}

#[test]
fn criterion_2_heuristic_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let config = PlannerConfig::default();
    let radius = VehicleParams::default().min_turning_radius();
    let mut violations = 0;
    for _ in 0..10_000 {
        let p = random_pose(&mut rng, 20.0, 20.0);
        let goal = random_pose(&mut rng, 20.0, 20.0);
        let action = ACTIONS[rng.random_range(0..ACTIONS.len())];
        let arc = rng.random_range(config.arc_length_min..=config.arc_length_max);
        let q = propagate(&p, action, arc, radius);
        // the unpenalized arc length is the cheapest any edge can be
        if h_nonholonomic(&p, &goal, radius) > arc + h_nonholonomic(&q, &goal, radius) + 1e-9 {
            violations += 1;
        }
    }

    let mut mismatched = 0;
    for _ in 0..100 {
        let (w, h) = (rng.random_range(2..=16), rng.random_range(2..=16));
        let res = [0.25, 0.5, 1.0][rng.random_range(0..3)];
        let density = rng.random_range(0.0..0.4);
        let cells: Vec<bool> = (0..w * h).map(|_| rng.random_bool(density)).collect();
        let mut grid = OccupancyGrid::from_cells(w, h, res, cells).unwrap();
        let goal_cell = (rng.random_range(0..w), rng.random_range(0..h));
        grid.set(goal_cell.0, goal_cell.1, false);
        let (gx, gy) = grid.cell_center(goal_cell.0, goal_cell.1);
        let footprint = DiskFootprint {
            centers: vec![(0.0, 0.0)],
            radius: rng.random_range(0.0..2.0 * res),
            spacing: 0.0,
        };
        let map = build_costmap(&grid, &Pose::new(gx, gy, 0.0), &footprint).unwrap();
        if map.costs() != bellman_ford(&grid, goal_cell, footprint.radius).as_slice() {
            mismatched += 1;
        }
    }
    verdict(
        2,
        violations == 0 && mismatched == 0,
        &format!("{violations} consistency violations in 10000 edges, {mismatched} of 100 costmaps differ from Bellman-Ford"),
    );
}

#[test]
fn criterion_3_suboptimality_bound() {
    let config = PlannerConfig::default();
    let bound = config.weight_w1 * config.weight_w2;
    let rows: Vec<(Option<f64>, Option<f64>, usize)> = small_scenarios()
        .par_iter()
        .map(|(world, s, g)| {
            let cache = CostmapCache::new();
            let ctx = SearchContext::new(world, &cache);
            let r = smha_star(s, g, &ctx, &HeuristicSet::default(), &config).unwrap();
            let smha = r.is_found().then_some(r.cost);
            // one pose per bin makes any single binning order-dependent, so the
            // optimum is the better of the planners' bins and a twice-finer grid
            let ucs = [1, 2]
                .iter()
                .filter_map(|&k| uniform_cost(world, s, g, &config, k))
                .map(|u| u.cost)
                .reduce(f64::min);
            (smha, ucs, r.stats.max_bin_expansions)
        })
        .collect();

    let mut failures = Vec::new();
    let mut worst_ratio = 0.0f64;
    let mut solved = 0;
    for (i, &(smha, ucs, max_exp)) in rows.iter().enumerate() {
        match (smha, ucs) {
            (Some(c), Some(opt)) => {
                solved += 1;
                worst_ratio = worst_ratio.max(c / opt.max(1e-12));
                if c > bound * opt + 1e-9 {
                    failures.push(format!("scenario {i}: cost {c:.3} > {bound} x {opt:.3}"));
                }
            }
            (None, None) => {}
            (a, b) => failures.push(format!("scenario {i}: smha {a:?} vs optimum {b:?}")),
        }
        if max_exp > 2 {
            failures.push(format!("scenario {i}: a bin was expanded {max_exp} times"));
        }
    }
    verdict(
        3,
        failures.is_empty(),
        &format!(
            "{solved}/20 solved, worst cost ratio {worst_ratio:.3} (bound {bound}), max bin expansions {}{}",
            rows.iter().map(|r| r.2).max().unwrap_or(0),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    );
}

#[test]
fn criterion_4_slot_27_direction() {
    let t0 = Instant::now();
    let (hy, sm) = slot_pair();
    let world = &scenario().world;
    let (kh, ks) = (&hy.kpi, &sm.kpi);
    let found = hy.found() && sm.found();
    let len_gap = (kh.path_length - ks.path_length).abs() / kh.path_length.min(ks.path_length);
    let contracts = contract(&hy.result, world).and(contract(&sm.result, world));
    let secs = t0.elapsed().as_secs_f64();
    let ok = found
        && ks.expanded_states < kh.expanded_states
        && ks.execution_time_s < kh.execution_time_s
        && kh.direction_changes <= 6
        && ks.direction_changes <= 6
        && len_gap <= 0.15
        && contracts.is_ok()
        && secs < 120.0;
    verdict(
        4,
        ok,
        &format!(
            "hybrid {} exp {:.3} s {:.2} m {} changes; smha {} exp {:.3} s {:.2} m {} changes; length gap {:.1}%; contracts {:?}; {secs:.1} s",
            kh.expanded_states,
            kh.execution_time_s,
            kh.path_length,
            kh.direction_changes,
            ks.expanded_states,
            ks.execution_time_s,
            ks.path_length,
            ks.direction_changes,
            100.0 * len_gap,
            contracts,
        ),
    );
}

#[test]
fn criterion_5_sweep_improvement() {
    let t0 = Instant::now();
    let summary = sweep();
    let secs = t0.elapsed().as_secs_f64();
    let imp = &summary.improvements;
    let time = imp.execution_time.unwrap_or(f64::NEG_INFINITY);
    let expanded = imp.expanded_states.unwrap_or(f64::NEG_INFINITY);
    let ok = time >= 30.0
        && expanded >= 50.0
        && summary.candidate_successes >= summary.baseline_successes
        && secs < 900.0;
    verdict(
        5,
        ok,
        &format!(
            "time improvement {time:.1}%, expansion improvement {expanded:.1}%, found hybrid {}/{} smha {}/{}, {secs:.1} s",
            summary.baseline_successes,
            summary.pairs.len(),
            summary.candidate_successes,
            summary.pairs.len()
        ),
    );
}

#[test]
fn criterion_6_geometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut uncovered = 0usize;
    for _ in 0..100 {
        let wheelbase = rng.random_range(2.0..3.2);
        let body_length = wheelbase + rng.random_range(0.6..2.0);
        let params = VehicleParams {
            wheelbase,
            body_length,
            body_width: rng.random_range(1.4..2.3),
            rear_overhang: rng.random_range(0.0..=body_length - wheelbase),
            alpha_max: rng.random_range(0.3..0.7),
            n_disks: rng.random_range(1..=5),
        };
        let fp = footprint_disks(&params);
        for _ in 0..10_000 {
            let x = rng.random_range(-params.rear_overhang..=body_length - params.rear_overhang);
            let y = rng.random_range(-params.body_width / 2.0..=params.body_width / 2.0);
            let inside = fp
                .centers
                .iter()
                .any(|&(cx, cy)| (x - cx).hypot(y - cy) <= fp.radius + 1e-12);
            if !inside {
                uncovered += 1;
            }
        }
    }

    let fp = footprint_disks(&VehicleParams {
        wheelbase: 2.6,
        body_length: 4.0,
        body_width: 2.0,
        rear_overhang: 0.7,
        alpha_max: 0.6,
        n_disks: 3,
    });
    let r_ok = (fp.radius - 1.66667).abs() < 1e-4;
    let d_ok = (fp.spacing - 2.60342).abs() < 1e-4;
    verdict(
        6,
        uncovered == 0 && r_ok && d_ok,
        &format!(
            "{uncovered} uncovered samples of 1000000; r = {:.5} (expected 1.66667); d = {:.5} (expected 2.60342)",
            fp.radius, fp.spacing
        ),
    );
}

#[test]
fn criterion_7_end_to_end() {
    let mut checked = 0;
    let mut failures = Vec::new();
    let world = &scenario().world;
    let (hy, sm) = slot_pair();
    let lot_runs = sweep().rows().into_iter().cloned().chain([hy, sm]);
    for run in lot_runs.filter(RunOutcome::found) {
        checked += 1;
        if let Err(e) = contract(&run.result, world) {
            failures.push(format!("slot {} {}: {e}", run.slot_id, run.engine.as_str()));
        }
    }
    let config = PlannerConfig::default();
    for (i, (w, s, g)) in small_scenarios().iter().enumerate() {
        let cache = CostmapCache::new();
        let ctx = SearchContext::new(w, &cache);
        let r = smha_star(s, g, &ctx, &HeuristicSet::default(), &config).unwrap();
        if r.is_found() {
            checked += 1;
            if let Err(e) = contract(&r, w) {
                failures.push(format!("small scenario {i}: {e}"));
            }
        }
    }

    let chambers = two_chambers();
    let cache = CostmapCache::new();
    let ctx = SearchContext::new(&chambers, &cache);
    let (s, g) = (Pose::new(6.0, 7.5, 0.0), Pose::new(23.0, 7.5, 0.0));
    let mut statuses = Vec::new();
    for engine in [Engine::HybridAstar, Engine::Smha] {
        let r =
            bidirectional_plan(&s, &g, &ctx, &HeuristicSet::default(), &config, engine).unwrap();
        statuses.push(r.status);
        if r.status != PlanStatus::Infeasible {
            failures.push(format!(
                "two chambers with {}: {:?}",
                engine.as_str(),
                r.status
            ));
        }
    }
    verdict(
        7,
        failures.is_empty(),
        &format!(
            "{checked} found plans checked, two-chamber statuses {statuses:?}{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    );
}

#[test]
fn criterion_8_determinism() {
    let strip = |o: &RunOutcome| {
        let mut rec = o.csv_record().to_vec();
        rec.remove(5);
        rec.join(",")
    };
    let (h1, s1) = slot_pair();
    let (h2, s2) = slot_pair();
    let first = [strip(&h1), strip(&s1)];
    let second = [strip(&h2), strip(&s2)];
    let same =
        first == second && h1.result.poses == h2.result.poses && s1.result.poses == s2.result.poses;
    verdict(8, same, &format!("first {first:?}, second {second:?}"));
}
