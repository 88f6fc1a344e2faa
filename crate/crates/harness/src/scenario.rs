use std::fs::{self, OpenOptions};
use std::path::Path;
use std::time::Instant;

use parkplan_core::heuristics::{CostmapCache, HeuristicSet};
use parkplan_core::search::{
    bidirectional_plan, Engine, PlanResult, PlanStatus, PlannerConfig, SearchContext,
};
use parkplan_core::world::{build_parking_layout, read_map, write_map, Slot, World};
use parkplan_core::{PlanError, Pose};
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::{HarnessError, Result};
use crate::kpi::{compute_kpis, KpiReport};
use crate::svg::{render_svg, save_svg};

pub const CSV_HEADER: [&str; 10] = [
    "slot_id",
    "engine",
    "status",
    "expanded_states",
    "iterations",
    "execution_time_s",
    "path_length_m",
    "reverse_path_length_m",
    "direction_changes",
    "map_hash",
];

/// A loaded lot together with the planner settings used on it.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub planner: PlannerConfig,
    pub heuristics: HeuristicSet,
    pub world: World,
    pub slots: Vec<Slot>,
    pub entry: Pose,
    pub map_hash: String,
}

impl Scenario {
    pub fn from_config(config: ScenarioConfig) -> Result<Self> {
        let params = config.vehicle_params();
        let planner = config.planner_config()?;
        let (grid, slots) = match &config.map.file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| HarnessError::Read {
                    path: path.clone(),
                    source,
                })?;
                read_map(&text)?
            }
            None => {
                let layout = build_parking_layout(&config.layout_spec(), &params)?;
                (layout.grid, layout.slots)
            }
        };
        let world = World::new(grid, params)?;
        let map_hash = world.grid.content_hash();
        Ok(Self {
            entry: config.entry_pose(),
            heuristics: HeuristicSet::default(),
            config,
            planner,
            world,
            slots,
            map_hash,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_config(ScenarioConfig::load(path)?)
    }

    pub fn slot(&self, id: usize) -> Result<&Slot> {
        self.slots
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| HarnessError::Config(format!("no slot with id {id}")))
    }

    /// Map file contents for the lot.
    pub fn map_text(&self) -> String {
        write_map(&self.world.grid, &self.slots)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub slot_id: usize,
    pub engine: Engine,
    pub kpi: KpiReport,
    pub result: PlanResult,
    pub map_hash: String,
}

impl RunOutcome {
    pub fn found(&self) -> bool {
        self.kpi.status == PlanStatus::Found
    }

    pub fn csv_record(&self) -> [String; 10] {
        let k = &self.kpi;
        [
            self.slot_id.to_string(),
            self.engine.as_str().to_string(),
            k.status.as_str().to_string(),
            k.expanded_states.to_string(),
            k.iterations.to_string(),
            format!("{:.6}", k.execution_time_s),
            format!("{:.6}", k.path_length),
            format!("{:.6}", k.reverse_path_length),
            k.direction_changes.to_string(),
            self.map_hash.clone(),
        ]
    }
}

/// Plans from the entry to one slot with a fresh costmap cache. The measured time
/// covers heuristic precomputation and both search stages.
pub fn plan_slot(scenario: &Scenario, slot_id: usize, engine: Engine) -> Result<RunOutcome> {
    let goal = scenario.slot(slot_id)?.goal;
    let cache = CostmapCache::new();
    let ctx = SearchContext {
        world: &scenario.world,
        costmaps: &cache,
        grid_hash: scenario.map_hash.clone(),
    };
    let t0 = Instant::now();
    let planned = bidirectional_plan(
        &scenario.entry,
        &goal,
        &ctx,
        &scenario.heuristics,
        &scenario.planner,
        engine,
    );
    let elapsed = t0.elapsed();
    let mut result = match planned {
        Ok(r) => r,
        Err(PlanError::StartInCollision { .. } | PlanError::GoalInObstacle { .. }) => {
            PlanResult::unsolved(PlanStatus::Infeasible, scenario.entry, goal)
        }
        Err(e) => return Err(e.into()),
    };
    result.stats.wall_time = elapsed;
    Ok(RunOutcome {
        slot_id,
        engine,
        kpi: compute_kpis(&result),
        result,
        map_hash: scenario.map_hash.clone(),
    })
}

fn write_rows(path: &Path, rows: &[&RunOutcome], append: bool) -> Result<()> {
    let io_err = |source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    };
    let fresh = !append || fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(path)
        .map_err(io_err)?;
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(CSV_HEADER)?;
    }
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Appends rows to a CSV file, writing the header first when the file is new.
pub fn append_csv(path: &Path, rows: &[&RunOutcome]) -> Result<()> {
    write_rows(path, rows, true)
}

pub fn write_csv(path: &Path, rows: &[&RunOutcome]) -> Result<()> {
    write_rows(path, rows, false)
}

/// CSV text (header plus rows) for the given runs.
pub fn csv_string(rows: &[&RunOutcome]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(row.csv_record()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Loads a configuration, plans one slot and writes the requested artifacts.
pub fn run_scenario(
    config: &Path,
    slot_id: usize,
    engine: Engine,
    svg: Option<&Path>,
    csv_out: Option<&Path>,
) -> Result<RunOutcome> {
    let scenario = Scenario::load(config)?;
    let outcome = plan_slot(&scenario, slot_id, engine)?;
    if let Some(path) = svg {
        let image = render_svg(
            &scenario.world.grid,
            Some(&outcome.result),
            &outcome.result.expansions,
        );
        save_svg(path, &image)?;
    }
    if let Some(path) = csv_out {
        append_csv(path, &[&outcome])?;
    }
    Ok(outcome)
}

/// Mean per-slot improvement of the candidate over the baseline, in percent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Improvements {
    /// Slots where both engines found a plan.
    pub compared_slots: usize,
    pub expanded_states: Option<f64>,
    pub iterations: Option<f64>,
    pub execution_time: Option<f64>,
    pub path_length: Option<f64>,
    pub reverse_path_length: Option<f64>,
    pub direction_changes: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    /// `(baseline, candidate)` per slot, in slot order.
    pub pairs: Vec<(RunOutcome, RunOutcome)>,
    pub improvements: Improvements,
    pub baseline_successes: usize,
    pub candidate_successes: usize,
}

fn mean_improvement(
    pairs: &[&(RunOutcome, RunOutcome)],
    metric: impl Fn(&KpiReport) -> f64,
) -> Option<f64> {
    // slots where the baseline value is zero have no defined relative change
    let values: Vec<f64> = pairs
        .iter()
        .filter_map(|(b, c)| {
            let base = metric(&b.kpi);
            (base > 0.0).then(|| 100.0 * (base - metric(&c.kpi)) / base)
        })
        .collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn summarize(pairs: Vec<(RunOutcome, RunOutcome)>) -> SweepSummary {
    let both: Vec<&(RunOutcome, RunOutcome)> = pairs
        .iter()
        .filter(|(b, c)| b.found() && c.found())
        .collect();
    let improvements = Improvements {
        compared_slots: both.len(),
        expanded_states: mean_improvement(&both, |k| k.expanded_states as f64),
        iterations: mean_improvement(&both, |k| k.iterations as f64),
        execution_time: mean_improvement(&both, |k| k.execution_time_s),
        path_length: mean_improvement(&both, |k| k.path_length),
        reverse_path_length: mean_improvement(&both, |k| k.reverse_path_length),
        direction_changes: mean_improvement(&both, |k| k.direction_changes as f64),
    };
    SweepSummary {
        baseline_successes: pairs.iter().filter(|(b, _)| b.found()).count(),
        candidate_successes: pairs.iter().filter(|(_, c)| c.found()).count(),
        pairs,
        improvements,
    }
}

/// Runs Hybrid A* and then SMHA* on every slot. Both runs of a slot happen back to
/// back on the same worker; `jobs` workers process slots concurrently.
pub fn sweep_scenario(scenario: &Scenario, jobs: usize) -> Result<SweepSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start workers: {e}")))?;
    let ids: Vec<usize> = scenario.slots.iter().map(|s| s.id).collect();
    let pairs = pool.install(|| {
        ids.par_iter()
            .map(|&id| {
                let base = plan_slot(scenario, id, Engine::HybridAstar)?;
                let cand = plan_slot(scenario, id, Engine::Smha)?;
                Ok((base, cand))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(summarize(pairs))
}

impl SweepSummary {
    pub fn report(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |p| format!("{p:.1}%"));
        let i = &self.improvements;
        let n = self.pairs.len();
        [
            format!("slots: {n}"),
            format!("hybrid found: {}/{n}", self.baseline_successes),
            format!("smha found: {}/{n}", self.candidate_successes),
            format!("compared slots: {}", i.compared_slots),
            format!(
                "mean improvement expanded_states: {}",
                fmt(i.expanded_states)
            ),
            format!("mean improvement iterations: {}", fmt(i.iterations)),
            format!("mean improvement execution_time: {}", fmt(i.execution_time)),
            format!("mean improvement path_length: {}", fmt(i.path_length)),
            format!(
                "mean improvement reverse_path_length: {}",
                fmt(i.reverse_path_length)
            ),
            format!(
                "mean improvement direction_changes: {}",
                fmt(i.direction_changes)
            ),
        ]
        .join("\n")
            + "\n"
    }

    pub fn rows(&self) -> Vec<&RunOutcome> {
        self.pairs.iter().flat_map(|(b, c)| [b, c]).collect()
    }
}

/// Full sweep over a configuration; writes `sweep.csv` and `summary.txt` into
/// `out_dir`.
pub fn run_sweep(config: &Path, out_dir: &Path, jobs: usize) -> Result<SweepSummary> {
    let scenario = Scenario::load(config)?;
    fs::create_dir_all(out_dir).map_err(|source| HarnessError::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let summary = sweep_scenario(&scenario, jobs)?;
    write_csv(&out_dir.join("sweep.csv"), &summary.rows())?;
    let path = out_dir.join("summary.txt");
    fs::write(&path, summary.report()).map_err(|source| HarnessError::Write { path, source })?;
    Ok(summary)
}
