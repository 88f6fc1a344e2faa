//! Scenario files, benchmark sweeps, KPI reports and SVG output for the parking
//! planners.

pub mod config;
pub mod error;
pub mod kpi;
pub mod scenario;
pub mod svg;

pub use config::ScenarioConfig;
pub use error::{HarnessError, Result};
pub use kpi::{compute_kpis, KpiReport};
pub use scenario::{
    append_csv, csv_string, plan_slot, run_scenario, run_sweep, summarize, sweep_scenario,
    write_csv, Improvements, RunOutcome, Scenario, SweepSummary, CSV_HEADER,
};
pub use svg::{render_svg, save_svg};
