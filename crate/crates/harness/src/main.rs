use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parkplan_core::search::Engine;
use parkplan_harness::{
    csv_string, plan_slot, render_svg, run_scenario, run_sweep, save_svg, HarnessError, Scenario,
};

#[derive(Parser)]
#[command(
    name = "parkplan",
    version,
    about = "Plan parking maneuvers and benchmark planners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan from the lot entry into one slot.
    Plan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        slot: usize,
        #[arg(long, value_parser = parse_engine)]
        engine: Engine,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Append the KPI row to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run both planners on every slot and summarize the improvements.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Plan one slot and write the search tree and path as SVG.
    Render {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        slot: usize,
        #[arg(long, value_parser = parse_engine)]
        engine: Engine,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the lot as a map file.
    Map {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
        .map_err(|e: parkplan_core::PlanError| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Plan {
            config,
            slot,
            engine,
            svg,
            csv,
        } => {
            let outcome = run_scenario(&config, slot, engine, svg.as_deref(), csv.as_deref())?;
            print!("{}", csv_string(&[&outcome]));
            Ok(if outcome.found() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Sweep { config, out, jobs } => {
            let summary = run_sweep(&config, &out, jobs)?;
            print!("{}", summary.report());
            Ok(ExitCode::SUCCESS)
        }
        Command::Render {
            config,
            slot,
            engine,
            out,
        } => {
            let scenario = Scenario::load(&config)?;
            let outcome = plan_slot(&scenario, slot, engine)?;
            let image = render_svg(
                &scenario.world.grid,
                Some(&outcome.result),
                &outcome.result.expansions,
            );
            save_svg(&out, &image)?;
            Ok(if outcome.found() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Map { config, out } => {
            let scenario = Scenario::load(&config)?;
            std::fs::write(&out, scenario.map_text())
                .map_err(|source| HarnessError::Write { path: out, source })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
