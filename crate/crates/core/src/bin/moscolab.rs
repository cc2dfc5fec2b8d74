use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use moscolab::scenario::{
    emit_report, load_config, output_dir, run_scenario, Overrides, Scenario, ScenarioConfig, ScenarioId,
    ScenarioOutcome, OUT_ENV,
};

#[derive(Parser)]
#[command(
    name = "moscolab",
    version,
    about = "Scenario runner for recurrence, explosion and resolvent convergence experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios and write CSV tables and summaries.
    Run {
        /// Scenario id, comma-separated ids, or `all`.
        #[arg(long)]
        scenario: String,
        /// TOML file with one `[scenario-id]` table per scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (falls back to $MOSCOLAB_OUT, then ./moscolab-out).
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long)]
        grid_l: Option<f64>,
        /// Largest index used by classification and diagnostics.
        #[arg(long)]
        n_max: Option<u32>,
        /// Run the selected scenarios concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Print the registered scenario ids.
    ListScenarios,
    /// Run the sampled property suites.
    CheckInvariants {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn select(spec: &str) -> moscolab::Result<Vec<ScenarioId>> {
    if spec == "all" {
        return Ok(ScenarioId::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse()).collect()
}

fn run(
    spec: &str,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    overrides: Overrides,
    parallel: bool,
) -> moscolab::Result<bool> {
    let ids = select(spec)?;
    let file = match &config {
        Some(path) => load_config(path)?,
        None => Default::default(),
    };
    let scenarios = ids
        .iter()
        .map(|id| Scenario::new(*id, file.get(id).unwrap_or(&ScenarioConfig::default()), &overrides))
        .collect::<moscolab::Result<Vec<_>>>()?;
    let outcomes: Vec<moscolab::Result<ScenarioOutcome>> = if parallel {
        scenarios.par_iter().map(run_scenario).collect()
    } else {
        scenarios.iter().map(run_scenario).collect()
    };
    let dir = output_dir(out);
    let mut all_ok = true;
    for outcome in outcomes {
        let outcome = outcome?;
        let (csv, txt) = emit_report(&outcome, &dir)?;
        let status = if outcome.passed() { "ok" } else { "MISMATCH" };
        println!(
            "{:<18} {status:<8} {} {}",
            outcome.id.as_str(),
            csv.display(),
            txt.display()
        );
        all_ok &= outcome.passed();
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            config,
            out,
            grid_n,
            grid_l,
            n_max,
            parallel,
        } => run(&scenario, config, out, Overrides { grid_n, grid_l, n_max }, parallel),
        Command::ListScenarios => {
            for id in ScenarioId::ALL {
                println!("{:<18} {}", id.as_str(), id.description());
            }
            Ok(true)
        }
        Command::CheckInvariants { seed } => moscolab::invariants::run_all(seed).map(|(ok, checks)| {
            for c in &checks {
                println!("{c}");
            }
            println!(
                "{} checks, {} failed",
                checks.len(),
                checks.iter().filter(|c| !c.passed).count()
            );
            ok
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(2)
        }
    }
}
