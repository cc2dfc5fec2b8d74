//! Runs one scenario through the library API and writes its table and
//! summary to a temporary directory.

use moscolab::scenario::{emit_report, run_scenario, Overrides, Scenario, ScenarioConfig, ScenarioId};

fn main() -> moscolab::Result<()> {
    let id: ScenarioId = std::env::args().nth(1).as_deref().unwrap_or("prop16i").parse()?;
    let overrides = Overrides {
        grid_n: Some(1024),
        n_max: Some(128),
        ..Default::default()
    };
    let scenario = Scenario::new(id, &ScenarioConfig::default(), &overrides)?;
    let outcome = run_scenario(&scenario)?;
    for c in &outcome.claims {
        println!("{:<40} expected {:<20} observed {}", c.subject, c.claimed, c.observed);
    }
    let dir = std::env::temp_dir().join("moscolab-example");
    let (csv, summary) = emit_report(&outcome, &dir)?;
    println!("{}\n{}", csv.display(), summary.display());
    Ok(())
}
