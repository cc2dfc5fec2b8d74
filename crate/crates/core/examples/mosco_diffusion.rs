//! Resolvent, energy and semigroup errors for `a_n = 1 + sin(x)/n` against
//! `a = 1` on a killed grid, plus the window-doubling check.

use moscolab::coeffs::sine_perturbed_unit;
use moscolab::forms::{assemble_diffusion, Boundary, Grid1D};
use moscolab::mosco::{gaussian_bump, mosco_diagnostic, window_sensitivity, write_report_csv, DiagnosticConfig};

fn main() -> moscolab::Result<()> {
    let grid = Grid1D::new(20.0, 2048, Boundary::Killing)?;
    let limit = assemble_diffusion(&sine_perturbed_unit(None)?, grid)?;
    let family = [2, 4, 8, 16, 32, 64, 128]
        .into_iter()
        .map(|n| Ok((n, assemble_diffusion(&sine_perturbed_unit(Some(n))?, grid)?)))
        .collect::<moscolab::Result<Vec<_>>>()?;
    let mut config = DiagnosticConfig::new(&grid);
    config.lambdas = vec![0.5, 1.0, 4.0];
    config.times = vec![2.0, 1.0, 0.25];
    let report = mosco_diagnostic("sine-diffusion", &family, &limit, &config)?;
    for (n, e) in report.worst_by_index() {
        println!("n = {n:>3}: worst relative resolvent error {e:.3e}");
    }
    println!("verdict: {}", report.verdict);

    let a = sine_perturbed_unit(Some(128))?;
    let s = window_sensitivity(|g| assemble_diffusion(&a, g), grid, 1.0, gaussian_bump)?;
    println!("window doubling changes G f by {s:.2e}");

    let path = std::env::temp_dir().join("sine_diffusion.csv");
    write_report_csv(&path, &report)?;
    println!("wrote {}", path.display());
    Ok(())
}
