//! Resolvent convergence of the recurrent-to-transient multiplier family
//! and a cross-check of the `xi^2` multiplier against the flux diffusion
//! scheme.

use std::time::Instant;

use moscolab::coeffs::{recurrent_to_transient_order, DiffusionCoefficient};
use moscolab::forms::{assemble_diffusion, assemble_multiplier, multiplier_from_symbol, Boundary, Grid1D};
use moscolab::levy::LevyExponent;
use moscolab::linalg::norm_h;
use moscolab::mosco::{gaussian_bump, mosco_diagnostic, resolvent, DiagnosticConfig, TestVector};

fn main() -> moscolab::Result<()> {
    let start = Instant::now();
    let grid = Grid1D::new(20.0, 2048, Boundary::Periodic)?;
    let limit = assemble_multiplier(&LevyExponent::jump(1, recurrent_to_transient_order(None)?)?, grid)?;
    let family = [1, 2, 4, 8, 16]
        .into_iter()
        .map(|n| {
            Ok((
                n,
                assemble_multiplier(&LevyExponent::jump(1, recurrent_to_transient_order(Some(n))?)?, grid)?,
            ))
        })
        .collect::<moscolab::Result<Vec<_>>>()?;
    let mut config = DiagnosticConfig::new(&grid);
    config.vectors = vec![TestVector::sample("gauss", &grid, gaussian_bump)];
    let report = mosco_diagnostic("multiplier", &family, &limit, &config)?;
    for e in &report.entries {
        println!(
            "n = {:>2}: energy {:.3e}, resolvent {:.3e}, semigroup {:.3e}",
            e.index, e.energy_error, e.resolvent_error, e.semigroup_error
        );
    }
    println!("verdict: {} ({:.1?})", report.verdict, start.elapsed());

    for n in [2048, 8192] {
        let grid = Grid1D::new(20.0, n, Boundary::Periodic)?;
        let symbol = (0..n).map(|k| grid.frequency(k).powi(2)).collect();
        let spectral = multiplier_from_symbol(symbol, grid);
        let flux = assemble_diffusion(&DiffusionCoefficient::scalar("1", |_| 1.0), grid)?;
        let f = grid.sample(gaussian_bump);
        let a = resolvent(&spectral, 1.0, &f)?.output;
        let b = resolvent(&flux, 1.0, &f)?.output;
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let h = grid.spacing();
        println!("N = {n}: relative gap {:.3e}", norm_h(&diff, h) / norm_h(&a, h));
    }
    Ok(())
}
