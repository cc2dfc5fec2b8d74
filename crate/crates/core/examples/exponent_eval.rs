//! Evaluates the Cauchy exponent against `pi |xi|`, checks stable scaling,
//! and writes a variable-order exponent table to CSV.

use moscolab::coeffs::recurrent_to_transient_order;
use moscolab::levy::{eval_exponent, exponent_table, stable_scaling_check, write_exponent_table, LevyExponent};

fn main() -> moscolab::Result<()> {
    let cauchy = LevyExponent::stable(1, 1.0)?;
    for xi in [0.5, 1.0, 2.0, -2.0] {
        let phi = eval_exponent(&cauchy, &[xi])?;
        println!(
            "phi({xi:>4}) = {phi:.12}  (pi|xi| = {:.12})",
            std::f64::consts::PI * xi.abs()
        );
    }
    let stable = LevyExponent::stable(1, 1.5)?;
    println!(
        "scaling defect, alpha 1.5, c = 4: {:.2e}",
        stable_scaling_check(&stable, &[0.5], 4.0)?
    );

    let planar = LevyExponent::stable(2, 1.0)?;
    println!(
        "planar Cauchy constant: {:.10} (2 pi = {:.10})",
        eval_exponent(&planar, &[1.0, 0.0])?,
        2.0 * std::f64::consts::PI
    );

    let e = LevyExponent::jump(1, recurrent_to_transient_order(Some(2))?)?;
    let xis: Vec<f64> = (-8..=4).map(|k| 10f64.powi(k)).collect();
    let rows = exponent_table(&e, &xis)?;
    for (xi, est) in &rows {
        println!("xi = {xi:8.1e}: phi = {:.6e} +- {:.1e}", est.value, est.error);
    }
    let path = std::env::temp_dir().join("exponent_table.csv");
    write_exponent_table(&path, &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}
