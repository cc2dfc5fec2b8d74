//! Local L1 distances of coefficient sequences to their limits: order
//! functions, diffusion matrices and planar exponents.

use moscolab::coeffs::{
    check_assumption_sequence, l1_local_distance_matrix, recurrent_to_transient_order, sine_perturbed_unit, Region,
};

fn main() -> moscolab::Result<()> {
    let limit = recurrent_to_transient_order(None)?;
    let report = check_assumption_sequence(
        |n, x| Ok(recurrent_to_transient_order(Some(n))?.eval(x[0].abs())),
        |x| Ok(limit.eval(x[0].abs())),
        &Region::interval(0.0, 10.0),
        &[1, 2, 4, 8, 16],
        2000,
    )?;
    println!("order functions: {:?} -> {:?}", report.distances, report.trend);

    let a = sine_perturbed_unit(None)?;
    for n in [2, 8, 32] {
        let d = l1_local_distance_matrix(&sine_perturbed_unit(Some(n))?, &a, &Region::interval(-5.0, 5.0), 4000)?;
        println!("diffusion n = {n:>2}: {d:.5}");
    }

    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let planar = check_assumption_sequence(
        |n, x| Ok(norm(x).powf(2.0 - 1.0 / n as f64)),
        |x| Ok(norm(x).powi(2)),
        &Region::cube(2, -1.0, 1.0),
        &[1, 2, 4, 8],
        200,
    )?;
    println!("planar exponents: {:?} -> {:?}", planar.distances, planar.trend);
    Ok(())
}
