//! Assembles the Cauchy-order jump form on a periodic grid and compares
//! its energy on a Gaussian bump with the Fourier multiplier form, for
//! several near-diagonal treatments.

use moscolab::coeffs::{JumpKernel, OrderFunction};
use moscolab::forms::{assemble_jump_with, assemble_multiplier, Boundary, Grid1D, JumpAssembly};
use moscolab::levy::LevyExponent;

fn main() -> moscolab::Result<()> {
    let grid = Grid1D::new(20.0, 4096, Boundary::Periodic)?;
    let bump = grid.sample(|x| (-x * x).exp());
    let order = OrderFunction::constant(1.0)?;
    let multiplier = assemble_multiplier(&LevyExponent::jump(1, order.clone())?, grid)?;
    let reference = multiplier.energy(&bump)?;
    println!("multiplier energy: {reference:.8}");
    let kernel = JumpKernel::translation_invariant(1, order);
    for (radius, moments) in [(0.5, true), (1.0, true), (0.5, false), (1.0, false)] {
        let opts = JumpAssembly {
            correction_radius: radius,
            moment_weights: moments,
        };
        let form = assemble_jump_with(&kernel, grid, opts)?;
        let e = form.energy(&bump)?;
        println!(
            "radius {radius:.1}h, moment weights {moments:<5}: energy {e:.8}, relative gap {:.3e}",
            (e - reference).abs() / reference
        );
    }
    Ok(())
}
