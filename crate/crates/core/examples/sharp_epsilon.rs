//! Sweeps the order family `1 - (log(u + e^2))^(-eps)` and prints the
//! sharp verdict next to the numerical Chung-Fuchs evidence.

use moscolab::classify::{classify_sharp_epsilon, corroborating_property};

fn main() -> moscolab::Result<()> {
    println!(
        "{:>6}  {:<10}  {:<14}  {:>5}  fitted exponents",
        "eps", "verdict", "chung-fuchs", "depth"
    );
    for eps in [0.25, 0.5, 0.75, 0.99, 1.0, 1.25, 1.5] {
        let c = classify_sharp_epsilon(eps)?;
        let tail = &c.evidence[0];
        let fits: Vec<String> = tail.fitted_exponents.iter().map(|p| format!("{p:.4}")).collect();
        println!(
            "{eps:>6}  {:<10}  {:<14}  {:>5}  [{}]",
            c.property.to_string(),
            corroborating_property(&c).to_string(),
            tail.depth,
            fits.join(", ")
        );
    }
    Ok(())
}
