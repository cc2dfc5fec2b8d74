//! Feller's test on the two growing-coefficient diffusion families: one
//! explosive sequence with a conservative limit and one the other way round.

use moscolab::classify::feller_explosion_test;
use moscolab::coeffs::{make_prop15_coefficient, Prop15Variant};

fn main() -> moscolab::Result<()> {
    let cases = [
        ("explosive family, n = 1", Prop15Variant::ExplosiveFamily(1)),
        ("explosive family, n = 2", Prop15Variant::ExplosiveFamily(2)),
        ("explosive family, n = 4", Prop15Variant::ExplosiveFamily(4)),
        ("its limit", Prop15Variant::ConservativeLimit),
        ("conservative family, n = 1", Prop15Variant::ConservativeFamily(1)),
        ("conservative family, n = 2", Prop15Variant::ConservativeFamily(2)),
        ("conservative family, n = 4", Prop15Variant::ConservativeFamily(4)),
        ("its limit", Prop15Variant::ExplosiveLimit),
    ];
    for (label, variant) in cases {
        let c = feller_explosion_test(&make_prop15_coefficient(variant)?)?;
        let depths: Vec<String> = c
            .evidence
            .iter()
            .map(|t| format!("{:?} at depth {}", t.verdict, t.depth))
            .collect();
        println!("{label:<28} {:<13} {}", c.property.to_string(), depths.join(", "));
    }
    Ok(())
}
