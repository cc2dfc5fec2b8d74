//! Recurrence verdicts for constant-order stable exponents, both variable
//! order families in one dimension and the planar stable-to-Brownian
//! sequence.

use std::time::Instant;

use moscolab::classify::{classify_chung_fuchs, classify_recurrence_u04, classify_sharp_epsilon};
use moscolab::coeffs::recurrent_to_transient_order;
use moscolab::levy::LevyExponent;

fn main() -> moscolab::Result<()> {
    let start = Instant::now();
    for alpha in [0.5, 1.0, 1.5] {
        let c = classify_chung_fuchs(&LevyExponent::stable(1, alpha)?)?;
        println!("d = 1, alpha = {alpha}: {} by {}", c.property, c.method);
    }

    for n in [1, 2, 3, 4] {
        let c = classify_recurrence_u04(&recurrent_to_transient_order(Some(n))?, 1)?;
        println!("alpha_n = 1 + 1/{n} - log^(-1/2): {} by {}", c.property, c.method);
    }
    let c = classify_sharp_epsilon(0.5)?;
    println!("limit 1 - log^(-1/2): {} by {}", c.property, c.method);

    for n in [2, 4, 8] {
        let eps = 1.0 - 1.0 / n as f64;
        let c = classify_sharp_epsilon(eps)?;
        println!("alpha_n = 1 - log^(-{eps}): {} by {}", c.property, c.method);
    }
    let c = classify_sharp_epsilon(1.0)?;
    println!("limit 1 - log^(-1): {} by {}", c.property, c.method);

    for n in [1, 2, 4, 8] {
        let c = classify_chung_fuchs(&LevyExponent::stable(2, 2.0 - 1.0 / n as f64)?)?;
        println!("d = 2, |x|^(2 - 1/{n}): {} by {}", c.property, c.method);
    }
    let brownian = LevyExponent::gaussian(2, vec![2.0, 0.0, 0.0, 2.0])?;
    let c = classify_chung_fuchs(&brownian)?;
    println!("d = 2, |x|^2: {} by {}", c.property, c.method);
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
