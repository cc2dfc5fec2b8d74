//! Runs every sampled property suite and prints one line per check.

use std::time::Instant;

fn main() -> moscolab::Result<()> {
    let start = Instant::now();
    let (ok, checks) = moscolab::invariants::run_all(7)?;
    for c in &checks {
        println!("{c}");
    }
    println!("{} checks, all passed: {ok} ({:.1?})", checks.len(), start.elapsed());
    Ok(())
}
