//! Initial data for a few digit pairs: the split u = u1·u2 against the base,
//! m1 from Euler's totient, and the first convergent.
//!
//!     cargo run --example choosing_m1

use cantor_convergents::numth::{choose_m1, euler_phi, split_u};
use cantor_convergents::words::DigitPair;

fn main() -> anyhow::Result<()> {
    println!(
        "{:>2} {:>6} {:>3} {:>4} {:>4} {:>5} {:>6}",
        "b", "pair", "u", "u1", "u2", "m1", "N"
    );
    for (b, d1, d2) in [
        (3, 0, 1),
        (3, 0, 2),
        (4, 1, 3),
        (6, 1, 5),
        (10, 2, 7),
        (12, 0, 8),
        (36, 3, 35),
    ] {
        let pair = DigitPair::new(b, &[d1, d2], None)?;
        let split = split_u(u64::from(pair.u()), u64::from(b));
        let (m1, n) = choose_m1(&pair)?;
        println!(
            "{b:>2} ({d1},{d2}) {:>3} {:>4} {:>4} {m1:>5} {n:>6}",
            split.u, split.u1, split.u2
        );
    }
    println!("φ(2^2·2^2) = {}", euler_phi(16)?);
    Ok(())
}
