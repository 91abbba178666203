//! The constructed fractions are consecutive continued-fraction convergents
//! of each other; this recovers them with Euclid's algorithm.
//!
//!     cargo run --example continued_fractions

use cantor_convergents::build::{run, ConstructionParams, Mode, DEFAULT_MAX_BITS};
use cantor_convergents::verify::euclid_convergents;
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::Psi;

fn main() -> anyhow::Result<()> {
    let pair = DigitPair::new(3, &[0, 1], None)?;
    let params = ConstructionParams::new(pair, Psi::parse("1")?, ratio(1, 1), Mode::Relaxed, 3, DEFAULT_MAX_BITS)?;
    let cert = run(params)?;
    let last = cert.steps.last().expect("at least one step");

    let cf = euclid_convergents(&last.p, &last.q);
    println!("{}/{} = {}", last.p, last.q, cf.quotients_string());
    for (p, q) in &cf.convergents {
        let mark = if cert.steps.iter().any(|s| &s.p == p && &s.q == q) {
            "  <- constructed"
        } else {
            ""
        };
        println!("  {p}/{q}{mark}");
    }
    if let Some(alt) = cf.alternate() {
        println!("alternate expansion {}", alt.quotients_string());
    }
    Ok(())
}
