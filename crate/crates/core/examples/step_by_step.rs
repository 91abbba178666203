//! Drives the construction one step at a time: the residue class forced on
//! m2, the candidate chosen by the gap test, and the resulting convergent.
//!
//!     cargo run --example step_by_step

use cantor_convergents::build::{Construction, ConstructionParams, Mode, NextM, DEFAULT_MAX_BITS};
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::Psi;

fn main() -> anyhow::Result<()> {
    let pair = DigitPair::new(4, &[1, 3], None)?;
    let params = ConstructionParams::new(
        pair,
        Psi::parse("q^-2")?,
        ratio(1, 1),
        Mode::Relaxed,
        3,
        DEFAULT_MAX_BITS,
    )?;
    let mut c = Construction::initial_data(params)?;

    let s1 = &c.steps()[0];
    println!("m1 = {}, q0 = {}, v = {}", c.m1(), c.q0(), c.v().to_digit_string());
    println!("p1/q1 = {}/{}, w1 = {}", s1.p, s1.q, s1.word.to_digit_string());
    println!("m2 must satisfy m2 ≡ {} (mod q1)", c.m2_residue());

    while c.steps().len() < 3 {
        match c.next_m()? {
            NextM::Chosen(m) => {
                let s = c.step(m)?;
                println!(
                    "chose m{} = {m}: q{} has {} bits, sigma = {:+}",
                    s.i,
                    s.i,
                    s.q.bits(),
                    s.sigma
                );
            }
            NextM::BudgetExhausted => {
                println!("next step exceeds the bit budget");
                break;
            }
        }
    }
    Ok(())
}
