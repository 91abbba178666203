//! Gap functions Ψ(q) are parsed from text and evaluated exactly in the form
//! mantissa·b^exponent, so values like 3^-(10^6) are never materialized.
//!
//!     cargo run --example gap_functions

use std::cmp::Ordering;

use cantor_convergents::psi::{compare_expforms, compare_via_logs, ExpForm, Quantity, DEFAULT_LOG_PRECISION};
use cantor_convergents::words::ratio;
use cantor_convergents::Psi;
use num_bigint::BigUint;

fn main() -> anyhow::Result<()> {
    let q = BigUint::from(3280u32);
    for text in ["1", "q^-2", "1/2 * q^-1", "min(q^-2, 1/1000)", "expb(-q)"] {
        let psi = Psi::parse(text)?;
        println!("Ψ(q) = {text:<18} Ψ(3280) = {}", psi.eval(&q, 3)?);
    }

    // exact comparison of huge powers
    let a = ExpForm::power_of_base(3, -1_000_000);
    let b = ExpForm::new(3, ratio(2, 1), -1_000_001);
    let verdict = match compare_expforms(&a, &b) {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    };
    println!("3^-1000000 {verdict} 2·3^-1000001");

    // irrational exponents go through certified log brackets
    let x = Quantity::power(3280u32, ratio(3280, 1));
    let y = Quantity::from(ExpForm::power_of_base(3, 37_900));
    println!(
        "3280^3280 vs 3^37900: {:?}",
        compare_via_logs(&x, &y, 3, DEFAULT_LOG_PRECISION)
    );
    Ok(())
}
