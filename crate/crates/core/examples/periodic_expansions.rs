//! Exact conversion between rationals and eventually periodic expansions,
//! and membership in a missing-digit set.
//!
//!     cargo run --example periodic_expansions

use cantor_convergents::words::{
    in_cantor, periodic_to_rational, ratio, rational_to_expansion, DigitPair, DigitWord, DEFAULT_DIGIT_BUDGET,
};

fn main() -> anyhow::Result<()> {
    for (p, q, b) in [(1, 4, 3), (1, 7, 10), (3, 8, 2), (5, 13, 7)] {
        let e = rational_to_expansion(&ratio(p, q), b, DEFAULT_DIGIT_BUDGET)?;
        println!("{p}/{q} in base {b} = {e} -> {}", e.to_rational(b)?);
    }

    // 0.(01) in base 3 is 1/8
    let x = periodic_to_rational(&DigitWord::empty(), &DigitWord::from_digit_string("01")?, 3)?;
    println!("(0.(01))_3 = {x}");

    let middle = DigitPair::new(3, &[0, 2], None)?;
    for (p, q) in [(1, 4), (3, 4), (1, 2), (1, 10), (2, 3)] {
        let inside = in_cantor(&ratio(p, q), &middle, DEFAULT_DIGIT_BUDGET)?;
        println!(
            "{p}/{q} {} the middle-third set",
            if inside { "is in" } else { "is not in" }
        );
    }
    Ok(())
}
