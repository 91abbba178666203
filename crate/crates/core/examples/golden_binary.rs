//! Three convergents of a number in the base-3 set with digits {0,1}.
//!
//!     cargo run --example golden_binary

use cantor_convergents::build::{run, ConstructionParams, Mode, DEFAULT_MAX_BITS};
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::{verify_all, Psi, VerifyOptions};

fn main() -> anyhow::Result<()> {
    let pair = DigitPair::new(3, &[0, 1], None)?;
    let params = ConstructionParams::new(pair, Psi::parse("1")?, ratio(1, 1), Mode::Relaxed, 3, DEFAULT_MAX_BITS)?;
    let cert = run(params)?;

    println!("m1 = {}, N = {}, v = {}", cert.m1, cert.n, cert.v.to_digit_string());
    for s in &cert.steps {
        println!(
            "i = {}  m = {:<4} N = {:<4} sigma = {:+}  p/q = {}/{}",
            s.i, s.m, s.n, s.sigma, s.p, s.q
        );
    }

    let report = verify_all(&cert, &VerifyOptions::default());
    println!("verification: {}", if report.passed() { "pass" } else { "FAIL" });
    Ok(())
}
