//! The middle-third Cantor set (base 3, digits {0,2}) in strict mode: the
//! second convergent already has a 25,028-digit denominator.
//!
//!     cargo run --release --example middle_third

use std::time::Instant;

use cantor_convergents::build::{run, ConstructionParams, Mode, DEFAULT_MAX_BITS};
use cantor_convergents::verify::abbreviate;
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::{verify_all, Psi, Status, VerifyOptions};

fn main() -> anyhow::Result<()> {
    let pair = DigitPair::new(3, &[0, 2], None)?;
    let params = ConstructionParams::new(pair, Psi::parse("1")?, ratio(1, 1), Mode::Strict, 3, DEFAULT_MAX_BITS)?;

    let started = Instant::now();
    let cert = run(params)?;
    println!("constructed in {:.2?}", started.elapsed());
    for s in &cert.steps {
        println!("i = {}  m = {}  N = {}  q = {}", s.i, s.m, s.n, abbreviate(&s.q));
    }
    if let Status::BudgetExhausted { depth } = cert.status {
        println!("step {depth} would exceed {} bits", cert.max_bits);
    }

    let started = Instant::now();
    let report = verify_all(&cert, &VerifyOptions::default());
    println!(
        "verified in {:.2?}: {}",
        started.elapsed(),
        if report.passed() { "pass" } else { "FAIL" }
    );
    for r in report.failures() {
        println!("  {} {:?}: {}", r.check, r.scope, r.witness);
    }
    Ok(())
}
