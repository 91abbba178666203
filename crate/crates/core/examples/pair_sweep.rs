//! How deep the construction gets for every digit pair of small bases under
//! a fixed bit budget.
//!
//!     cargo run --release --example pair_sweep [max_base]

use cantor_convergents::build::{run, ConstructionParams, Mode};
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::{Psi, Status};

fn main() -> anyhow::Result<()> {
    let max_base: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5);
    for b in 3..=max_base {
        for d1 in 0..b as u8 {
            for d2 in d1 + 1..b as u8 {
                let pair = DigitPair::new(b, &[d1, d2], None)?;
                let params = ConstructionParams::new(pair, Psi::parse("1")?, ratio(1, 1), Mode::Relaxed, 3, 200_000)?;
                let cert = run(params)?;
                let note = match cert.status {
                    Status::Complete => String::new(),
                    Status::BudgetExhausted { .. } => format!("  (stopped: {})", cert.status),
                };
                let bits: Vec<u64> = cert.steps.iter().map(|s| s.q.bits()).collect();
                println!("b = {b} ({d1},{d2}): depth {}, q bits {bits:?}{note}", cert.steps.len());
            }
        }
    }
    Ok(())
}
