//! Certificates are canonical JSON; a `.gz` path is compressed transparently.
//!
//!     cargo run --example certificate_io

use cantor_convergents::build::{run, ConstructionParams, Mode, DEFAULT_MAX_BITS};
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::{Certificate, Psi};

fn main() -> anyhow::Result<()> {
    let pair = DigitPair::new(3, &[0, 2], None)?;
    let params = ConstructionParams::new(pair, Psi::parse("1")?, ratio(1, 1), Mode::Strict, 2, DEFAULT_MAX_BITS)?;
    let cert = run(params)?;

    let dir = std::env::temp_dir();
    let plain = dir.join("middle_third.json");
    let packed = dir.join("middle_third.json.gz");
    cert.write_to(&plain)?;
    cert.write_to(&packed)?;
    println!("{}: {} bytes", plain.display(), std::fs::metadata(&plain)?.len());
    println!("{}: {} bytes", packed.display(), std::fs::metadata(&packed)?.len());

    let back = Certificate::read_from(&packed)?;
    println!("round trip identical: {}", back.to_json() == cert.to_json());
    Ok(())
}
