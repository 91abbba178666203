//! The verifier recomputes everything from the parameters, so editing any
//! field of a certificate is caught.
//!
//!     cargo run --example tamper_detection

use cantor_convergents::build::{run, ConstructionParams, Mode, DEFAULT_MAX_BITS};
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::{verify_all, Certificate, Psi, VerifyOptions};
use serde_json::{json, Value};

fn main() -> anyhow::Result<()> {
    let pair = DigitPair::new(3, &[0, 1], None)?;
    let params = ConstructionParams::new(pair, Psi::parse("1")?, ratio(1, 1), Mode::Relaxed, 3, DEFAULT_MAX_BITS)?;
    let genuine = run(params)?.to_json();

    let edits: [(&str, Value); 4] = [
        ("/steps/1/m", json!(5)),
        ("/steps/2/q", json!("8416845317808643017")),
        ("/steps/0/sigma", json!(1)),
        ("/q0", json!("10")),
    ];
    for (pointer, value) in edits {
        let mut doc: Value = serde_json::from_str(&genuine)?;
        *doc.pointer_mut(pointer).expect("field exists") = value.clone();
        let tampered = match Certificate::from_json(&doc.to_string()) {
            Ok(c) => c,
            Err(e) => {
                println!("{pointer} = {value}: rejected while parsing ({e})");
                continue;
            }
        };
        let report = verify_all(&tampered, &VerifyOptions::default());
        let failed: Vec<String> = report
            .failures()
            .map(|r| format!("{} {:?}", r.check, r.scope))
            .collect();
        println!("{pointer} = {value}: failing checks {failed:?}");
    }
    Ok(())
}
