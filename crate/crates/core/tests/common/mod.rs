#![allow(dead_code)]

use cantor_convergents::build::{run, ConstructionParams, Mode, DEFAULT_MAX_BITS};
use cantor_convergents::verify::{verify_all, VerifyOptions};
use cantor_convergents::words::{ratio, DigitPair};
use cantor_convergents::{Certificate, Psi};
use num_bigint::BigUint;
use serde_json::Value;

pub const GOLDEN_A_P3: &str = "3884697838988604469";
pub const GOLDEN_A_Q3: &str = "8416845317808643016";

pub fn params(b: u32, digits: &[u8], psi: &str, mode: Mode, depth: usize, max_bits: u64) -> ConstructionParams {
    ConstructionParams::new(
        DigitPair::new(b, digits, None).unwrap(),
        Psi::parse(psi).unwrap(),
        ratio(1, 1),
        mode,
        depth,
        max_bits,
    )
    .unwrap()
}

/// b = 3, D = {0,1}, Ψ = 1, relaxed, depth 3.
pub fn golden_a() -> Certificate {
    run(params(3, &[0, 1], "1", Mode::Relaxed, 3, DEFAULT_MAX_BITS)).unwrap()
}

/// b = 3, D = {0,2}, Ψ = 1, strict, depth 2.
pub fn golden_b() -> Certificate {
    run(params(3, &[0, 2], "1", Mode::Strict, 2, DEFAULT_MAX_BITS)).unwrap()
}

pub fn frozen(name: &str) -> BigUint {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap().trim().parse().unwrap()
}

const PARAM_FIELDS: [&str; 8] = ["b", "digits", "pair", "mode", "psi", "epsilon", "max_depth", "max_bits"];

#[derive(Debug)]
pub struct Mutation {
    pub pointer: String,
    pub value: Value,
}

fn bump_decimal(s: &str, up: bool) -> Option<String> {
    let n: BigUint = s.parse().ok()?;
    if up {
        Some((n + 1u32).to_string())
    } else if n > BigUint::from(0u32) {
        Some((n - 1u32).to_string())
    } else {
        None
    }
}

fn leaf_mutations(pointer: &str, v: &Value, out: &mut Vec<Mutation>) {
    let mut push = |value: Value| {
        out.push(Mutation {
            pointer: pointer.to_string(),
            value,
        })
    };
    match v {
        Value::Bool(b) => push(Value::Bool(!b)),
        Value::Number(n) => {
            let n = n.as_i64().expect("integer field");
            push(Value::from(n + 1));
            push(Value::from(n - 1));
            if pointer.ends_with("/sigma") {
                push(Value::from(-n));
            }
        }
        Value::String(s) => {
            let field = pointer.rsplit('/').next().unwrap();
            match field {
                "mode" => push(Value::from(if s == "strict" { "relaxed" } else { "strict" })),
                "psi" => {
                    push(Value::from(format!("{s}/2")));
                    push(Value::from("q^-2"));
                }
                "epsilon" => push(Value::from("2/1")),
                "status" => {
                    push(Value::from(if s == "complete" {
                        "budget-exhausted(4)"
                    } else {
                        "complete"
                    }));
                }
                _ => {
                    if let Some(up) = bump_decimal(s, true) {
                        push(Value::from(up));
                        if let Some(down) = bump_decimal(s, false) {
                            push(Value::from(down));
                        }
                    } else {
                        // digit words: append a digit, flip the first one
                        push(Value::from(format!("{s}0")));
                        if let Some(first) = s.chars().next() {
                            let other = if first == '0' { '1' } else { '0' };
                            push(Value::from(format!("{other}{}", &s[1..])));
                        }
                    }
                }
            }
        }
        Value::Array(items) => {
            for (k, item) in items.iter().enumerate() {
                leaf_mutations(&format!("{pointer}/{k}"), item, out);
            }
        }
        Value::Object(map) => {
            for (key, item) in map {
                leaf_mutations(&format!("{pointer}/{key}"), item, out);
            }
        }
        Value::Null => {}
    }
}

/// One nearby value for every leaf of the certificate document.
pub fn mutations(cert: &Certificate) -> Vec<Mutation> {
    let doc: Value = serde_json::from_str(&cert.to_json()).unwrap();
    let mut out = Vec::new();
    leaf_mutations("", &doc, &mut out);
    out
}

#[derive(Debug, PartialEq, Eq)]
pub enum TamperOutcome {
    /// Rejected at parse time.
    ParseError,
    /// Verification failed.
    Detected,
    /// The mutation produced exactly the certificate the construction gives
    /// for the mutated parameters, and it verifies.
    GenuineAccepted,
    /// Verification passed on a certificate that is not genuine.
    Missed,
    /// A genuine certificate was rejected.
    FalseAlarm,
}

pub fn apply(cert: &Certificate, m: &Mutation) -> String {
    let mut doc: Value = serde_json::from_str(&cert.to_json()).unwrap();
    *doc.pointer_mut(&m.pointer).unwrap() = m.value.clone();
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

pub fn tamper(cert: &Certificate, m: &Mutation) -> TamperOutcome {
    let text = apply(cert, m);
    let Ok(mutated) = Certificate::from_json(&text) else {
        return TamperOutcome::ParseError;
    };
    let top = m.pointer.split('/').nth(1).unwrap_or("");
    let genuine = PARAM_FIELDS.contains(&top)
        && ConstructionParams::new(
            mutated.pair.clone(),
            mutated.psi.clone(),
            mutated.epsilon.clone(),
            mutated.mode,
            mutated.max_depth,
            mutated.max_bits,
        )
        .ok()
        .and_then(|p| run(p).ok())
        .is_some_and(|c| c.to_json() == mutated.to_json());
    let passed = verify_all(&mutated, &VerifyOptions::default()).passed();
    match (genuine, passed) {
        (true, true) => TamperOutcome::GenuineAccepted,
        (true, false) => TamperOutcome::FalseAlarm,
        (false, true) => TamperOutcome::Missed,
        (false, false) => TamperOutcome::Detected,
    }
}
