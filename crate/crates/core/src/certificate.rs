//! Certificate model and its JSON form.
//!
//! Big integers are decimal strings, `m_i` and `N_i` are JSON numbers, and
//! words after the first are stored as `{base_word, power, flip}` referring to
//! an earlier step. Files ending in `.gz` are gzip-compressed.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::build::{ConstructionStep, Mode};
use crate::psi::Psi;
use crate::words::{DigitPair, DigitWord};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("malformed certificate JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid certificate field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn field_err(field: impl Into<String>, msg: impl fmt::Display) -> CertError {
    CertError::Field {
        field: field.into(),
        msg: msg.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Step `depth` could not be produced within the bit budget.
    BudgetExhausted {
        depth: usize,
    },
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Complete => f.write_str("complete"),
            Status::BudgetExhausted { depth } => write!(f, "budget-exhausted({depth})"),
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "complete" {
            return Ok(Status::Complete);
        }
        s.strip_prefix("budget-exhausted(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|d| d.parse().ok())
            .map(|depth| Status::BudgetExhausted { depth })
            .ok_or_else(|| format!("expected `complete` or `budget-exhausted(<depth>)`, got {s:?}"))
    }
}

/// Everything needed to re-check a construction without re-running it.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub version: u32,
    pub pair: DigitPair,
    pub mode: Mode,
    pub psi: Psi,
    pub epsilon: BigRational,
    pub max_depth: usize,
    pub max_bits: u64,
    pub m1: u64,
    pub n: u64,
    pub u: u64,
    pub u1: u64,
    pub u2: u64,
    pub q0: BigUint,
    pub v: DigitWord,
    pub c1: BigUint,
    pub status: Status,
    pub steps: Vec<ConstructionStep>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    version: u32,
    b: u32,
    digits: Vec<u8>,
    pair: [u8; 2],
    mode: Mode,
    psi: String,
    epsilon: String,
    max_depth: usize,
    max_bits: u64,
    m1: u64,
    #[serde(rename = "N")]
    n: u64,
    u: u64,
    u1: u64,
    u2: u64,
    q0: String,
    v: String,
    c1: String,
    status: String,
    steps: Vec<StepDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    i: usize,
    m: u64,
    #[serde(rename = "N")]
    n: u64,
    sigma: i8,
    p: String,
    q: String,
    word: WordDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum WordDoc {
    Literal(String),
    Chain { base_word: usize, power: u64, flip: bool },
}

fn parse_uint(field: &str, s: &str) -> Result<BigUint, CertError> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return Err(field_err(
            field,
            format!("expected a canonical decimal integer, got {s:?}"),
        ));
    }
    s.parse().map_err(|e| field_err(field, e))
}

fn parse_positive(field: &str, s: &str) -> Result<BigUint, CertError> {
    let v = parse_uint(field, s)?;
    if num_traits::Zero::is_zero(&v) {
        return Err(field_err(field, "must be positive"));
    }
    Ok(v)
}

/// Parses `a/b` or a plain integer; the result must be positive and written
/// in lowest terms so that it re-serializes identically.
pub fn parse_epsilon(s: &str) -> Result<BigRational, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if !d.is_positive() || !n.is_positive() {
        return Err(format!("epsilon must be a positive fraction, got {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_epsilon(e: &BigRational) -> String {
    format!("{}/{}", e.numer(), e.denom())
}

impl Certificate {
    fn to_doc(&self) -> CertificateDoc {
        let steps = self
            .steps
            .iter()
            .map(|s| StepDoc {
                i: s.i,
                m: s.m,
                n: s.n,
                sigma: s.sigma,
                p: s.p.to_string(),
                q: s.q.to_string(),
                word: match s.word.parts() {
                    Some((_, power, flip)) => WordDoc::Chain {
                        base_word: s.i - 1,
                        power,
                        flip,
                    },
                    None => WordDoc::Literal(s.word.to_digit_string()),
                },
            })
            .collect();
        CertificateDoc {
            version: self.version,
            b: self.pair.base(),
            digits: self.pair.digits().to_vec(),
            pair: [self.pair.d1(), self.pair.d2()],
            mode: self.mode,
            psi: self.psi.source().to_string(),
            epsilon: format_epsilon(&self.epsilon),
            max_depth: self.max_depth,
            max_bits: self.max_bits,
            m1: self.m1,
            n: self.n,
            u: self.u,
            u1: self.u1,
            u2: self.u2,
            q0: self.q0.to_string(),
            v: self.v.to_digit_string(),
            c1: self.c1.to_string(),
            status: self.status.to_string(),
            steps,
        }
    }

    fn from_doc(doc: CertificateDoc) -> Result<Self, CertError> {
        if doc.version != CERTIFICATE_VERSION {
            return Err(field_err("version", format!("unsupported version {}", doc.version)));
        }
        let pair =
            DigitPair::new(doc.b, &doc.digits, Some((doc.pair[0], doc.pair[1]))).map_err(|e| field_err("pair", e))?;
        let psi = Psi::parse(&doc.psi).map_err(|e| field_err("psi", e))?;
        let epsilon = parse_epsilon(&doc.epsilon).map_err(|e| field_err("epsilon", e))?;
        if format_epsilon(&epsilon) != doc.epsilon {
            return Err(field_err("epsilon", "must be written as a/b in lowest terms"));
        }
        let status: Status = doc.status.parse().map_err(|e| field_err("status", e))?;
        let v = DigitWord::from_digit_string(&doc.v).map_err(|e| field_err("v", e))?;
        if v.to_digit_string() != doc.v {
            return Err(field_err("v", "digit string is not in canonical lowercase form"));
        }

        let mut steps: Vec<ConstructionStep> = Vec::with_capacity(doc.steps.len());
        for (k, s) in doc.steps.into_iter().enumerate() {
            let at = |f: &str| format!("steps[{k}].{f}");
            let word = match &s.word {
                WordDoc::Literal(text) => {
                    let w = DigitWord::from_digit_string(text).map_err(|e| field_err(at("word"), e))?;
                    if w.to_digit_string() != *text {
                        return Err(field_err(at("word"), "digit string is not canonical"));
                    }
                    w
                }
                WordDoc::Chain { base_word, power, flip } => {
                    // must refer to the immediately preceding step
                    if *base_word == 0 || *base_word != k {
                        return Err(field_err(
                            at("word.base_word"),
                            format!("must reference step {k}, got {base_word}"),
                        ));
                    }
                    let base = steps[k - 1].word.clone();
                    DigitWord::composite(base, *power, *flip, &pair).map_err(|e| field_err(at("word"), e))?
                }
            };
            if s.sigma != 1 && s.sigma != -1 {
                return Err(field_err(at("sigma"), "must be +1 or -1"));
            }
            steps.push(ConstructionStep {
                i: s.i,
                m: s.m,
                n: s.n,
                sigma: s.sigma,
                p: parse_uint(&at("p"), &s.p)?,
                q: parse_positive(&at("q"), &s.q)?,
                word,
            });
        }
        if steps.is_empty() {
            return Err(field_err("steps", "at least one step is required"));
        }

        Ok(Certificate {
            version: doc.version,
            pair,
            mode: doc.mode,
            psi,
            epsilon,
            max_depth: doc.max_depth,
            max_bits: doc.max_bits,
            m1: doc.m1,
            n: doc.n,
            u: doc.u,
            u1: doc.u1,
            u2: doc.u2,
            q0: parse_positive("q0", &doc.q0)?,
            v,
            c1: parse_positive("c1", &doc.c1)?,
            status,
            steps,
        })
    }

    /// Pretty JSON with a trailing newline; deterministic byte-for-byte.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Parses the JSON form. Only syntax and shape are checked here; the
    /// mathematical claims are left to the verifier.
    pub fn from_json(text: &str) -> Result<Self, CertError> {
        let doc: CertificateDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CertError> {
        let io = |source| CertError::Io {
            path: path.display().to_string(),
            source,
        };
        let json = self.to_json();
        let file = std::fs::File::create(path).map_err(io)?;
        if path.extension().is_some_and(|e| e == "gz") {
            let mut enc = GzEncoder::new(file, Compression::default());
            enc.write_all(json.as_bytes()).map_err(io)?;
            enc.finish().map_err(io)?;
        } else {
            let mut file = file;
            file.write_all(json.as_bytes()).map_err(io)?;
        }
        Ok(())
    }

    /// Reads a certificate, transparently decompressing gzip input.
    pub fn read_from(path: &Path) -> Result<Self, CertError> {
        let io = |source| CertError::Io {
            path: path.display().to_string(),
            source,
        };
        let bytes = std::fs::read(path).map_err(io)?;
        let text = if bytes.starts_with(&[0x1f, 0x8b]) {
            let mut s = String::new();
            GzDecoder::new(&bytes[..]).read_to_string(&mut s).map_err(io)?;
            s
        } else {
            String::from_utf8(bytes).map_err(|e| io(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?
        };
        Self::from_json(&text)
    }
}
