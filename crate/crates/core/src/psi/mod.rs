//! The gap function Ψ: a small expression language, its exact evaluation,
//! and the comparison engine for quantities too large to materialize.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr := term ('*' term)*
//! term := atom ['^' ['-'] INT]
//! atom := INT ['/' INT] | 'q' | 'min(' expr ',' expr ')' | 'expb(-' expr ')' | '(' expr ')'
//! ```
//!
//! `expb(-e)` denotes `b^(-e)` for the construction base `b`.

mod expform;
mod logbound;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use expform::{compare_expforms, floor_log_ratio, ExpForm, MATERIALIZE_LIMIT};
pub use logbound::{
    approx_log, compare_via_logs, logbound_of, LogBound, LogOrdering, Quantity, DEFAULT_LOG_PRECISION,
    MAX_LOG_PRECISION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsiError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent at position {pos} does not fit a machine integer")]
    ExponentOverflow { pos: usize },
    #[error("Ψ is not a valid gap function at q = {q}: {why}")]
    Range { q: String, why: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsiExpr {
    Const(BigRational),
    Q,
    Mul(Box<PsiExpr>, Box<PsiExpr>),
    Pow(Box<PsiExpr>, i64),
    Min(Box<PsiExpr>, Box<PsiExpr>),
    /// `b^(-e)`
    ExpB(Box<PsiExpr>),
}

impl fmt::Display for PsiExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiExpr::Const(r) => write!(f, "{r}"),
            PsiExpr::Q => f.write_str("q"),
            PsiExpr::Mul(a, b) => write!(f, "{a} * {b}"),
            PsiExpr::Pow(a, k) => match **a {
                PsiExpr::Const(_) | PsiExpr::Q | PsiExpr::Min(..) | PsiExpr::ExpB(_) => {
                    write!(f, "{a}^{k}")
                }
                _ => write!(f, "({a})^{k}"),
            },
            PsiExpr::Min(a, b) => write!(f, "min({a}, {b})"),
            PsiExpr::ExpB(a) => write!(f, "expb(-{a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PsiError> {
        Err(PsiError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<(), PsiError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let hit = rest.starts_with(word.as_bytes())
            && !rest
                .get(word.len())
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
        if hit {
            self.pos += word.len();
        }
        hit
    }

    fn integer(&mut self) -> Result<BigInt, PsiError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0");
        Ok(text.parse().unwrap_or_default())
    }

    fn expr(&mut self) -> Result<PsiExpr, PsiError> {
        let mut lhs = self.term()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = PsiExpr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<PsiExpr, PsiError> {
        let atom = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(atom);
        }
        self.pos += 1;
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        let at = self.pos;
        let k = self.integer()?;
        let k = if negative { -k } else { k };
        let k = i64::try_from(k).map_err(|_| PsiError::ExponentOverflow { pos: at })?;
        Ok(PsiExpr::Pow(Box::new(atom), k))
    }

    fn atom(&mut self) -> Result<PsiExpr, PsiError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let d = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.integer()?
                } else {
                    BigInt::one()
                };
                if d.is_zero() {
                    return self.err("zero denominator");
                }
                Ok(PsiExpr::Const(BigRational::new(n, d)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(_) if self.keyword("min") => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(PsiExpr::Min(Box::new(a), Box::new(b)))
            }
            Some(_) if self.keyword("expb") => {
                self.expect(b'(')?;
                self.expect(b'-')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(PsiExpr::ExpB(Box::new(e)))
            }
            Some(_) if self.keyword("q") => Ok(PsiExpr::Q),
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_psi(text: &str) -> Result<PsiExpr, PsiError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn range_error(q: &BigUint, why: impl Into<String>) -> PsiError {
    let mut s = q.to_string();
    if s.len() > 30 {
        s = format!("{}…({} digits)", &s[..12], s.len());
    }
    PsiError::Range { q: s, why: why.into() }
}

fn eval_raw(e: &PsiExpr, q: &BigUint, b: u32) -> Result<Option<ExpForm>, PsiError> {
    // None stands for the value zero, which ExpForm cannot hold.
    Ok(match e {
        PsiExpr::Const(r) if r.is_zero() => None,
        PsiExpr::Const(r) => Some(ExpForm::from_rational(b, r.clone())),
        PsiExpr::Q => Some(ExpForm::from_integer(b, BigInt::from(q.clone()))),
        PsiExpr::Mul(x, y) => match (eval_raw(x, q, b)?, eval_raw(y, q, b)?) {
            (Some(x), Some(y)) => Some(x.mul(&y)),
            _ => None,
        },
        PsiExpr::Pow(x, k) => match eval_raw(x, q, b)? {
            Some(x) => Some(x.pow(*k)),
            None if *k > 0 => None,
            None => return Err(range_error(q, "zero raised to a non-positive power")),
        },
        PsiExpr::Min(x, y) => {
            let (x, y) = (eval_raw(x, q, b)?, eval_raw(y, q, b)?);
            match (x, y) {
                (Some(x), Some(y)) => Some(if compare_expforms(&x, &y) == Ordering::Greater {
                    y
                } else {
                    x
                }),
                (None, Some(y)) if y.is_positive() => None,
                (Some(x), None) if x.is_positive() => None,
                (None, None) => None,
                (Some(x), None) | (None, Some(x)) => Some(x),
            }
        }
        PsiExpr::ExpB(x) => {
            let t = match eval_raw(x, q, b)? {
                None => BigInt::zero(),
                Some(x) => x
                    .to_integer()
                    .ok_or_else(|| range_error(q, "expb argument is not a moderate integer"))?,
            };
            Some(ExpForm::power_of_base(b, -t))
        }
    })
}

/// Exact `Ψ(q)` in base `b`; fails unless the value lies in `(0, 1]`.
pub fn eval_psi(e: &PsiExpr, q: &BigUint, b: u32) -> Result<ExpForm, PsiError> {
    if q.is_zero() {
        return Err(range_error(q, "q must be positive"));
    }
    let v = eval_raw(e, q, b)?.ok_or_else(|| range_error(q, "value is 0"))?;
    if v.mantissa().is_negative() {
        return Err(range_error(q, "value is negative"));
    }
    if compare_expforms(&v, &ExpForm::one(b)) == Ordering::Greater {
        return Err(range_error(q, format!("value {v} exceeds 1")));
    }
    Ok(v)
}

/// A gap function together with its verbatim source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Psi {
    source: String,
    expr: PsiExpr,
}

impl Psi {
    pub fn parse(text: &str) -> Result<Self, PsiError> {
        Ok(Psi {
            source: text.to_string(),
            expr: parse_psi(text)?,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &PsiExpr {
        &self.expr
    }

    pub fn eval(&self, q: &BigUint, b: u32) -> Result<ExpForm, PsiError> {
        eval_psi(&self.expr, q, b)
    }
}
