//! Rational brackets of base-`b` logarithms.
//!
//! Quantities such as `q^{-q}` or `q^{-(1+ε)q}` can't be written down for
//! large `q`, but `log_b` of them can be bracketed by rationals to any width.
//! Brackets come from binary digits of `log_b y`, `y ∈ [1, b)`, obtained by
//! repeated squaring of a fixed-point interval that always contains `y^(2^j)/b^c`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::expform::{compare_expforms, floor_log_ratio, ExpForm};

/// Default bracket width is `2^-64`.
pub const DEFAULT_LOG_PRECISION: u32 = 64;
/// Refinement stops at width `2^-4096`.
pub const MAX_LOG_PRECISION: u32 = 4096;

/// A positive quantity whose base-`b` logarithm can be bracketed.
#[derive(Clone, Debug)]
pub enum Quantity {
    Exp(ExpForm),
    /// `base^exponent` for a positive integer base and rational exponent.
    Power {
        base: BigUint,
        exponent: BigRational,
    },
    Product(Vec<Quantity>),
}

impl Quantity {
    pub fn power(base: impl Into<BigUint>, exponent: BigRational) -> Self {
        Quantity::Power {
            base: base.into(),
            exponent,
        }
    }
}

impl From<ExpForm> for Quantity {
    fn from(x: ExpForm) -> Self {
        Quantity::Exp(x)
    }
}

/// `lo <= log_b(x) <= hi`.
#[derive(Clone, Debug)]
pub struct LogBound {
    pub lo: BigRational,
    pub hi: BigRational,
    quantity: Quantity,
    base: u32,
    precision: u32,
}

impl LogBound {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// A new bracket of width at most `2^-precision`.
    pub fn refine(&self, precision: u32) -> LogBound {
        logbound_of(&self.quantity, self.base, precision)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo <= *x && *x <= self.hi
    }
}

/// Bracket of `log_b(x)` with width at most `2^-precision` (zero when the
/// logarithm is rational).
///
/// Panics if the quantity is not positive.
pub fn logbound_of(x: &Quantity, base: u32, precision: u32) -> LogBound {
    let (lo, hi) = bracket(x, base, precision);
    LogBound {
        lo,
        hi,
        quantity: x.clone(),
        base,
        precision,
    }
}

fn bracket(x: &Quantity, base: u32, precision: u32) -> (BigRational, BigRational) {
    match x {
        Quantity::Exp(e) => {
            assert!(e.is_positive(), "log of a non-positive quantity");
            assert_eq!(e.base(), base, "ExpForm base mismatch");
            let (lo, hi) = log_of_ratio(base, e.mantissa(), precision);
            let t = BigRational::from_integer(e.exp().clone());
            (lo + &t, hi + t)
        }
        Quantity::Power { base: q, exponent } => {
            assert!(!q.is_zero(), "log of zero");
            let extra = exponent.numer().bits() as u32 + 1;
            let r = BigRational::from_integer(BigInt::from(q.clone()));
            let (lo, hi) = log_of_ratio(base, &r, precision.saturating_add(extra));
            if exponent.is_negative() {
                (exponent * hi, exponent * lo)
            } else {
                (exponent * lo, exponent * hi)
            }
        }
        Quantity::Product(parts) => {
            let extra = usize::BITS - parts.len().leading_zeros();
            parts
                .iter()
                .fold((BigRational::zero(), BigRational::zero()), |(lo, hi), part| {
                    let (l, h) = bracket(part, base, precision.saturating_add(extra));
                    (lo + l, hi + h)
                })
        }
    }
}

/// Smallest `g` with `base = g^t`, and `t`.
fn primitive_root(base: u32) -> (u32, u32) {
    for g in 2..=base {
        let mut p = g;
        let mut t = 1;
        while p < base {
            p *= g;
            t += 1;
        }
        if p == base {
            return (g, t);
        }
    }
    (base, 1)
}

/// `s` with `n = g^s`, if any.
fn exact_power_of(n: &BigUint, g: u32) -> Option<u64> {
    let mut n = n.clone();
    let mut s = 0;
    let g = BigUint::from(g);
    while !n.is_one() {
        let (q, r) = n.div_rem(&g);
        if !r.is_zero() || q.is_zero() {
            return None;
        }
        n = q;
        s += 1;
    }
    Some(s)
}

/// `log_base(r)` when it is rational; that happens exactly when numerator and
/// denominator are powers of the primitive root of `base`.
fn exact_log(base: u32, r: &BigRational) -> Option<BigRational> {
    let (g, t) = primitive_root(base);
    let sn = exact_power_of(r.numer().magnitude(), g)?;
    let sd = exact_power_of(r.denom().magnitude(), g)?;
    Some(BigRational::new(BigInt::from(sn) - BigInt::from(sd), BigInt::from(t)))
}

fn log_of_ratio(base: u32, r: &BigRational, precision: u32) -> (BigRational, BigRational) {
    assert!(r.is_positive(), "log of a non-positive quantity");
    if let Some(exact) = exact_log(base, r) {
        return (exact.clone(), exact);
    }
    let f = floor_log_ratio(base, r.numer(), r.denom());
    let (c, bits) = fractional_log_bits(base, r, f, precision);
    let scale = BigInt::one() << bits;
    let fi = BigRational::from_integer(BigInt::from(f));
    let lo = &fi + BigRational::new(c.clone(), scale.clone());
    let hi = fi + BigRational::new(c + 1, scale);
    (lo, hi)
}

/// Binary digits of `log_b(y)` for `y = r / b^f ∈ [1, b)`: returns `(c, j)` with
/// `log_b y ∈ [c/2^j, (c+1)/2^j]`. `j` equals `precision` unless the fixed-point
/// interval straddles a digit boundary at every working precision tried.
fn fractional_log_bits(base: u32, r: &BigRational, f: i64, precision: u32) -> (BigInt, u32) {
    let guard = 2 * (32 - base.leading_zeros()) + 32;
    let mut working = precision + guard;
    let mut best = (BigInt::zero(), 0u32);
    for _ in 0..4 {
        let (c, j) = squaring_digits(base, r, f, precision, working);
        if j == precision {
            return (c, j);
        }
        if j > best.1 {
            best = (c, j);
        }
        working = working.saturating_mul(2);
    }
    best
}

fn squaring_digits(base: u32, r: &BigRational, f: i64, precision: u32, p: u32) -> (BigInt, u32) {
    let bb = BigUint::from(base);
    let bf = Pow::pow(&bb, f.unsigned_abs());
    let (mut num, mut den) = (r.numer().magnitude().clone(), r.denom().magnitude().clone());
    if f >= 0 {
        den *= bf;
    } else {
        num *= bf;
    }
    num <<= p;
    let (mut lo, rem) = num.div_rem(&den);
    let mut hi = if rem.is_zero() { lo.clone() } else { &lo + 1u32 };
    let one_p = BigUint::one() << p;
    let threshold = &bb << p;
    let mut c = BigInt::zero();
    for j in 1..=precision {
        lo = (&lo * &lo) >> p;
        hi = (&hi * &hi + &one_p - 1u32) >> p;
        c <<= 1;
        if lo >= threshold {
            c += 1;
            lo /= &bb;
            hi = hi.div_ceil(&bb);
        } else if hi >= threshold {
            return (c >> 1, j - 1);
        }
    }
    (c, precision)
}

/// Outcome of a log-bracket comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogOrdering {
    Less,
    Equal,
    Greater,
    /// Brackets still overlap at the maximum precision.
    Indistinguishable,
}

impl From<Ordering> for LogOrdering {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => LogOrdering::Less,
            Ordering::Equal => LogOrdering::Equal,
            Ordering::Greater => LogOrdering::Greater,
        }
    }
}

/// Orders two positive quantities by refining log brackets until they separate.
/// Two `ExpForm`s are compared exactly; equality is otherwise only reported
/// when both logarithms are exact and equal.
pub fn compare_via_logs(x: &Quantity, y: &Quantity, base: u32, max_precision: u32) -> LogOrdering {
    if let (Quantity::Exp(a), Quantity::Exp(b)) = (x, y) {
        return compare_expforms(a, b).into();
    }
    let mut precision = DEFAULT_LOG_PRECISION.min(max_precision);
    loop {
        let bx = logbound_of(x, base, precision);
        let by = logbound_of(y, base, precision);
        if bx.hi < by.lo {
            return LogOrdering::Less;
        }
        if bx.lo > by.hi {
            return LogOrdering::Greater;
        }
        if bx.is_exact() && by.is_exact() && bx.lo == by.lo {
            return LogOrdering::Equal;
        }
        if precision >= max_precision {
            return LogOrdering::Indistinguishable;
        }
        precision = precision.saturating_mul(2).min(max_precision);
    }
}

/// Bracket midpoint as a float, for diagnostics only.
pub fn approx_log(bound: &LogBound) -> f64 {
    let mid = (&bound.lo + &bound.hi) / BigRational::from_integer(BigInt::from(2));
    mid.to_f64().unwrap_or(f64::NAN)
}
