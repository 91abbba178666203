use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Exponents up to this size are materialized when a plain rational is needed.
pub const MATERIALIZE_LIMIT: u64 = 1 << 24;

/// `mantissa · base^exp` with a non-zero rational mantissa.
///
/// Comparison decides by floor-log dominance first and only cross-multiplies
/// when both sides have the same order of magnitude, so quantities like
/// `3^(10^6)` are never materialized.
#[derive(Clone, Debug)]
pub struct ExpForm {
    base: u32,
    mantissa: BigRational,
    exp: BigInt,
}

impl ExpForm {
    pub fn new(base: u32, mantissa: BigRational, exp: impl Into<BigInt>) -> Self {
        assert!(base >= 2, "ExpForm base must be at least 2");
        assert!(!mantissa.is_zero(), "ExpForm mantissa must be non-zero");
        ExpForm {
            base,
            mantissa,
            exp: exp.into(),
        }
    }

    pub fn one(base: u32) -> Self {
        Self::new(base, BigRational::one(), 0)
    }

    /// `base^exp`.
    pub fn power_of_base(base: u32, exp: impl Into<BigInt>) -> Self {
        Self::new(base, BigRational::one(), exp)
    }

    pub fn from_integer(base: u32, n: impl Into<BigInt>) -> Self {
        Self::new(base, BigRational::from_integer(n.into()), 0)
    }

    pub fn from_rational(base: u32, r: BigRational) -> Self {
        Self::new(base, r, 0)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn mantissa(&self) -> &BigRational {
        &self.mantissa
    }

    pub fn exp(&self) -> &BigInt {
        &self.exp
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    /// `floor(log_base |value|)`.
    pub fn floor_log(&self) -> BigInt {
        &self.exp + floor_log_ratio(self.base, self.mantissa.numer(), self.mantissa.denom())
    }

    /// Equivalent form with `1 <= |mantissa| < base`.
    pub fn canonical(&self) -> Self {
        let k = floor_log_ratio(self.base, self.mantissa.numer(), self.mantissa.denom());
        ExpForm {
            base: self.base,
            mantissa: scale_by_base(&self.mantissa, self.base, -k),
            exp: &self.exp + k,
        }
    }

    pub fn mul(&self, other: &ExpForm) -> ExpForm {
        assert_eq!(self.base, other.base, "ExpForm base mismatch");
        ExpForm {
            base: self.base,
            mantissa: &self.mantissa * &other.mantissa,
            exp: &self.exp + &other.exp,
        }
    }

    pub fn recip(&self) -> ExpForm {
        ExpForm {
            base: self.base,
            mantissa: self.mantissa.recip(),
            exp: -&self.exp,
        }
    }

    pub fn pow(&self, k: i64) -> ExpForm {
        let mantissa = if k >= 0 {
            Pow::pow(&self.mantissa, k.unsigned_abs())
        } else {
            Pow::pow(&self.mantissa.recip(), k.unsigned_abs())
        };
        ExpForm {
            base: self.base,
            mantissa,
            exp: &self.exp * k,
        }
    }

    pub fn abs(&self) -> ExpForm {
        ExpForm {
            base: self.base,
            mantissa: self.mantissa.abs(),
            exp: self.exp.clone(),
        }
    }

    /// Multiplies by `base^k`.
    pub fn shift(&self, k: impl Into<BigInt>) -> ExpForm {
        ExpForm {
            base: self.base,
            mantissa: self.mantissa.clone(),
            exp: &self.exp + k.into(),
        }
    }

    /// The exact rational value, if the exponent is at most `limit` in size.
    pub fn to_rational_within(&self, limit: u64) -> Option<BigRational> {
        let e = self.exp.to_i64()?;
        if e.unsigned_abs() > limit {
            return None;
        }
        let r = scale_by_base(&self.mantissa, self.base, e);
        Some(BigRational::new(r.numer().clone(), r.denom().clone()))
    }

    /// Materializes the value, after canonicalizing so that the exponent is
    /// the order of magnitude of the value.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.to_rational_within(MATERIALIZE_LIMIT)
            .or_else(|| self.canonical().to_rational_within(MATERIALIZE_LIMIT))
    }

    /// The value as an integer, if it is one and of materializable size.
    pub fn to_integer(&self) -> Option<BigInt> {
        let r = self.to_rational()?;
        r.is_integer().then(|| r.to_integer())
    }
}

/// `r · base^k` for a small signed `k`.
fn scale_by_base(r: &BigRational, base: u32, k: i64) -> BigRational {
    let p = BigInt::from(Pow::pow(&BigUint::from(base), k.unsigned_abs()));
    // unreduced on purpose: a gcd of two huge operands dominates otherwise
    if k >= 0 {
        BigRational::new_raw(r.numer() * p, r.denom().clone())
    } else {
        BigRational::new_raw(r.numer().clone(), r.denom() * p)
    }
}

fn log2_estimate(n: &BigUint) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.log2() + shift as f64
}

/// Exact `floor(log_base |n/d|)` for non-zero `n`. A floating estimate picks
/// the starting point; exact comparisons settle the answer.
pub fn floor_log_ratio(base: u32, n: &BigInt, d: &BigInt) -> i64 {
    assert!(!n.is_zero(), "floor_log of zero");
    let n = n.magnitude();
    let d = d.magnitude();
    let est = (log2_estimate(n) - log2_estimate(d)) / f64::from(base).log2();
    let mut k = est.floor() as i64;
    let bb = BigUint::from(base);
    // value >= base^k  <=>  n >= d·base^k (k >= 0)  or  n·base^-k >= d (k < 0)
    let at_least = |k: i64| -> bool {
        let p = Pow::pow(&bb, k.unsigned_abs());
        if k >= 0 {
            *n >= d * p
        } else {
            n * p >= *d
        }
    };
    while !at_least(k) {
        k -= 1;
    }
    while at_least(k + 1) {
        k += 1;
    }
    k
}

fn cmp_magnitudes(x: &ExpForm, y: &ExpForm) -> Ordering {
    let kx = floor_log_ratio(x.base, x.mantissa.numer(), x.mantissa.denom());
    let ky = floor_log_ratio(y.base, y.mantissa.numer(), y.mantissa.denom());
    let lx = &x.exp + kx;
    let ly = &y.exp + ky;
    match lx.cmp(&ly) {
        Ordering::Equal => {}
        other => return other,
    }
    // Same order of magnitude: compare |mx|/b^kx with |my|/b^ky, i.e.
    // |mx|·b^(ky−k0) with |my|·b^(kx−k0).
    let k0 = kx.min(ky);
    let lhs = scale_by_base(&x.mantissa.abs(), x.base, ky - k0);
    let rhs = scale_by_base(&y.mantissa.abs(), y.base, kx - k0);
    lhs.cmp(&rhs)
}

/// Exact trichotomy of two values in the same base.
pub fn compare_expforms(x: &ExpForm, y: &ExpForm) -> Ordering {
    assert_eq!(x.base, y.base, "ExpForm base mismatch");
    let sx = x.mantissa.numer().sign();
    let sy = y.mantissa.numer().sign();
    match (sx, sy) {
        (Sign::Plus, Sign::Minus) => Ordering::Greater,
        (Sign::Minus, Sign::Plus) => Ordering::Less,
        (Sign::Minus, Sign::Minus) => cmp_magnitudes(y, x),
        _ => cmp_magnitudes(x, y),
    }
}

impl PartialEq for ExpForm {
    fn eq(&self, other: &Self) -> bool {
        compare_expforms(self, other) == Ordering::Equal
    }
}

impl Eq for ExpForm {}

impl PartialOrd for ExpForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExpForm {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_expforms(self, other)
    }
}

/// Exponent text, shortened when it has more than 40 digits.
fn short_exp(e: &BigInt) -> String {
    let s = e.to_string();
    let digits = s.trim_start_matches('-').len();
    if digits <= 40 {
        s
    } else {
        let sign = if e.is_negative() { "-" } else { "" };
        let mag = s.trim_start_matches('-');
        format!("{sign}({}…{}, {digits} digits)", &mag[..12], &mag[mag.len() - 6..])
    }
}

impl fmt::Display for ExpForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mantissa.numer().bits() + self.mantissa.denom().bits() > 120 {
            let c = self.canonical();
            let approx = c.mantissa.to_f64().unwrap_or(f64::NAN);
            write!(f, "≈{approx:.6}·{}^{}", self.base, short_exp(&c.exp))
        } else {
            write!(f, "{}·{}^{}", self.mantissa, self.base, short_exp(&self.exp))
        }
    }
}
