//! Digit words over a two-letter alphabet and exact conversions between
//! eventually periodic base-`b` expansions and rationals.
//!
//! Words built by the construction grow as a tower (`|w_{i+1}| = (m_{i+1}+1)|w_i|`),
//! so [`DigitWord`] keeps them in compressed form: a literal leaf, or a
//! composite node meaning `base^power` followed by `base` with its last digit
//! optionally flipped. Values and individual digits are computed from the
//! structure without expanding it.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Library-wide default for digit budgets.
pub const DEFAULT_DIGIT_BUDGET: usize = 1_000_000;

/// Largest base whose digits have a one-character encoding.
pub const MAX_BASE: u32 = 36;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordsError {
    #[error("base {0} is not supported (need 3 <= b <= {MAX_BASE})")]
    InvalidBase(u32),
    #[error("invalid digit set: {0}")]
    InvalidDigitSet(String),
    #[error("digit {digit} is not valid in base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },
    #[error("digit {0} is not one of the two construction digits")]
    NotInPair(u8),
    #[error("operation needs a non-empty word")]
    EmptyWord,
    #[error("word length overflows u64")]
    LengthOverflow,
    #[error("rational {0} is outside [0, 1]")]
    OutOfUnitInterval(BigRational),
    #[error("expansion did not close within {0} digits")]
    BudgetExceeded(usize),
    #[error("invalid digit character {0:?}")]
    BadDigitChar(char),
}

/// The base, the user's digit set `D`, and the two digits `d1 < d2` used by
/// the construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitPair {
    b: u32,
    d1: u8,
    d2: u8,
    digits: Vec<u8>,
}

impl DigitPair {
    /// Validates `digits` as a proper subset of `{0,…,b−1}` with at least two
    /// elements and picks the pair: `pair` if given, otherwise `(0,1)` when
    /// both are present, otherwise the two smallest digits.
    pub fn new(b: u32, digits: &[u8], pair: Option<(u8, u8)>) -> Result<Self, WordsError> {
        if !(3..=MAX_BASE).contains(&b) {
            return Err(WordsError::InvalidBase(b));
        }
        let mut full: Vec<u8> = digits.to_vec();
        full.sort_unstable();
        full.dedup();
        if let Some(&d) = full.iter().find(|&&d| u32::from(d) >= b) {
            return Err(WordsError::DigitOutOfRange {
                digit: d.into(),
                base: b,
            });
        }
        if full.len() < 2 {
            return Err(WordsError::InvalidDigitSet("D needs at least two digits".into()));
        }
        if full.len() as u32 >= b {
            return Err(WordsError::InvalidDigitSet(format!(
                "D must miss at least one digit of base {b}"
            )));
        }
        let (d1, d2) = match pair {
            Some((x, y)) => {
                let (d1, d2) = (x.min(y), x.max(y));
                if d1 == d2 || !full.contains(&d1) || !full.contains(&d2) {
                    return Err(WordsError::InvalidDigitSet(format!(
                        "pair ({x},{y}) is not two distinct elements of D"
                    )));
                }
                (d1, d2)
            }
            None if full.contains(&0) && full.contains(&1) => (0, 1),
            None => (full[0], full[1]),
        };
        Ok(Self {
            b,
            d1,
            d2,
            digits: full,
        })
    }

    pub fn base(&self) -> u32 {
        self.b
    }

    pub fn d1(&self) -> u8 {
        self.d1
    }

    pub fn d2(&self) -> u8 {
        self.d2
    }

    /// The full digit set `D`, sorted.
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// `u = d2 − d1`.
    pub fn u(&self) -> u32 {
        u32::from(self.d2 - self.d1)
    }

    pub fn contains(&self, digit: u8) -> bool {
        self.digits.binary_search(&digit).is_ok()
    }

    /// The other element of the pair.
    pub fn flip(&self, digit: u8) -> Result<u8, WordsError> {
        if digit == self.d1 {
            Ok(self.d2)
        } else if digit == self.d2 {
            Ok(self.d1)
        } else {
            Err(WordsError::NotInPair(digit))
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Node {
    Literal(Vec<u8>),
    Composite {
        base: DigitWord,
        power: u64,
        flip: bool,
        len: u64,
        last: u8,
    },
}

/// A finite digit word, possibly in compressed power-and-flip form.
#[derive(Clone, PartialEq, Eq)]
pub struct DigitWord(Arc<Node>);

impl DigitWord {
    pub fn literal(digits: Vec<u8>) -> Self {
        DigitWord(Arc::new(Node::Literal(digits)))
    }

    pub fn empty() -> Self {
        Self::literal(Vec::new())
    }

    /// `base^power · base'`, where `base'` is `base` with its last digit
    /// flipped inside `pair` when `flip` is set (and `base` itself otherwise).
    pub fn composite(base: DigitWord, power: u64, flip: bool, pair: &DigitPair) -> Result<Self, WordsError> {
        let base_last = base.last_digit().ok_or(WordsError::EmptyWord)?;
        let len = power
            .checked_add(1)
            .and_then(|k| k.checked_mul(base.len()))
            .ok_or(WordsError::LengthOverflow)?;
        let last = if flip { pair.flip(base_last)? } else { base_last };
        Ok(DigitWord(Arc::new(Node::Composite {
            base,
            power,
            flip,
            len,
            last,
        })))
    }

    pub fn len(&self) -> u64 {
        match &*self.0 {
            Node::Literal(d) => d.len() as u64,
            Node::Composite { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last_digit(&self) -> Option<u8> {
        match &*self.0 {
            Node::Literal(d) => d.last().copied(),
            Node::Composite { last, .. } => Some(*last),
        }
    }

    /// Composite parts `(base, power, flip)`, or `None` for a literal.
    pub fn parts(&self) -> Option<(&DigitWord, u64, bool)> {
        match &*self.0 {
            Node::Literal(_) => None,
            Node::Composite { base, power, flip, .. } => Some((base, *power, *flip)),
        }
    }

    pub fn as_literal(&self) -> Option<&[u8]> {
        match &*self.0 {
            Node::Literal(d) => Some(d),
            Node::Composite { .. } => None,
        }
    }

    /// Digit at 0-based position `pos` (most significant first).
    pub fn digit_at(&self, pos: u64) -> Option<u8> {
        let mut node = self;
        let mut pos = pos;
        loop {
            match &*node.0 {
                Node::Literal(d) => return d.get(pos as usize).copied(),
                Node::Composite { base, len, last, .. } => {
                    if pos >= *len {
                        return None;
                    }
                    if pos == *len - 1 {
                        return Some(*last);
                    }
                    pos %= base.len();
                    node = base;
                }
            }
        }
    }

    /// Streams the digits without materializing the word.
    pub fn digits(&self) -> Digits<'_> {
        Digits {
            word: self,
            pos: 0,
            end: self.len(),
        }
    }

    /// The first `min(limit, |w|)` digits.
    pub fn expand_digits(&self, limit: usize) -> Vec<u8> {
        self.digits().take(limit).collect()
    }

    /// Expands the whole word; only sensible for short words.
    pub fn to_vec(&self) -> Vec<u8> {
        self.digits().collect()
    }

    /// The word with its last digit replaced by the other element of the pair.
    pub fn flip_last(&self, pair: &DigitPair) -> Result<DigitWord, WordsError> {
        match &*self.0 {
            Node::Literal(d) => {
                let mut d = d.clone();
                let last = d.last_mut().ok_or(WordsError::EmptyWord)?;
                *last = pair.flip(*last)?;
                Ok(DigitWord::literal(d))
            }
            Node::Composite { base, power, flip, .. } => DigitWord::composite(base.clone(), *power, !flip, pair),
        }
    }

    /// Positional value `Σ digit·b^position`, most significant digit first.
    /// Composite words use `(xy)_b = (x)_b·b^{|y|} + (y)_b` and the geometric
    /// sum for powers; digits are never expanded.
    pub fn value(&self, b: u32) -> BigUint {
        match &*self.0 {
            Node::Literal(d) => literal_value(d, b),
            Node::Composite { base, len, last, .. } => {
                let base_len = base.len();
                let base_value = base.value(b);
                let base_last = base.last_digit().unwrap_or(0);
                if base_len == 0 {
                    return BigUint::zero();
                }
                let bb = BigUint::from(b);
                // (b^{L(p+1)} − 1)/(b^L − 1) = 1 + b^L + … + b^{pL}
                let block = Pow::pow(&bb, base_len);
                let repeat = (Pow::pow(&bb, *len) - 1u32) / (block - 1u32);
                base_value * repeat + *last - base_last
            }
        }
    }

    /// Encodes the digits in base-36 characters.
    pub fn to_digit_string(&self) -> String {
        self.digits().map(digit_char).collect()
    }

    pub fn from_digit_string(s: &str) -> Result<Self, WordsError> {
        s.chars()
            .map(char_digit)
            .collect::<Result<Vec<_>, _>>()
            .map(DigitWord::literal)
    }

    pub fn to_record(&self) -> WordRecord {
        match &*self.0 {
            Node::Literal(_) => WordRecord::Literal(self.to_digit_string()),
            Node::Composite { base, power, flip, .. } => WordRecord::Composite {
                base: Box::new(base.to_record()),
                power: *power,
                flip: *flip,
            },
        }
    }

    pub fn from_record(record: &WordRecord, pair: &DigitPair) -> Result<Self, WordsError> {
        match record {
            WordRecord::Literal(s) => Self::from_digit_string(s),
            WordRecord::Composite { base, power, flip } => {
                DigitWord::composite(Self::from_record(base, pair)?, *power, *flip, pair)
            }
        }
    }
}

impl fmt::Debug for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitWord({self})")
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Literal(_) => f.write_str(&self.to_digit_string()),
            Node::Composite { base, power, flip, .. } => {
                write!(f, "({base})^{power}")?;
                if *flip {
                    write!(f, "({base})'")
                } else {
                    write!(f, "({base})")
                }
            }
        }
    }
}

/// Streaming digit iterator over a [`DigitWord`].
pub struct Digits<'a> {
    word: &'a DigitWord,
    pos: u64,
    end: u64,
}

impl Iterator for Digits<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        if self.pos >= self.end {
            return None;
        }
        let d = self.word.digit_at(self.pos);
        self.pos += 1;
        d
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = usize::try_from(self.end - self.pos).unwrap_or(usize::MAX);
        (rest, Some(rest))
    }
}

/// Serialized form of a word: a digit string or a `{base, power, flip}` record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordRecord {
    Literal(String),
    Composite {
        base: Box<WordRecord>,
        power: u64,
        flip: bool,
    },
}

pub fn digit_char(d: u8) -> char {
    char::from_digit(u32::from(d), MAX_BASE).unwrap_or('?')
}

pub fn char_digit(c: char) -> Result<u8, WordsError> {
    c.to_digit(MAX_BASE).map(|d| d as u8).ok_or(WordsError::BadDigitChar(c))
}

/// `(w)_b`; the empty word evaluates to 0.
pub fn word_value(w: &DigitWord, b: u32) -> BigUint {
    w.value(b)
}

/// Horner evaluation in machine-word chunks of `k` digits, `b^k < 2^64`.
fn literal_value(digits: &[u8], b: u32) -> BigUint {
    let b = u64::from(b);
    let mut k = 1;
    let mut scale = b;
    while scale <= u64::MAX / b {
        scale *= b;
        k += 1;
    }
    let mut acc = BigUint::zero();
    for chunk in digits.chunks(k) {
        let (mut block, mut place) = (0u64, 1u64);
        for &d in chunk {
            block = block * b + u64::from(d);
            place *= b;
        }
        acc = acc * place + block;
    }
    acc
}

/// `(0.v w̄)_b` as the unreduced fraction
/// `((v)_b·(b^{|w|} − 1) + (w)_b) / (b^{|v|}(b^{|w|} − 1))`.
pub fn periodic_to_fraction(v: &DigitWord, w: &DigitWord, b: u32) -> Result<(BigUint, BigUint), WordsError> {
    if w.is_empty() {
        return Err(WordsError::EmptyWord);
    }
    let bb = BigUint::from(b);
    let period_scale = Pow::pow(&bb, w.len()) - 1u32;
    let numer = v.value(b) * &period_scale + w.value(b);
    let denom = Pow::pow(&bb, v.len()) * period_scale;
    Ok((numer, denom))
}

/// The reduced rational `(0.v w̄)_b = ((vw)_b − (v)_b) / (b^{|v|}(b^{|w|} − 1))`.
pub fn periodic_to_rational(v: &DigitWord, w: &DigitWord, b: u32) -> Result<BigRational, WordsError> {
    let (numer, denom) = periodic_to_fraction(v, w, b)?;
    Ok(BigRational::new(numer.into(), denom.into()))
}

/// Eventually periodic expansion `0.v w̄` with literal digit sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicExpansion {
    pub preperiod: Vec<u8>,
    pub period: Vec<u8>,
}

impl PeriodicExpansion {
    pub fn to_rational(&self, b: u32) -> Result<BigRational, WordsError> {
        periodic_to_rational(
            &DigitWord::literal(self.preperiod.clone()),
            &DigitWord::literal(self.period.clone()),
            b,
        )
    }

    pub fn is_terminating(&self) -> bool {
        self.period == [0]
    }

    /// Iterates over all digits used.
    pub fn digits(&self) -> impl Iterator<Item = u8> + '_ {
        self.preperiod.iter().chain(self.period.iter()).copied()
    }
}

impl fmt::Display for PeriodicExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre: String = self.preperiod.iter().map(|&d| digit_char(d)).collect();
        let per: String = self.period.iter().map(|&d| digit_char(d)).collect();
        write!(f, "0.{pre}({per})")
    }
}

fn check_unit(x: &BigRational) -> Result<(), WordsError> {
    if x.is_negative() || *x > BigRational::one() {
        return Err(WordsError::OutOfUnitInterval(x.clone()));
    }
    Ok(())
}

/// Canonical (minimal preperiod, minimal period) base-`b` expansion of
/// `x ∈ [0, 1]` by long division with remainder-cycle detection.
/// Terminating expansions get period `0`; `x = 1` is `0.(b−1)(b−1)…`.
pub fn rational_to_expansion(x: &BigRational, b: u32, budget: usize) -> Result<PeriodicExpansion, WordsError> {
    check_unit(x)?;
    if x.is_one() {
        return Ok(PeriodicExpansion {
            preperiod: Vec::new(),
            period: vec![(b - 1) as u8],
        });
    }
    if let (Some(p), Some(q)) = (x.numer().to_u64(), x.denom().to_u64()) {
        if q <= SMALL_DENOM {
            return small_expansion(p, q, b, budget);
        }
    }
    let q = x.denom().magnitude().clone();
    let mut r = x.numer().magnitude().clone();
    let mut seen: HashMap<BigUint, usize> = HashMap::new();
    let mut digits = Vec::new();
    loop {
        if let Some(&start) = seen.get(&r) {
            let period = digits.split_off(start);
            return Ok(PeriodicExpansion {
                preperiod: digits,
                period,
            });
        }
        if digits.len() >= budget {
            return Err(WordsError::BudgetExceeded(budget));
        }
        seen.insert(r.clone(), digits.len());
        let (d, rem) = (r * b).div_rem(&q);
        digits.push(d.to_u8().unwrap_or(u8::MAX));
        r = rem;
    }
}

/// Denominators up to this size take the machine-word path.
const SMALL_DENOM: u64 = 1 << 20;

fn small_expansion(p: u64, q: u64, b: u32, budget: usize) -> Result<PeriodicExpansion, WordsError> {
    let b = u64::from(b);
    // seen[r] = 1 + position at which remainder r first appeared
    let mut seen = vec![0u32; q as usize];
    let mut digits = Vec::new();
    let mut r = p;
    loop {
        let at = seen[r as usize];
        if at != 0 {
            let period = digits.split_off(at as usize - 1);
            return Ok(PeriodicExpansion {
                preperiod: digits,
                period,
            });
        }
        if digits.len() >= budget {
            return Err(WordsError::BudgetExceeded(budget));
        }
        seen[r as usize] = digits.len() as u32 + 1;
        let t = r * b;
        digits.push((t / q) as u8);
        r = t % q;
    }
}

/// True iff some base-`b` expansion of `x` uses only digits of `D`. For
/// b-adic rationals both the terminating form and the form ending in
/// `(b−1)(b−1)…` are tried.
pub fn in_cantor(x: &BigRational, pair: &DigitPair, budget: usize) -> Result<bool, WordsError> {
    let exp = rational_to_expansion(x, pair.base(), budget)?;
    if exp.digits().all(|d| pair.contains(d)) {
        return Ok(true);
    }
    if exp.is_terminating() {
        if let Some((&last, head)) = exp.preperiod.split_last() {
            let top = (pair.base() - 1) as u8;
            let alternate = head
                .iter()
                .copied()
                .chain(std::iter::once(last - 1))
                .chain(std::iter::once(top));
            return Ok(alternate.into_iter().all(|d| pair.contains(d)));
        }
    }
    Ok(false)
}

/// Shorthand for building a reduced rational from integers.
pub fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair01() -> DigitPair {
        DigitPair::new(3, &[0, 1], None).unwrap()
    }

    fn lit(s: &str) -> DigitWord {
        DigitWord::from_digit_string(s).unwrap()
    }

    /// Positional evaluation of an explicit digit list; the oracle for the
    /// composite path.
    fn naive_value(digits: &[u8], b: u32) -> BigUint {
        let mut acc = BigUint::zero();
        for &d in digits {
            acc = acc * b + d;
        }
        acc
    }

    #[test]
    fn pair_selection_and_validation() {
        let p = DigitPair::new(3, &[0, 2], None).unwrap();
        assert_eq!((p.d1(), p.d2(), p.u()), (0, 2, 2));
        let p = DigitPair::new(5, &[4, 1, 0], None).unwrap();
        assert_eq!((p.d1(), p.d2()), (0, 1));
        let p = DigitPair::new(5, &[4, 2, 3], None).unwrap();
        assert_eq!((p.d1(), p.d2()), (2, 3));
        let p = DigitPair::new(5, &[0, 1, 3], Some((3, 0))).unwrap();
        assert_eq!((p.d1(), p.d2()), (0, 3));
        assert!(DigitPair::new(3, &[0, 1, 2], None).is_err());
        assert!(DigitPair::new(3, &[1], None).is_err());
        assert!(DigitPair::new(3, &[0, 3], None).is_err());
        assert!(DigitPair::new(2, &[0], None).is_err());
        assert!(DigitPair::new(5, &[0, 1], Some((0, 2))).is_err());
    }

    #[test]
    fn value_examples() {
        assert_eq!(word_value(&lit("110"), 3), BigUint::from(12u32));
        assert_eq!(word_value(&DigitWord::empty(), 3), BigUint::zero());
        // w2 for b=3, D={0,1}, m2=2
        let w2 = DigitWord::composite(lit("1"), 2, true, &pair01()).unwrap();
        assert_eq!(w2.to_vec(), vec![1, 1, 0]);
        assert_eq!(word_value(&w2, 3), BigUint::from(12u32));
        assert_eq!(word_value(&w2, 3), naive_value(&w2.to_vec(), 3));
    }

    #[test]
    fn flip_last_examples() {
        let p = pair01();
        assert_eq!(lit("1").flip_last(&p).unwrap().to_vec(), vec![0]);
        assert_eq!(lit("110").flip_last(&p).unwrap().to_vec(), vec![1, 1, 1]);
        let p02 = DigitPair::new(3, &[0, 2], None).unwrap();
        assert_eq!(lit("20002000").flip_last(&p02).unwrap().to_digit_string(), "20002002");
        assert_eq!(DigitWord::empty().flip_last(&p), Err(WordsError::EmptyWord));
        let w2 = DigitWord::composite(lit("1"), 2, true, &p).unwrap();
        let flipped = w2.flip_last(&p).unwrap();
        assert_eq!(flipped.to_digit_string(), "111");
        assert_eq!(flipped.len(), w2.len());
    }

    #[test]
    fn expand_examples() {
        let p = pair01();
        let w2 = DigitWord::composite(lit("1"), 2, true, &p).unwrap();
        assert_eq!(w2.expand_digits(10), vec![1, 1, 0]);
        let w3 = DigitWord::composite(w2.clone(), 13, true, &p).unwrap();
        assert_eq!(w3.len(), 42);
        assert_eq!(w3.expand_digits(9), vec![1, 1, 0, 1, 1, 0, 1, 1, 0]);
        assert_eq!(w3.to_digit_string(), "110110110110110110110110110110110110110111");
        assert!(w3.expand_digits(0).is_empty());
    }

    #[test]
    fn periodic_to_rational_examples() {
        let b = 3;
        let r = periodic_to_rational(&DigitWord::empty(), &lit("110"), b).unwrap();
        assert_eq!(r, ratio(6, 13));
        // cross-oracle: partial sums of 50 periods bracket 6/13 from below
        let mut partial = BigRational::zero();
        let period_val = ratio(12, 27);
        let mut scale = BigRational::one();
        for _ in 0..50 {
            partial += &period_val * &scale;
            scale /= ratio(27, 1);
        }
        assert!(partial < r && &r - &partial < ratio(1, BigInt::from(27u32).pow(49u32)));
        let r = periodic_to_rational(&DigitWord::empty(), &lit("1"), b).unwrap();
        assert_eq!(r, ratio(1, 2));
        let r = periodic_to_rational(&lit("0000000"), &lit("20000000"), b).unwrap();
        assert_eq!(r, ratio(1, 3280));
        assert!(periodic_to_rational(&lit("1"), &DigitWord::empty(), b).is_err());
    }

    #[test]
    fn expansion_examples() {
        let e = rational_to_expansion(&ratio(6, 13), 3, 100).unwrap();
        assert_eq!((e.preperiod.clone(), e.period.clone()), (vec![], vec![1, 1, 0]));
        let e = rational_to_expansion(&ratio(1, 2), 3, 100).unwrap();
        assert_eq!((e.preperiod.clone(), e.period.clone()), (vec![], vec![1]));
        let e = rational_to_expansion(&ratio(1, 3), 3, 100).unwrap();
        assert_eq!((e.preperiod.clone(), e.period.clone()), (vec![1], vec![0]));
        let e = rational_to_expansion(&ratio(0, 1), 3, 100).unwrap();
        assert_eq!((e.preperiod, e.period), (vec![], vec![0]));
        let e = rational_to_expansion(&ratio(1, 1), 3, 100).unwrap();
        assert_eq!(e.period, vec![2]);
        // ord_{3280}(3) = 8, so a 5-digit budget cannot close the cycle
        assert_eq!(
            rational_to_expansion(&ratio(1, 3280), 3, 5),
            Err(WordsError::BudgetExceeded(5))
        );
        assert!(rational_to_expansion(&ratio(3, 2), 3, 100).is_err());
        assert!(rational_to_expansion(&ratio(-1, 2), 3, 100).is_err());
    }

    #[test]
    fn cantor_membership_examples() {
        let p02 = DigitPair::new(3, &[0, 2], None).unwrap();
        assert!(!in_cantor(&ratio(1, 2), &p02, 100).unwrap());
        assert!(in_cantor(&ratio(1, 2), &pair01(), 100).unwrap());
        assert!(in_cantor(&ratio(1, 1), &p02, 100).unwrap());
        // 1/3 = 0.1 = 0.0222…
        assert!(in_cantor(&ratio(1, 3), &p02, 100).unwrap());
        // 2/3 = 0.2
        assert!(in_cantor(&ratio(2, 3), &p02, 100).unwrap());
        assert!(!in_cantor(&ratio(4, 9), &p02, 100).unwrap());
        assert!(in_cantor(&ratio(0, 1), &p02, 100).unwrap());
        assert!(in_cantor(&ratio(1, 3280), &p02, 100).unwrap());
    }

    #[test]
    fn record_round_trip() {
        let p = pair01();
        let w2 = DigitWord::composite(lit("1"), 2, true, &p).unwrap();
        let w3 = DigitWord::composite(w2, 13, true, &p).unwrap();
        let json = serde_json::to_string(&w3.to_record()).unwrap();
        let back: WordRecord = serde_json::from_str(&json).unwrap();
        let w = DigitWord::from_record(&back, &p).unwrap();
        assert_eq!(w.to_vec(), w3.to_vec());
        assert_eq!(
            json,
            r#"{"base":{"base":"1","power":2,"flip":true},"power":13,"flip":true}"#
        );
    }

    fn arb_pair_word() -> impl Strategy<Value = (u32, Vec<u8>, Vec<(u64, bool)>)> {
        (3u32..=10).prop_flat_map(|b| {
            (
                Just(b),
                prop::collection::vec(0u8..2, 1..5),
                prop::collection::vec((0u64..=5, any::<bool>()), 0..3),
            )
        })
    }

    proptest! {
        #[test]
        fn composite_matches_literal((b, leaf, layers) in arb_pair_word()) {
            let pair = DigitPair::new(b, &[0, 1], None).unwrap();
            let mut w = DigitWord::literal(leaf);
            for (power, flip) in layers {
                w = DigitWord::composite(w, power, flip, &pair).unwrap();
            }
            let expanded = w.to_vec();
            prop_assert_eq!(expanded.len() as u64, w.len());
            prop_assert_eq!(w.value(b), naive_value(&expanded, b));
            let flat = DigitWord::literal(expanded.clone());
            prop_assert_eq!(
                w.flip_last(&pair).unwrap().value(b),
                flat.flip_last(&pair).unwrap().value(b)
            );
            if let Some((base, power, _)) = w.parts() {
                prop_assert_eq!(w.len(), (power + 1) * base.len());
            }
        }

        #[test]
        fn expansion_round_trip(b in 3u32..=10, q in 1u32..=10_000, p in 0u32..=10_000) {
            prop_assume!(p <= q);
            let x = ratio(p, q);
            let e = rational_to_expansion(&x, b, DEFAULT_DIGIT_BUDGET).unwrap();
            prop_assert_eq!(e.to_rational(b).unwrap(), x);
        }
    }
}
