//! The construction: initial data, the choice of the `m`-sequence, and the
//! exact recurrences for `p_i/q_i`.
//!
//! With `v = d1^{m1}`, `w_1 = d2·d1^{m1}` and `w_{i+1} = w_i^{m_{i+1}} w_i'`,
//! the fractions `p_i/q_i = (0.v w̄_i)_b` are consecutive convergents of their
//! limit as long as `b^{m1}(b^{N_i} − 1) = u·q_{i−1}·q_i` holds at every step.
//! The recurrence below keeps that identity by picking `m_2` in a fixed
//! residue class modulo `q_1` and `m_{i+1}` among multiples of `q_i`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Certificate, Status, CERTIFICATE_VERSION};
use crate::numth::{choose_m1, mod_inverse, split_u, NumthError, USplit};
use crate::psi::{compare_expforms, ExpForm, Psi, PsiError};
use crate::words::{periodic_to_rational, DigitPair, DigitWord, WordsError};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Words(#[from] WordsError),
    #[error(transparent)]
    Numth(#[from] NumthError),
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error("construction invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `m_2 >= q_1`; gives the `q^{-q}` upper bound.
    Strict,
    /// Smallest positive element of the class for `m_2`.
    Relaxed,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strict" => Ok(Mode::Strict),
            "relaxed" => Ok(Mode::Relaxed),
            other => Err(format!("unknown mode {other:?} (strict | relaxed)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Relaxed => "relaxed",
        })
    }
}

pub const DEFAULT_MAX_BITS: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct ConstructionParams {
    pub pair: DigitPair,
    pub psi: Psi,
    pub epsilon: BigRational,
    pub mode: Mode,
    pub max_depth: usize,
    pub max_bits: u64,
}

impl ConstructionParams {
    pub fn new(
        pair: DigitPair,
        psi: Psi,
        epsilon: BigRational,
        mode: Mode,
        max_depth: usize,
        max_bits: u64,
    ) -> Result<Self, BuildError> {
        if !epsilon.is_positive() {
            return Err(BuildError::Params("epsilon must be positive".into()));
        }
        if max_depth < 1 {
            return Err(BuildError::Params("depth must be at least 1".into()));
        }
        if max_bits < 64 {
            return Err(BuildError::Params("max bits must be at least 64".into()));
        }
        Ok(Self {
            pair,
            psi,
            epsilon,
            mode,
            max_depth,
            max_bits,
        })
    }
}

/// One index `i` of the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionStep {
    pub i: usize,
    pub m: u64,
    pub n: u64,
    /// `+1` iff `word` ends in `d1`: the sign of `p_{i+1}/q_{i+1} − p_i/q_i`.
    pub sigma: i8,
    pub p: BigUint,
    pub q: BigUint,
    pub word: DigitWord,
}

/// Sign of the next correction for a word with the given last digit.
pub fn sigma_of(word: &DigitWord, pair: &DigitPair) -> i8 {
    if word.last_digit() == Some(pair.d1()) {
        1
    } else {
        -1
    }
}

/// Bit length of `q_{i+1} = b^{m1}(b^{n} − 1)/(u·q_i)`, or `None` once it
/// certainly exceeds `cap`.
pub fn next_q_bits(b: u32, m1: u64, u: u32, q_i: &BigUint, n: u64, cap: u64) -> Option<u64> {
    // b >= 3, so b^n alone has more than n bits
    let slack = m1.saturating_mul(6) + q_i.bits() + 8;
    if n > cap.saturating_add(slack) {
        return None;
    }
    let bb = BigUint::from(b);
    let q = Pow::pow(&bb, m1) * (Pow::pow(&bb, n) - 1u32) / (q_i * u);
    let bits = q.bits();
    (bits <= cap).then_some(bits)
}

/// `u / (b^{m1}(b^{n} − 1)) < ψ`, decided without materializing `b^n`.
///
/// With `X = ψ·b^{m1+n}` the condition reads `u < X − ψ·b^{m1}`, which is
/// false when `X <= u` and true when `X > u + b^{m1}`; in between `X` is
/// small and the condition becomes `b^n (X − u) > X`.
pub fn gap_below(u: u32, m1: u64, n: u64, psi: &ExpForm) -> bool {
    let b = psi.base();
    let x = psi.shift(BigInt::from(m1) + BigInt::from(n));
    let u_form = ExpForm::from_integer(b, u);
    if compare_expforms(&x, &u_form) != Ordering::Greater {
        return false;
    }
    let ceiling = ExpForm::from_integer(b, BigUint::from(u) + Pow::pow(&BigUint::from(b), m1));
    if compare_expforms(&x, &ceiling) == Ordering::Greater {
        return true;
    }
    let Some(x_val) = x.to_rational() else {
        // only reachable for absurd m1
        return false;
    };
    let excess = &x_val - BigRational::from_integer(BigInt::from(u));
    let lhs = ExpForm::new(b, excess, n);
    compare_expforms(&lhs, &ExpForm::from_rational(b, x_val)) == Ordering::Greater
}

/// Outcome of the search for `m_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NextM {
    Chosen(u64),
    /// The smallest admissible candidate needs more than `max_bits`.
    BudgetExhausted,
}

/// A construction in progress.
#[derive(Debug, Clone)]
pub struct Construction {
    params: ConstructionParams,
    m1: u64,
    n_lemma: u64,
    split: USplit,
    q0: BigUint,
    v: DigitWord,
    steps: Vec<ConstructionStep>,
}

impl Construction {
    /// Sets up `m1`, `v = d1^{m1}`, `w1 = d2·d1^{m1}`, `p1/q1` and
    /// `q0 = b^{m1}/u1`, asserting `u1 | b^{m1}`, `u2·q1 = b^{m1+1} − 1` and
    /// `gcd(q0·p1, q1) = 1`.
    pub fn initial_data(params: ConstructionParams) -> Result<Self, BuildError> {
        let pair = &params.pair;
        let b = pair.base();
        let (m1, n_lemma) = choose_m1(pair)?;
        let split = split_u(u64::from(pair.u()), u64::from(b));
        let len = usize::try_from(m1).map_err(|_| BuildError::Params("m1 too large".into()))?;
        let v = DigitWord::literal(vec![pair.d1(); len]);
        let mut w1 = Vec::with_capacity(len + 1);
        w1.push(pair.d2());
        w1.extend(std::iter::repeat_n(pair.d1(), len));
        let w1 = DigitWord::literal(w1);
        let r = periodic_to_rational(&v, &w1, b)?;
        let (p1, q1) = (r.numer().magnitude().clone(), r.denom().magnitude().clone());

        let b_m1: BigUint = Pow::pow(&BigUint::from(b), m1);
        let (q0, rem) = b_m1.div_rem(&BigUint::from(split.u1));
        if !rem.is_zero() {
            return Err(BuildError::Invariant("u1 does not divide b^m1".into()));
        }
        if &q1 * split.u2 != &b_m1 * b - 1u32 {
            return Err(BuildError::Invariant("u2·q1 != b^(m1+1) − 1".into()));
        }
        if !(&q0 * &p1).gcd(&q1).is_one() {
            return Err(BuildError::Invariant("q0·p1 is not coprime to q1".into()));
        }
        let sigma = sigma_of(&w1, pair);
        let step1 = ConstructionStep {
            i: 1,
            m: m1,
            n: n_lemma,
            sigma,
            p: p1,
            q: q1,
            word: w1,
        };
        Ok(Construction {
            params,
            m1,
            n_lemma,
            split,
            q0,
            v,
            steps: vec![step1],
        })
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn steps(&self) -> &[ConstructionStep] {
        &self.steps
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn q0(&self) -> &BigUint {
        &self.q0
    }

    pub fn v(&self) -> &DigitWord {
        &self.v
    }

    /// `r` such that `m_2 ≡ r (mod q1)` gives `q0·p1·(m_2+1) ≡ −σ1 (mod q1)`.
    pub fn m2_residue(&self) -> BigUint {
        let s1 = &self.steps[0];
        let q1 = &s1.q;
        let target = BigInt::from(-i32::from(s1.sigma));
        let unit = BigInt::from(&self.q0 * &s1.p);
        // coprimality was asserted in initial_data
        let inv = mod_inverse(&unit, q1).unwrap_or_default();
        let m_plus_1 = (target * BigInt::from(inv)).mod_floor(&BigInt::from(q1.clone()));
        let r = (m_plus_1 - BigInt::one()).mod_floor(&BigInt::from(q1.clone()));
        r.magnitude().clone()
    }

    /// First candidate and stride for `m_{i+1}`, `i = steps.len()`.
    fn candidates(&self) -> (BigUint, BigUint) {
        let last = self.steps.last().expect("at least one step");
        if self.steps.len() == 1 {
            let q1 = last.q.clone();
            let r = self.m2_residue();
            let start = match self.params.mode {
                Mode::Strict => &r + &q1,
                Mode::Relaxed if r.is_zero() => q1.clone(),
                Mode::Relaxed => r,
            };
            (start, q1)
        } else {
            (last.q.clone(), last.q.clone())
        }
    }

    /// Smallest admissible `m_{i+1}` whose gap `u/(b^{m1}(b^{N_{i+1}} − 1))`
    /// is below `Ψ(q_i)`.
    pub fn next_m(&self) -> Result<NextM, BuildError> {
        let last = self.steps.last().expect("at least one step");
        let b = self.params.pair.base();
        let psi = self.params.psi.eval(&last.q, b)?;
        let (mut m, stride) = self.candidates();
        loop {
            let Some(m_small) = m.to_u64() else {
                return Ok(NextM::BudgetExhausted);
            };
            let Some(n_next) = m_small.checked_add(1).and_then(|k| k.checked_mul(last.n)) else {
                return Ok(NextM::BudgetExhausted);
            };
            let u = self.params.pair.u();
            if next_q_bits(b, self.m1, u, &last.q, n_next, self.params.max_bits).is_none() {
                return Ok(NextM::BudgetExhausted);
            }
            if gap_below(self.params.pair.u(), self.m1, n_next, &psi) {
                return Ok(NextM::Chosen(m_small));
            }
            m += &stride;
        }
    }

    /// Appends step `i+1` for the given `m_{i+1}`.
    pub fn step(&mut self, m: u64) -> Result<&ConstructionStep, BuildError> {
        let pair = self.params.pair.clone();
        let b = BigUint::from(pair.base());
        let i = self.steps.len();
        let cur = &self.steps[i - 1];
        let prev_q = if i == 1 { &self.q0 } else { &self.steps[i - 2].q };
        let n_next = m
            .checked_add(1)
            .and_then(|k| k.checked_mul(cur.n))
            .ok_or_else(|| BuildError::Invariant("N overflows".into()))?;
        let block = Pow::pow(&b, cur.n) - 1u32;
        let (s, rem) = (Pow::pow(&b, n_next) - 1u32).div_rem(&block);
        debug_assert!(rem.is_zero());
        let q_next = prev_q * &s;
        let r = BigInt::from(prev_q * &cur.p * &s) + BigInt::from(cur.sigma);
        let (p_next, rem) = r.div_rem(&BigInt::from(cur.q.clone()));
        if !rem.is_zero() {
            return Err(BuildError::Invariant(format!(
                "q_{i} does not divide the numerator of p_{}",
                i + 1
            )));
        }
        let word = DigitWord::composite(cur.word.clone(), m, true, &pair)?;
        let sigma = -cur.sigma;
        if sigma != sigma_of(&word, &pair) {
            return Err(BuildError::Invariant("sign does not alternate".into()));
        }
        self.steps.push(ConstructionStep {
            i: i + 1,
            m,
            n: n_next,
            sigma,
            p: p_next.magnitude().clone(),
            q: q_next,
            word,
        });
        Ok(self.steps.last().expect("just pushed"))
    }

    /// `c1 = 1` for the pair `(0,1)`, otherwise `c1 = q1`.
    pub fn c1(&self) -> BigUint {
        let pair = &self.params.pair;
        if pair.d1() == 0 && pair.d2() == 1 {
            BigUint::one()
        } else {
            self.steps[0].q.clone()
        }
    }

    pub fn into_certificate(self, status: Status) -> Certificate {
        let c1 = self.c1();
        Certificate {
            version: CERTIFICATE_VERSION,
            pair: self.params.pair,
            mode: self.params.mode,
            psi: self.params.psi,
            epsilon: self.params.epsilon,
            max_depth: self.params.max_depth,
            max_bits: self.params.max_bits,
            m1: self.m1,
            n: self.n_lemma,
            u: self.split.u,
            u1: self.split.u1,
            u2: self.split.u2,
            q0: self.q0,
            v: self.v,
            c1,
            status,
            steps: self.steps,
        }
    }
}

/// Runs the construction up to `max_depth` steps or until the bit budget
/// stops it; exhaustion is recorded in the certificate status.
pub fn run(params: ConstructionParams) -> Result<Certificate, BuildError> {
    let max_depth = params.max_depth;
    let mut c = Construction::initial_data(params)?;
    while c.steps.len() < max_depth {
        match c.next_m()? {
            NextM::Chosen(m) => {
                c.step(m)?;
            }
            NextM::BudgetExhausted => {
                let depth = c.steps.len() + 1;
                return Ok(c.into_certificate(Status::BudgetExhausted { depth }));
            }
        }
    }
    Ok(c.into_certificate(Status::Complete))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::ratio;

    fn params(b: u32, digits: &[u8], psi: &str, mode: Mode, depth: usize) -> ConstructionParams {
        ConstructionParams::new(
            DigitPair::new(b, digits, None).unwrap(),
            Psi::parse(psi).unwrap(),
            ratio(1, 1),
            mode,
            depth,
            DEFAULT_MAX_BITS,
        )
        .unwrap()
    }

    fn frac(s: &ConstructionStep) -> BigRational {
        ratio(BigInt::from(s.p.clone()), BigInt::from(s.q.clone()))
    }

    #[test]
    fn param_validation() {
        let pair = DigitPair::new(3, &[0, 1], None).unwrap();
        let psi = Psi::parse("1").unwrap();
        let mk = |eps: BigRational, depth, bits| {
            ConstructionParams::new(pair.clone(), psi.clone(), eps, Mode::Strict, depth, bits)
        };
        assert!(mk(ratio(0, 1), 1, 64).is_err());
        assert!(mk(ratio(1, 1), 0, 64).is_err());
        assert!(mk(ratio(1, 1), 1, 63).is_err());
        assert!(mk(ratio(1, 2), 1, 64).is_ok());
    }

    #[test]
    fn initial_data_examples() {
        let c = Construction::initial_data(params(3, &[0, 1], "1", Mode::Relaxed, 3)).unwrap();
        assert_eq!(c.m1(), 0);
        assert!(c.v().is_empty());
        assert_eq!(c.steps()[0].word.to_digit_string(), "1");
        assert_eq!(frac(&c.steps()[0]), ratio(1, 2));
        assert_eq!(*c.q0(), BigUint::one());

        let c = Construction::initial_data(params(3, &[0, 2], "1", Mode::Strict, 2)).unwrap();
        assert_eq!(c.m1(), 7);
        assert_eq!(frac(&c.steps()[0]), ratio(1, 3280));
        assert_eq!(*c.q0(), BigUint::from(2187u32));
        assert_eq!(c.steps()[0].sigma, 1);

        let c = Construction::initial_data(params(4, &[0, 1], "1", Mode::Relaxed, 2)).unwrap();
        assert_eq!(c.m1(), 0);
        assert_eq!(frac(&c.steps()[0]), ratio(1, 3));
        assert_eq!(*c.q0(), BigUint::one());
    }

    #[test]
    fn residue_examples() {
        let c = Construction::initial_data(params(3, &[0, 1], "1", Mode::Relaxed, 3)).unwrap();
        assert_eq!(c.steps()[0].sigma, -1);
        assert_eq!(c.m2_residue(), BigUint::zero());
        let c = Construction::initial_data(params(4, &[0, 1], "1", Mode::Relaxed, 3)).unwrap();
        assert_eq!(c.m2_residue(), BigUint::zero());
        let c = Construction::initial_data(params(3, &[0, 2], "1", Mode::Strict, 2)).unwrap();
        let r = c.m2_residue();
        // brute-force oracle over the class
        let expected = (0u64..3280).find(|m| (2187 * (m + 1) + 1) % 3280 == 0).unwrap();
        assert_eq!(r, BigUint::from(expected));
        assert_eq!(r, BigUint::from(3276u32));
    }

    #[test]
    fn next_m_examples() {
        let mut c = Construction::initial_data(params(3, &[0, 1], "1", Mode::Relaxed, 3)).unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(2));
        c.step(2).unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(13));

        let c = Construction::initial_data(params(3, &[0, 1], "q^-3", Mode::Relaxed, 3)).unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(2));

        // Ψ = 3^-q at q1 = 2: need 1/(2·q2) < 1/9, q2 = (3^(m+1) − 1)/2, first even m is 2
        let c = Construction::initial_data(params(3, &[0, 1], "expb(-q)", Mode::Relaxed, 3)).unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(2));
        // Ψ = q^-40 at q1 = 2: need (3^(m+1) − 1) > 2^40, i.e. m + 1 >= 26, m even
        let c = Construction::initial_data(params(3, &[0, 1], "q^-40", Mode::Relaxed, 3)).unwrap();
        let oracle = (1u32..)
            .filter(|m| m % 2 == 0)
            .find(|&m| BigUint::from(3u32).pow(m + 1) - 1u32 > BigUint::from(2u32).pow(40u32))
            .unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(u64::from(oracle)));

        let c = Construction::initial_data(params(3, &[0, 1], "1", Mode::Strict, 3)).unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(2));
        let c = Construction::initial_data(params(3, &[0, 2], "1", Mode::Strict, 2)).unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(6556));
        let c = Construction::initial_data(params(3, &[0, 2], "1", Mode::Relaxed, 2)).unwrap();
        assert_eq!(c.next_m().unwrap(), NextM::Chosen(3276));
    }

    #[test]
    fn gap_condition_matches_exact_arithmetic() {
        // compare with full materialization for small cases
        for psi_text in ["1", "1/3", "q^-2", "expb(-q)", "min(1, 7/10)", "26/27"] {
            let psi = Psi::parse(psi_text).unwrap();
            for q in [1u32, 2, 13] {
                let psi_val = psi.eval(&BigUint::from(q), 3).unwrap();
                let exact_psi = psi_val.to_rational().unwrap();
                for (u, m1) in [(1u32, 0u64), (2, 7), (1, 1)] {
                    for n in 1u64..12 {
                        let gap = ratio(
                            BigInt::from(u),
                            BigInt::from(3u32).pow(m1 as u32) * (BigInt::from(3u32).pow(n as u32) - 1),
                        );
                        assert_eq!(
                            gap_below(u, m1, n, &psi_val),
                            gap < exact_psi,
                            "Ψ={psi_text} q={q} u={u} m1={m1} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn step_examples() {
        let mut c = Construction::initial_data(params(3, &[0, 1], "1", Mode::Relaxed, 3)).unwrap();
        let s2 = c.step(2).unwrap().clone();
        assert_eq!(frac(&s2), ratio(6, 13));
        assert_eq!(s2.word.to_digit_string(), "110");
        assert_eq!(
            periodic_to_rational(&DigitWord::empty(), &s2.word, 3).unwrap(),
            ratio(6, 13)
        );
        let s3 = c.step(13).unwrap().clone();
        let q3 = (BigUint::from(3u32).pow(42u32) - 1u32) / 13u32;
        assert_eq!(s3.q, q3);
        assert_eq!(s3.p, "3884697838988604469".parse::<BigUint>().unwrap());
        assert_eq!(s3.sigma, -1);

        let mut c = Construction::initial_data(params(4, &[0, 1], "1", Mode::Relaxed, 2)).unwrap();
        let s2 = c.step(3).unwrap().clone();
        assert_eq!(frac(&s2), ratio(28, 85));
        assert_eq!(s2.word.to_digit_string(), "1110");
    }

    #[test]
    fn wrong_class_is_rejected() {
        let mut c = Construction::initial_data(params(3, &[0, 2], "1", Mode::Strict, 2)).unwrap();
        assert!(matches!(c.step(5), Err(BuildError::Invariant(_))));
    }

    #[test]
    fn run_reaches_budget() {
        let cert = run(params(3, &[0, 2], "1", Mode::Relaxed, 3)).unwrap();
        assert_eq!(cert.steps.len(), 2);
        assert_eq!(cert.status, Status::BudgetExhausted { depth: 3 });
        let cert = run(params(4, &[0, 3], "1", Mode::Relaxed, 2)).unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.status, Status::BudgetExhausted { depth: 2 });
    }

    #[test]
    fn run_golden_binary() {
        let cert = run(params(3, &[0, 1], "1", Mode::Relaxed, 3)).unwrap();
        let qs: Vec<String> = cert.steps.iter().map(|s| s.q.to_string()).collect();
        assert_eq!(qs, ["2", "13", "8416845317808643016"]);
        assert_eq!(cert.c1, BigUint::one());
        assert_eq!(cert.status, Status::Complete);
        let strict = run(params(3, &[0, 1], "1", Mode::Strict, 2)).unwrap();
        assert_eq!(strict.steps[1].m, 2);
        assert_eq!(strict.steps[1].q, BigUint::from(13u32));
    }
}
