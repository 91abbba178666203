//! Independent verification of a certificate.
//!
//! Each check recomputes what it needs from the raw certificate fields with
//! exact arithmetic; nothing is taken on trust from the construction code
//! except shared primitives (periodic expansions, `ExpForm`, log brackets).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::build::{sigma_of, ConstructionStep, Mode};
use crate::certificate::{Certificate, Status};
use crate::numth::{choose_m1, mod_inverse, split_u};
use crate::psi::{compare_expforms, compare_via_logs, ExpForm, LogOrdering, Quantity, MAX_LOG_PRECISION};
use crate::words::{periodic_to_fraction, ratio, DigitWord};

/// Digits compared by the positional membership check unless overridden.
pub const DEFAULT_MEMBERSHIP_DIGITS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Initial,
    Conditions,
    Selection,
    Identity,
    Determinant,
    Convergents,
    Membership,
    MembershipDigits,
    Gap,
    Growth,
    TheoremUpper,
    TheoremLower,
}

impl CheckKind {
    pub const ALL: [CheckKind; 12] = [
        CheckKind::Initial,
        CheckKind::Conditions,
        CheckKind::Selection,
        CheckKind::Identity,
        CheckKind::Determinant,
        CheckKind::Convergents,
        CheckKind::Membership,
        CheckKind::MembershipDigits,
        CheckKind::Gap,
        CheckKind::Growth,
        CheckKind::TheoremUpper,
        CheckKind::TheoremLower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Initial => "initial",
            CheckKind::Conditions => "conditions",
            CheckKind::Selection => "selection",
            CheckKind::Identity => "identity",
            CheckKind::Determinant => "determinant",
            CheckKind::Convergents => "convergents",
            CheckKind::Membership => "membership",
            CheckKind::MembershipDigits => "membership-digits",
            CheckKind::Gap => "gap",
            CheckKind::Growth => "growth",
            CheckKind::TheoremUpper => "theorem-upper",
            CheckKind::TheoremLower => "theorem-lower",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CheckKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = CheckKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown check {s:?} (known: {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Global,
    Step(usize),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Global => f.write_str("-"),
            Scope::Step(i) => write!(f, "i={i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "result", content = "detail")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped(String),
    /// Log brackets did not separate the two sides at the given precision.
    Indistinguishable(u32),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail => f.write_str("FAIL"),
            Verdict::Skipped(why) => write!(f, "SKIP ({why})"),
            Verdict::Indistinguishable(p) => write!(f, "UNDECIDED (precision {p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: CheckKind,
    pub scope: Scope,
    pub verdict: Verdict,
    /// Informational reports never fail the certificate.
    pub mandatory: bool,
    pub witness: String,
}

impl CheckReport {
    fn new(check: CheckKind, scope: Scope, ok: bool, witness: impl Into<String>) -> Self {
        CheckReport {
            check,
            scope,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            mandatory: true,
            witness: witness.into(),
        }
    }

    fn skipped(check: CheckKind, scope: Scope, why: &str) -> Self {
        CheckReport {
            check,
            scope,
            verdict: Verdict::Skipped(why.into()),
            mandatory: true,
            witness: String::new(),
        }
    }

    fn from_errors(check: CheckKind, scope: Scope, errors: Vec<String>, ok_witness: String) -> Self {
        if errors.is_empty() {
            Self::new(check, scope, true, ok_witness)
        } else {
            Self::new(check, scope, false, errors.join("; "))
        }
    }

    /// Whether this report makes the certificate fail.
    pub fn is_failure(&self) -> bool {
        self.mandatory && matches!(self.verdict, Verdict::Fail | Verdict::Indistinguishable(_))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub membership_digits: usize,
    pub max_precision: u32,
    /// `None` runs every check.
    pub checks: Option<BTreeSet<CheckKind>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            membership_digits: DEFAULT_MEMBERSHIP_DIGITS,
            max_precision: MAX_LOG_PRECISION,
            checks: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub reports: Vec<CheckReport>,
    /// Smallest index from which the lower bound holds at every checked index.
    pub lower_bound_threshold: Option<usize>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.reports.iter().any(CheckReport::is_failure)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| r.is_failure())
    }

    pub fn find(&self, check: CheckKind, scope: Scope) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.check == check && r.scope == scope)
    }
}

/// Short rendering of a big number: full if small, else leading digits and size.
pub fn abbreviate(n: &impl ToString) -> String {
    let s = n.to_string();
    let digits = s.trim_start_matches('-').len();
    if digits <= 40 {
        s
    } else {
        format!("{}…{} ({digits} digits)", &s[..12], &s[s.len() - 6..])
    }
}

fn big(n: impl Into<BigUint>) -> BigUint {
    n.into()
}

fn pow_b(b: u32, e: u64) -> BigUint {
    Pow::pow(&BigUint::from(b), e)
}

/// `p/q` left unreduced; reducing 10^5-bit operands costs more than every
/// comparison made with the result.
fn frac(p: &BigUint, q: &BigUint) -> BigRational {
    BigRational::new_raw(BigInt::from(p.clone()), BigInt::from(q.clone()))
}

/// `x − y` over the product of the denominators, without a gcd.
fn raw_sub(x: &BigRational, y: &BigRational) -> BigRational {
    BigRational::new_raw(x.numer() * y.denom() - y.numer() * x.denom(), x.denom() * y.denom())
}

fn same_value(x: &BigRational, y: &BigRational) -> bool {
    x.numer() * y.denom() == y.numer() * x.denom()
}

fn step(cert: &Certificate, i: usize) -> &ConstructionStep {
    &cert.steps[i - 1]
}

/// `q_{i}` with `q_0` taken from the certificate.
fn q_at(cert: &Certificate, i: usize) -> &BigUint {
    if i == 0 {
        &cert.q0
    } else {
        &step(cert, i).q
    }
}

/// `N_i` with `N_0 = 1`.
fn n_at(cert: &Certificate, i: usize) -> u64 {
    if i == 0 {
        1
    } else {
        step(cert, i).n
    }
}

/// `p_{i+1}/q_{i+1} − p_i/q_i`.
fn delta(cert: &Certificate, i: usize) -> BigRational {
    let (a, b) = (step(cert, i), step(cert, i + 1));
    raw_sub(&frac(&b.p, &b.q), &frac(&a.p, &a.q))
}

// ---------------------------------------------------------------- initial

/// `m1`, `N`, the split of `u`, `q0`, `v`, `w1`, `p1/q1` and `c1`.
pub fn check_initial(cert: &Certificate) -> CheckReport {
    let kind = CheckKind::Initial;
    let pair = &cert.pair;
    let b = pair.base();
    let mut errors = Vec::new();
    let split = split_u(u64::from(pair.u()), u64::from(b));
    if (cert.u, cert.u1, cert.u2) != (split.u, split.u1, split.u2) {
        errors.push(format!(
            "u split is ({}, {}, {}), expected ({}, {}, {})",
            cert.u, cert.u1, cert.u2, split.u, split.u1, split.u2
        ));
    }
    match choose_m1(pair) {
        Ok((m1, n)) => {
            if cert.m1 != m1 || cert.n != n {
                errors.push(format!("(m1, N) = ({}, {}), expected ({m1}, {n})", cert.m1, cert.n));
            }
        }
        Err(e) => errors.push(format!("cannot recompute m1: {e}")),
    }
    if !errors.is_empty() {
        return CheckReport::new(kind, Scope::Global, false, errors.join("; "));
    }
    let m1 = cert.m1;
    let b_m1 = pow_b(b, m1);
    let (q0, rem) = b_m1.div_rem(&big(split.u1));
    if !rem.is_zero() {
        errors.push("u1 does not divide b^m1".into());
    } else if cert.q0 != q0 {
        errors.push(format!(
            "q0 = {}, expected b^m1/u1 = {}",
            abbreviate(&cert.q0),
            abbreviate(&q0)
        ));
    }
    let v_ok = cert.v.len() == m1 && cert.v.digits().all(|d| d == pair.d1());
    if !v_ok {
        errors.push(format!("v = {:?} is not d1^m1", cert.v.to_digit_string()));
    }
    let s1 = step(cert, 1);
    let w1_ok = s1.word.as_literal().is_some()
        && s1.word.len() == m1 + 1
        && s1.word.digit_at(0) == Some(pair.d2())
        && s1.word.digits().skip(1).all(|d| d == pair.d1());
    if !w1_ok {
        errors.push(format!("w1 = {} is not d2·d1^m1", s1.word));
    }
    if s1.i != 1 || s1.m != m1 || s1.n != m1 + 1 {
        errors.push(format!("step 1 header (i, m, N) = ({}, {}, {})", s1.i, s1.m, s1.n));
    }
    let q1_expected = (&b_m1 * b - 1u32) / split.u2;
    if &s1.q * split.u2 != &b_m1 * b - 1u32 {
        errors.push(format!(
            "u2·q1 = {}·{} differs from b^(m1+1) − 1",
            split.u2,
            abbreviate(&s1.q)
        ));
    }
    if w1_ok && v_ok {
        match periodic_to_fraction(&cert.v, &s1.word, b) {
            Ok((n, d)) if &n * &s1.q == &d * &s1.p => {}
            Ok((n, d)) => errors.push(format!("p1/q1 = {}/{} but (0.v w̄1) = {n}/{d}", s1.p, s1.q)),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !(&cert.q0 * &s1.p).gcd(&s1.q).is_one() {
        errors.push("gcd(q0·p1, q1) != 1".into());
    }
    let c1 = if pair.d1() == 0 && pair.d2() == 1 {
        BigUint::one()
    } else {
        s1.q.clone()
    };
    if cert.c1 != c1 {
        errors.push(format!("c1 = {}, expected {c1}", cert.c1));
    }
    CheckReport::from_errors(
        kind,
        Scope::Global,
        errors,
        format!(
            "m1 = {m1}, N = {}, u = {}·{}, q0 = {}, u2·q1 = {}·{} = {b}^{} − 1, c1 = {}",
            cert.n,
            split.u1,
            split.u2,
            abbreviate(&q0),
            split.u2,
            abbreviate(&q1_expected),
            m1 + 1,
            abbreviate(&c1)
        ),
    )
}

// ---------------------------------------------------------------- structure

/// Indices, lengths, signs, word shapes, the class condition on `m_2`, the
/// divisibility `q_i | m_{i+1}`, and the status line.
pub fn check_conditions(cert: &Certificate) -> CheckReport {
    let kind = CheckKind::Conditions;
    let pair = &cert.pair;
    let mut errors = Vec::new();
    let k = cert.steps.len();
    for (idx, s) in cert.steps.iter().enumerate() {
        let i = idx + 1;
        if s.i != i {
            errors.push(format!("step {i} is labelled i = {}", s.i));
        }
        if s.word.len() != s.n {
            errors.push(format!("|w_{i}| = {} but N_{i} = {}", s.word.len(), s.n));
        }
        if s.sigma != sigma_of(&s.word, pair) {
            errors.push(format!(
                "sigma_{i} = {} disagrees with the last digit of w_{i}",
                s.sigma
            ));
        }
        if s.q.is_zero() || s.p >= s.q || s.p.is_zero() {
            errors.push(format!("p_{i}/q_{i} is not in (0, 1)"));
        } else if !s.p.gcd(&s.q).is_one() {
            errors.push(format!("p_{i}/q_{i} is not in lowest terms"));
        }
        if i >= 2 {
            let prev = step(cert, i - 1);
            let expect_n = s.m.checked_add(1).and_then(|m| m.checked_mul(prev.n));
            if expect_n != Some(s.n) {
                errors.push(format!("N_{i} = {} != (m_{i}+1)·N_{}", s.n, i - 1));
            }
            match s.word.parts() {
                Some((_, power, true)) if power == s.m => {}
                _ => errors.push(format!("w_{i} is not w_{}^m_{i} w_{}'", i - 1, i - 1)),
            }
            if s.sigma != -prev.sigma {
                errors.push(format!("sigma does not alternate at {i}"));
            }
            if s.q <= prev.q {
                errors.push(format!("q_{i} <= q_{}", i - 1));
            }
            if s.m == 0 {
                errors.push(format!("m_{i} = 0"));
            }
        }
    }
    if k >= 2 {
        let (s1, s2) = (step(cert, 1), step(cert, 2));
        let lhs: BigInt =
            BigInt::from(&cert.q0 * &s1.p) * (BigInt::from(s2.m) + BigInt::one()) + BigInt::from(s1.sigma);
        if !lhs.mod_floor(&BigInt::from(s1.q.clone())).is_zero() {
            errors.push("q0·p1·(m2+1) ≢ −sigma1 (mod q1)".into());
        }
        if cert.mode == Mode::Strict && big(s2.m) < s1.q {
            errors.push(format!("strict mode needs m2 >= q1, got m2 = {}", s2.m));
        }
    }
    for i in 2..k {
        if !(big(step(cert, i + 1).m) % &step(cert, i).q).is_zero() {
            errors.push(format!("q_{i} does not divide m_{}", i + 1));
        }
    }
    match cert.status {
        Status::Complete if k != cert.max_depth => {
            errors.push(format!("status complete but {k} of {} steps", cert.max_depth))
        }
        Status::BudgetExhausted { depth } if depth != k + 1 || k >= cert.max_depth => {
            errors.push(format!("budget-exhausted({depth}) inconsistent with {k} steps"))
        }
        _ => {}
    }
    let ms: Vec<String> = cert.steps.iter().map(|s| s.m.to_string()).collect();
    CheckReport::from_errors(
        kind,
        Scope::Global,
        errors,
        format!(
            "m = [{}], N = [{}], status {}",
            ms.join(", "),
            cert.steps
                .iter()
                .map(|s| s.n.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            cert.status
        ),
    )
}

// ---------------------------------------------------------------- selection

/// `u/(b^{m1}(b^{n} − 1))` as an exact value when `b^n` is materializable.
fn gap_value(cert: &Certificate, n: u64, max_n: u64) -> Option<ExpForm> {
    let b = cert.pair.base();
    if n > max_n {
        return None;
    }
    let denom = pow_b(b, n) - 1u32;
    Some(ExpForm::new(
        b,
        ratio(BigInt::from(cert.pair.u()), BigInt::from(denom)),
        -BigInt::from(cert.m1),
    ))
}

/// Whether candidate `m` for index `i` passes the gap test against `Ψ(q_{i−1})`.
/// `None` when the candidate is past the bit budget.
fn candidate_passes(cert: &Certificate, i: usize, m: &BigUint) -> Result<Option<bool>, String> {
    let b = cert.pair.base();
    let prev = step(cert, i - 1);
    let Some(n) = m
        .to_u64()
        .and_then(|m| m.checked_add(1))
        .and_then(|m| m.checked_mul(prev.n))
    else {
        return Ok(None);
    };
    if n == 0 {
        return Err(format!("N_{} is zero", i - 1));
    }
    // bit size of q_i = b^{m1}(b^n − 1)/(u·q_{i−1}) against the budget
    if n > cert
        .max_bits
        .saturating_add(cert.m1.saturating_mul(6) + prev.q.bits() + 8)
    {
        return Ok(None);
    }
    let q_bits = (pow_b(b, cert.m1) * (pow_b(b, n) - 1u32) / (&prev.q * cert.pair.u())).bits();
    if q_bits > cert.max_bits {
        return Ok(None);
    }
    let psi = cert.psi.eval(&prev.q, b).map_err(|e| e.to_string())?;
    let gap = gap_value(cert, n, u64::MAX).expect("unbounded");
    Ok(Some(compare_expforms(&gap, &psi) == Ordering::Less))
}

/// First admissible candidate and stride for `m_i`.
fn candidate_class(cert: &Certificate, i: usize) -> Result<(BigUint, BigUint), String> {
    let prev = step(cert, i - 1);
    if i == 2 {
        let q1 = &prev.q;
        let unit = BigInt::from(&cert.q0 * &prev.p);
        let inv = mod_inverse(&unit, q1).map_err(|e| e.to_string())?;
        let q1i = BigInt::from(q1.clone());
        let r = ((BigInt::from(-i32::from(prev.sigma)) * BigInt::from(inv)) - BigInt::one()).mod_floor(&q1i);
        let r = r.magnitude().clone();
        let start = match cert.mode {
            Mode::Strict => &r + q1,
            Mode::Relaxed if r.is_zero() => q1.clone(),
            Mode::Relaxed => r,
        };
        Ok((start, q1.clone()))
    } else {
        Ok((prev.q.clone(), prev.q.clone()))
    }
}

/// `m_i` is the smallest admissible candidate passing the gap test, and
/// `q_i` fits the bit budget. For an exhausted status, every candidate
/// inside the budget fails the gap test.
pub fn check_selection(cert: &Certificate, i: usize) -> CheckReport {
    let kind = CheckKind::Selection;
    let scope = Scope::Step(i);
    let (start, stride) = match candidate_class(cert, i) {
        Ok(c) => c,
        Err(e) => return CheckReport::new(kind, scope, false, e),
    };
    const MAX_SCAN: usize = 10_000;
    let exhausted_here = cert.status == (Status::BudgetExhausted { depth: i }) && i > cert.steps.len();
    let target = (!exhausted_here).then(|| big(step(cert, i).m));
    let mut m = start;
    for _ in 0..MAX_SCAN {
        if let Some(t) = &target {
            if &m > t {
                return CheckReport::new(
                    kind,
                    scope,
                    false,
                    format!("m_{i} = {t} is not in the admissible class"),
                );
            }
        }
        let passes = match candidate_passes(cert, i, &m) {
            Ok(p) => p,
            Err(e) => return CheckReport::new(kind, scope, false, e),
        };
        match (&target, passes) {
            (None, None) => {
                return CheckReport::new(
                    kind,
                    scope,
                    true,
                    format!(
                        "candidates below m = {} fail the gap test; m = {} exceeds {} bits",
                        abbreviate(&m),
                        abbreviate(&m),
                        cert.max_bits
                    ),
                )
            }
            (None, Some(true)) => {
                return CheckReport::new(
                    kind,
                    scope,
                    false,
                    format!("m = {m} passes within budget; not exhausted"),
                )
            }
            (Some(t), None) => {
                return CheckReport::new(
                    kind,
                    scope,
                    false,
                    format!("m_{i} = {t} exceeds the {}-bit budget", cert.max_bits),
                )
            }
            (Some(t), Some(true)) => {
                let ok = &m == t;
                let witness = if ok {
                    format!(
                        "m_{i} = {t} is the first admissible candidate with gap < Ψ(q_{})",
                        i - 1
                    )
                } else {
                    format!("smaller candidate m = {m} already passes the gap test")
                };
                return CheckReport::new(kind, scope, ok, witness);
            }
            (_, Some(false)) => m += &stride,
        }
    }
    CheckReport {
        check: kind,
        scope,
        verdict: Verdict::Skipped(format!("more than {MAX_SCAN} candidates")),
        mandatory: true,
        witness: String::new(),
    }
}

// ---------------------------------------------------------------- identities

/// `b^{m1}(b^{N_i} − 1) = u·q_{i−1}·q_i`.
pub fn check_identity(cert: &Certificate, i: usize) -> CheckReport {
    let b = cert.pair.base();
    // b^{N_i} has at least N_i bits; refuse to build it when it cannot match
    let rhs_bits = q_at(cert, i - 1).bits() + q_at(cert, i).bits() + 16;
    if n_at(cert, i) > rhs_bits {
        return CheckReport::new(
            CheckKind::Identity,
            Scope::Step(i),
            false,
            format!("N_{i} = {} is too large for q_{}·q_{i}", n_at(cert, i), i - 1),
        );
    }
    let lhs = pow_b(b, cert.m1) * (pow_b(b, n_at(cert, i)) - 1u32);
    let u = cert.pair.u();
    let rhs = q_at(cert, i - 1) * q_at(cert, i) * u;
    let witness = format!(
        "{b}^{}·({b}^{} − 1) = {} = {u}·{}·{}",
        cert.m1,
        n_at(cert, i),
        abbreviate(&lhs),
        abbreviate(q_at(cert, i - 1)),
        abbreviate(q_at(cert, i))
    );
    CheckReport::new(CheckKind::Identity, Scope::Step(i), lhs == rhs, witness)
}

/// `p_{i+1}q_i − q_{i+1}p_i = sigma_i`.
pub fn check_determinant(cert: &Certificate, i: usize) -> CheckReport {
    let (a, b) = (step(cert, i), step(cert, i + 1));
    let det = BigInt::from(&b.p * &a.q) - BigInt::from(&b.q * &a.p);
    let ok = det == BigInt::from(a.sigma);
    CheckReport::new(
        CheckKind::Determinant,
        Scope::Step(i),
        ok,
        format!(
            "p_{}q_{i} − q_{}p_{i} = {} (sigma_{i} = {:+})",
            i + 1,
            i + 1,
            abbreviate(&det),
            a.sigma
        ),
    )
}

// ---------------------------------------------------------------- convergents

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub quotients: Vec<BigUint>,
    pub convergents: Vec<(BigUint, BigUint)>,
}

fn convergents_of(quotients: &[BigUint]) -> Vec<(BigUint, BigUint)> {
    let (mut h0, mut h1) = (BigUint::zero(), BigUint::one());
    let (mut k0, mut k1) = (BigUint::one(), BigUint::zero());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let h = a * &h1 + &h0;
        let k = a * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h.clone());
        k0 = std::mem::replace(&mut k1, k.clone());
        out.push((h, k));
    }
    out
}

/// Canonical continued fraction of `p/q` (last quotient > 1 unless the
/// expansion is `[1]` or `[0]`) with all convergents.
pub fn euclid_convergents(p: &BigUint, q: &BigUint) -> ContinuedFraction {
    assert!(!q.is_zero(), "denominator must be positive");
    let mut quotients = Vec::new();
    let (mut a, mut b) = (p.clone(), q.clone());
    loop {
        let (d, r) = a.div_rem(&b);
        quotients.push(d);
        if r.is_zero() {
            break;
        }
        a = std::mem::replace(&mut b, r);
    }
    let convergents = convergents_of(&quotients);
    ContinuedFraction { quotients, convergents }
}

impl ContinuedFraction {
    /// The other expansion `[…, a_n − 1, 1]`, when it exists.
    pub fn alternate(&self) -> Option<ContinuedFraction> {
        let last = self.quotients.last()?;
        if self.quotients.len() < 2 && last <= &BigUint::one() {
            return None;
        }
        let mut quotients = self.quotients.clone();
        let n = quotients.len();
        quotients[n - 1] -= 1u32;
        quotients.push(BigUint::one());
        let convergents = convergents_of(&quotients);
        Some(ContinuedFraction { quotients, convergents })
    }

    pub fn quotients_string(&self) -> String {
        let mut s = String::from("[");
        for (k, a) in self.quotients.iter().enumerate() {
            if k == 1 {
                s.push_str("; ");
            } else if k > 1 {
                s.push_str(", ");
            }
            s.push_str(&abbreviate(a));
        }
        s.push(']');
        s
    }
}

/// The convergents of `p_k/q_k` with denominator at least `c1` are exactly
/// `p_1/q_1, …, p_k/q_k`; with `c1 = 1` the earlier ones lie in the set.
pub fn check_convergent_chain(cert: &Certificate) -> CheckReport {
    let kind = CheckKind::Convergents;
    let k = cert.steps.len();
    if k < 2 {
        return CheckReport::skipped(kind, Scope::Global, "needs at least two steps");
    }
    let last = step(cert, k);
    let cf = euclid_convergents(&last.p, &last.q);
    let expected: Vec<(BigUint, BigUint)> = cert.steps.iter().map(|s| (s.p.clone(), s.q.clone())).collect();
    let zero_in_set = cert.pair.digits().contains(&0);
    let matches = |cf: &ContinuedFraction| -> bool {
        let mut tail: Vec<_> = cf.convergents.iter().filter(|(_, q)| q >= &cert.c1).cloned().collect();
        // 0/1 = (0.0̄)_b is a convergent in the set whenever 0 is a digit
        if zero_in_set && tail.first().is_some_and(|(p, _)| p.is_zero()) && expected[0].0 != BigUint::zero() {
            tail.remove(0);
        }
        tail == expected
    };
    let chosen = if matches(&cf) {
        Some(cf.clone())
    } else {
        cf.alternate().filter(|alt| matches(alt))
    };
    let Some(chosen) = chosen else {
        let shown: Vec<String> = cf
            .convergents
            .iter()
            .map(|(p, q)| format!("{}/{}", abbreviate(p), abbreviate(q)))
            .collect();
        return CheckReport::new(
            kind,
            Scope::Global,
            false,
            format!("convergents {} do not match p_i/q_i", shown.join(", ")),
        );
    };
    CheckReport::new(
        kind,
        Scope::Global,
        true,
        format!(
            "p_{k}/q_{k} = {}; {} convergents",
            chosen.quotients_string(),
            chosen.convergents.len()
        ),
    )
}

// ---------------------------------------------------------------- membership

/// `p_i/q_i = (0.v w̄_i)_b` with `v`, `w_i` over `{d1, d2}`.
pub fn check_membership(cert: &Certificate, i: usize) -> CheckReport {
    let kind = CheckKind::Membership;
    let s = step(cert, i);
    let pair = &cert.pair;
    // composites only flip inside the pair, so the leaves decide the alphabet
    let mut leaf = &s.word;
    while let Some((base, _, _)) = leaf.parts() {
        leaf = base;
    }
    let alphabet_ok = leaf.digits().chain(cert.v.digits()).all(|d| pair.contains(d));
    if !alphabet_ok {
        return CheckReport::new(kind, Scope::Step(i), false, "a digit outside {d1, d2}");
    }
    match periodic_to_fraction(&cert.v, &s.word, pair.base()) {
        Ok((n, d)) => {
            let ok = &n * &s.q == &d * &s.p;
            let witness = if ok {
                format!("(0.v w̄_{i})_{} = p_{i}/q_{i}", pair.base())
            } else {
                format!(
                    "(0.v w̄_{i})_{} = {}/{} != p_{i}/q_{i}",
                    pair.base(),
                    abbreviate(&n),
                    abbreviate(&d)
                )
            };
            CheckReport::new(kind, Scope::Step(i), ok, witness)
        }
        Err(e) => CheckReport::new(kind, Scope::Step(i), false, e.to_string()),
    }
}

/// Positional check: the leading base-`b` digits of `p_i/q_i` spell
/// `v w_i w_i` and every one of them is in `D`.
pub fn check_membership_digits(cert: &Certificate, i: usize, budget: usize) -> CheckReport {
    let kind = CheckKind::MembershipDigits;
    let s = step(cert, i);
    if s.n > budget as u64 {
        return CheckReport::skipped(
            kind,
            Scope::Step(i),
            &format!("N_{i} = {} exceeds budget {budget}", s.n),
        );
    }
    let total = cert.m1.saturating_add(s.n.saturating_mul(2)).min(budget as u64);
    let b = cert.pair.base();
    let expected = cert
        .v
        .digits()
        .chain(s.word.digits())
        .chain(s.word.digits())
        .take(total as usize);
    // the first `total` digits are those of floor(p·b^total / q)
    let head = (&s.p * pow_b(b, total)) / &s.q;
    let mut got = head.to_radix_be(b);
    if got.len() > total as usize {
        return CheckReport::new(kind, Scope::Step(i), false, format!("p_{i}/q_{i} is not below 1"));
    }
    if head.is_zero() {
        got.clear();
    }
    let got = std::iter::repeat_n(0u8, total as usize - got.len()).chain(got);
    for (pos, (d, want)) in got.zip(expected).enumerate() {
        if d != want || !cert.pair.digits().contains(&d) {
            return CheckReport::new(
                kind,
                Scope::Step(i),
                false,
                format!("digit {} of p_{i}/q_{i} is {d}, expected {want}", pos + 1),
            );
        }
    }
    CheckReport::new(
        kind,
        Scope::Step(i),
        true,
        format!("{total} digits match v w_{i} w_{i}…"),
    )
}

// ---------------------------------------------------------------- gaps

/// `2u / b^{m1 + (q_{i+1}+1)N_{i+1}}`, an upper bound for `|Δ_{i+1}|` when
/// step `i+2` is absent.
fn tail_bound(cert: &Certificate, i: usize) -> ExpForm {
    let s = step(cert, i + 1);
    let e: BigInt = BigInt::from(cert.m1) + (BigInt::from(s.q.clone()) + BigInt::one()) * BigInt::from(s.n);
    ExpForm::new(cert.pair.base(), ratio(2 * i64::from(cert.pair.u()), 1), -e)
}

/// Closed form of the gap, `gap < Ψ(q_i)`, and the alternating sandwich
/// `|Δ_i| − |Δ_{i+1}| <= |ξ − p_i/q_i| < |Δ_i|`.
pub fn check_gap_bounds(cert: &Certificate, i: usize) -> CheckReport {
    let kind = CheckKind::Gap;
    let scope = Scope::Step(i);
    if i + 1 > cert.steps.len() {
        return CheckReport::skipped(kind, scope, "deepest index");
    }
    let b = cert.pair.base();
    let (a, s) = (step(cert, i), step(cert, i + 1));
    let mut errors = Vec::new();
    let d = delta(cert, i);
    let recip = ratio(BigInt::one(), BigInt::from(&a.q * &s.q));
    let gap = gap_value(cert, s.n, a.q.bits() + s.q.bits() + 16);
    match &gap {
        Some(g) if g.to_rational().is_some_and(|g| same_value(&g, &recip)) => {}
        _ => errors.push(format!("u/(b^m1(b^N_{} − 1)) != 1/(q_{i}q_{})", i + 1, i + 1)),
    }
    if !same_value(&d, &BigRational::new_raw(a.sigma.into(), recip.denom().clone())) {
        errors.push(format!("Δ_{i} != sigma_{i}/(q_{i}q_{})", i + 1));
    }
    let psi = match cert.psi.eval(&a.q, b) {
        Ok(p) => p,
        Err(e) => return CheckReport::new(kind, scope, false, e.to_string()),
    };
    let gap_form = ExpForm::from_rational(b, recip.clone());
    if compare_expforms(&gap_form, &psi) != Ordering::Less {
        errors.push(format!("gap {} is not below Ψ(q_{i}) = {psi}", gap_form));
    }
    let half = &recip / BigRational::from_integer(2.into());
    let sandwich = if i + 2 <= cert.steps.len() {
        let d2 = delta(cert, i + 1);
        if d2.is_positive() == d.is_positive() {
            errors.push(format!("Δ_{} does not alternate", i + 1));
        }
        if d2.abs() >= d.abs() {
            errors.push(format!("|Δ_{}| >= |Δ_{i}|", i + 1));
        }
        if raw_sub(&d.abs(), &d2.abs()) <= half {
            errors.push(format!("|Δ_{i}| − |Δ_{}| <= |Δ_{i}|/2", i + 1));
        }
        format!("|Δ_{}| = {}", i + 1, ExpForm::from_rational(b, d2.abs()))
    } else {
        let t = tail_bound(cert, i);
        if compare_expforms(&t, &ExpForm::from_rational(b, half)) == Ordering::Greater {
            errors.push(format!("tail bound {t} exceeds |Δ_{i}|/2"));
        }
        format!("tail <= {t}")
    };
    CheckReport::from_errors(
        kind,
        scope,
        errors,
        format!(
            "|Δ_{i}| = 1/(q_{i}q_{}) = {gap_form} < Ψ(q_{i}) = {psi}; {sandwich}",
            i + 1
        ),
    )
}

/// `b^{m_i N_{i−1}} <= q_i < b^{N_i}` with `N_0 = 1`.
pub fn check_growth(cert: &Certificate, i: usize) -> CheckReport {
    let b = cert.pair.base();
    let s = step(cert, i);
    let lo_exp = BigInt::from(s.m) * BigInt::from(n_at(cert, i - 1));
    let q = ExpForm::from_integer(b, s.q.clone());
    let lo = ExpForm::power_of_base(b, lo_exp.clone());
    let hi = ExpForm::power_of_base(b, s.n);
    let ok = compare_expforms(&lo, &q) != Ordering::Greater && compare_expforms(&q, &hi) == Ordering::Less;
    CheckReport::new(
        CheckKind::Growth,
        Scope::Step(i),
        ok,
        format!("{b}^{lo_exp} <= q_{i} ≈ {b}^{} < {b}^{}", q.floor_log(), s.n),
    )
}

// ---------------------------------------------------------------- theorem

fn log_verdict(ord: LogOrdering, want: Ordering, max_precision: u32) -> Verdict {
    match ord {
        LogOrdering::Indistinguishable => Verdict::Indistinguishable(max_precision),
        o if o == LogOrdering::from(want) => Verdict::Pass,
        _ => Verdict::Fail,
    }
}

/// Upper clause `|ξ − p_i/q_i| < min(Ψ(q_i), q_i^{−q_i})` (mandatory in
/// strict mode) and lower clause `|ξ − p_i/q_i| > Ψ(q_i) q_i^{−(1+ε)q_i}`.
pub fn check_theorem_bounds(cert: &Certificate, i: usize, max_precision: u32) -> (CheckReport, CheckReport) {
    let (ku, kl) = (CheckKind::TheoremUpper, CheckKind::TheoremLower);
    let scope = Scope::Step(i);
    if i + 1 > cert.steps.len() {
        return (
            CheckReport::skipped(ku, scope, "deepest index"),
            CheckReport::skipped(kl, scope, "deepest index"),
        );
    }
    let b = cert.pair.base();
    let (a, s) = (step(cert, i), step(cert, i + 1));
    let psi = match cert.psi.eval(&a.q, b) {
        Ok(p) => p,
        Err(e) => {
            return (
                CheckReport::new(ku, scope, false, e.to_string()),
                CheckReport::new(kl, scope, false, e.to_string()),
            )
        }
    };
    let d_abs = delta(cert, i).abs();
    if d_abs.is_zero() {
        let msg = format!("p_{i}/q_{i} equals the target");
        return (
            CheckReport::new(ku, scope, false, msg.clone()),
            CheckReport::new(kl, scope, false, msg),
        );
    }

    // upper: |Δ_i| < Ψ and |Δ_i| <= 1/q_{i+1} < q_i^{-q_i}
    let d_form = ExpForm::from_rational(b, d_abs.clone());
    let below_psi = compare_expforms(&d_form, &psi) == Ordering::Less;
    let below_recip = d_abs <= ratio(BigInt::one(), BigInt::from(s.q.clone()));
    let growth = compare_via_logs(
        &Quantity::from(ExpForm::from_integer(b, s.q.clone())),
        &Quantity::power(a.q.clone(), BigRational::from_integer(BigInt::from(a.q.clone()))),
        b,
        max_precision,
    );
    let mut upper = CheckReport {
        check: ku,
        scope,
        verdict: if !(below_psi && below_recip) {
            Verdict::Fail
        } else {
            log_verdict(growth, Ordering::Greater, max_precision)
        },
        mandatory: cert.mode == Mode::Strict,
        witness: format!(
            "|ξ − p_{i}/q_{i}| < |Δ_{i}| = {d_form}; Ψ(q_{i}) = {psi}; q_{} vs q_{i}^q_{i}: {growth:?}",
            i + 1
        ),
    };
    if !(below_psi && below_recip) {
        upper.witness.push_str(if below_psi {
            "; |Δ| > 1/q_{i+1}"
        } else {
            "; |Δ| >= Ψ"
        });
    }

    // lower: sandwich endpoint vs Ψ·q^{-(1+ε)q}
    let (lb, how) = if i + 2 <= cert.steps.len() {
        (raw_sub(&d_abs, &delta(cert, i + 1).abs()), "|Δ_i| − |Δ_{i+1}|")
    } else {
        (&d_abs / BigRational::from_integer(2.into()), "|Δ_i|/2")
    };
    let exponent = -(BigRational::one() + &cert.epsilon) * BigRational::from_integer(BigInt::from(a.q.clone()));
    let rhs = Quantity::Product(vec![
        Quantity::from(psi.clone()),
        Quantity::power(a.q.clone(), exponent),
    ]);
    let lower_ord = if lb.is_positive() {
        compare_via_logs(
            &Quantity::from(ExpForm::from_rational(b, lb.clone())),
            &rhs,
            b,
            max_precision,
        )
    } else {
        LogOrdering::Less
    };
    let lower = CheckReport {
        check: kl,
        scope,
        verdict: log_verdict(lower_ord, Ordering::Greater, max_precision),
        mandatory: false,
        witness: format!(
            "lower endpoint {how} = {} vs Ψ(q_{i})·q_{i}^(−(1+ε)q_{i}): {lower_ord:?}",
            if lb.is_positive() {
                ExpForm::from_rational(b, lb).to_string()
            } else {
                "0".into()
            }
        ),
    };
    (upper, lower)
}

// ---------------------------------------------------------------- driver

enum Task {
    Initial,
    Conditions,
    Convergents,
    Selection(usize),
    Identity(usize),
    Determinant(usize),
    Membership(usize),
    MembershipDigits(usize),
    Gap(usize),
    Growth(usize),
    Theorem(usize),
}

impl Task {
    fn identity(&self) -> (CheckKind, Scope) {
        match *self {
            Task::Initial => (CheckKind::Initial, Scope::Global),
            Task::Conditions => (CheckKind::Conditions, Scope::Global),
            Task::Convergents => (CheckKind::Convergents, Scope::Global),
            Task::Selection(i) => (CheckKind::Selection, Scope::Step(i)),
            Task::Identity(i) => (CheckKind::Identity, Scope::Step(i)),
            Task::Determinant(i) => (CheckKind::Determinant, Scope::Step(i)),
            Task::Membership(i) => (CheckKind::Membership, Scope::Step(i)),
            Task::MembershipDigits(i) => (CheckKind::MembershipDigits, Scope::Step(i)),
            Task::Gap(i) => (CheckKind::Gap, Scope::Step(i)),
            Task::Growth(i) => (CheckKind::Growth, Scope::Step(i)),
            Task::Theorem(i) => (CheckKind::TheoremUpper, Scope::Step(i)),
        }
    }
}

fn run_task(
    cert: &Certificate,
    opts: &VerifyOptions,
    t: &Task,
    wanted: &dyn Fn(CheckKind) -> bool,
) -> Vec<CheckReport> {
    match *t {
        Task::Initial => vec![check_initial(cert)],
        Task::Conditions => vec![check_conditions(cert)],
        Task::Convergents => vec![check_convergent_chain(cert)],
        Task::Selection(i) => vec![check_selection(cert, i)],
        Task::Identity(i) => vec![check_identity(cert, i)],
        Task::Determinant(i) => vec![check_determinant(cert, i)],
        Task::Membership(i) => vec![check_membership(cert, i)],
        Task::MembershipDigits(i) => vec![check_membership_digits(cert, i, opts.membership_digits)],
        Task::Gap(i) => vec![check_gap_bounds(cert, i)],
        Task::Growth(i) => vec![check_growth(cert, i)],
        Task::Theorem(i) => {
            let (u, l) = check_theorem_bounds(cert, i, opts.max_precision);
            [u, l].into_iter().filter(|r| wanted(r.check)).collect()
        }
    }
}

/// Runs the selected checks in parallel and merges the reports in a fixed
/// order. The lower-bound clause is mandatory from the first index after
/// which it holds at every checked index; below that it is informational.
pub fn verify_all(cert: &Certificate, opts: &VerifyOptions) -> VerificationReport {
    let wanted = |k: CheckKind| opts.checks.as_ref().is_none_or(|set| set.contains(&k));
    let k = cert.steps.len();
    let mut tasks = Vec::new();
    if wanted(CheckKind::Initial) {
        tasks.push(Task::Initial);
    }
    if wanted(CheckKind::Conditions) {
        tasks.push(Task::Conditions);
    }
    if wanted(CheckKind::Convergents) {
        tasks.push(Task::Convergents);
    }
    if wanted(CheckKind::Selection) {
        let last = match cert.status {
            Status::BudgetExhausted { depth } if depth == k + 1 => depth,
            _ => k,
        };
        tasks.extend((2..=last).map(Task::Selection));
    }
    for i in 1..=k {
        if wanted(CheckKind::Identity) {
            tasks.push(Task::Identity(i));
        }
        if wanted(CheckKind::Determinant) && i < k {
            tasks.push(Task::Determinant(i));
        }
        if wanted(CheckKind::Membership) {
            tasks.push(Task::Membership(i));
        }
        if wanted(CheckKind::MembershipDigits) {
            tasks.push(Task::MembershipDigits(i));
        }
        if wanted(CheckKind::Gap) {
            tasks.push(Task::Gap(i));
        }
        if wanted(CheckKind::Growth) {
            tasks.push(Task::Growth(i));
        }
        if wanted(CheckKind::TheoremUpper) || wanted(CheckKind::TheoremLower) {
            tasks.push(Task::Theorem(i));
        }
    }

    let mut reports: Vec<CheckReport> = tasks
        .par_iter()
        .flat_map_iter(|t| -> Vec<CheckReport> {
            // a malformed certificate must produce a failing report, never abort
            std::panic::catch_unwind(|| run_task(cert, opts, t, &wanted)).unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                let (check, scope) = t.identity();
                vec![CheckReport::new(check, scope, false, format!("check aborted: {msg}"))]
            })
        })
        .collect();
    reports.sort_by_key(|a| (a.check, a.scope));

    // threshold: smallest index from which every decided lower clause passes
    let lower: Vec<(usize, bool)> = reports
        .iter()
        .filter(|r| r.check == CheckKind::TheoremLower)
        .filter_map(|r| match (r.scope, &r.verdict) {
            (Scope::Step(i), Verdict::Pass) => Some((i, true)),
            (Scope::Step(i), Verdict::Fail | Verdict::Indistinguishable(_)) => Some((i, false)),
            _ => None,
        })
        .collect();
    let threshold = lower
        .iter()
        .filter(|(i, _)| lower.iter().filter(|(j, _)| j >= i).all(|(_, ok)| *ok))
        .map(|(i, _)| *i)
        .min();
    if let Some(t) = threshold {
        for r in reports.iter_mut().filter(|r| r.check == CheckKind::TheoremLower) {
            if let Scope::Step(i) = r.scope {
                r.mandatory = i >= t;
            }
        }
    }
    VerificationReport {
        reports,
        lower_bound_threshold: threshold,
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reports {
            let tag = if r.mandatory { "" } else { " [info]" };
            writeln!(
                f,
                "{:<18} {:<6} {}{tag}",
                r.check.name(),
                r.scope.to_string(),
                r.verdict
            )?;
            if !r.witness.is_empty() {
                writeln!(f, "    {}", r.witness)?;
            }
        }
        match self.lower_bound_threshold {
            Some(t) => writeln!(f, "lower-bound threshold: i >= {t}")?,
            None => writeln!(f, "lower-bound threshold: none")?,
        }
        write!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Digits of `ξ` guaranteed by a certificate: `v` followed by `w_k` repeated,
/// valid for the first `m1 + N_k` places.
pub fn guaranteed_digits(cert: &Certificate) -> (u64, impl Iterator<Item = u8> + '_) {
    let w: &DigitWord = &cert.steps.last().expect("non-empty").word;
    let n = cert.m1 + w.len();
    (n, cert.v.digits().chain(w.digits()))
}
