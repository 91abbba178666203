//! Elementary number theory: the `u = u1·u2` split, Euler's totient, modular
//! inverses, valuations, and the choice of `m1`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use thiserror::Error;

use crate::words::{periodic_to_rational, DigitPair, DigitWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumthError {
    #[error("{a} has no inverse modulo {n}")]
    NotInvertible { a: BigInt, n: BigUint },
    #[error("factorization of {0} gave up after the iteration budget")]
    FactorBudget(u64),
    #[error("argument must be positive")]
    NonPositive,
    #[error("construction invariant violated: {0}")]
    Invariant(String),
}

/// `u = u1·u2`, where the primes of `u1` all divide `b` and `u2` is coprime to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct USplit {
    pub u: u64,
    pub u1: u64,
    pub u2: u64,
}

pub fn split_u(u: u64, b: u64) -> USplit {
    assert!(u >= 1, "split_u needs u >= 1");
    let mut rest = u;
    let mut u1 = 1;
    let mut g = rest.gcd(&b);
    while g > 1 {
        u1 *= g;
        rest /= g;
        g = rest.gcd(&b);
    }
    USplit { u, u1, u2: rest }
}

/// Largest `e` with `p^e | n`.
pub fn valuation(p: u64, n: &BigUint) -> u32 {
    assert!(p >= 2, "valuation needs a prime p");
    let mut e = 0;
    let mut n = n.clone();
    let (mut q, mut r) = n.div_rem(&BigUint::from(p));
    while n > BigUint::zero() && r.is_zero() {
        e += 1;
        n = q;
        (q, r) = n.div_rem(&BigUint::from(p));
    }
    e
}

/// `x ∈ [0, n)` with `a·x ≡ 1 (mod n)`.
pub fn mod_inverse(a: &BigInt, n: &BigUint) -> Result<BigUint, NumthError> {
    if n.is_zero() {
        return Err(NumthError::NonPositive);
    }
    let modulus = BigInt::from(n.clone());
    let reduced = a.mod_floor(&modulus);
    let egcd = reduced.extended_gcd(&modulus);
    if !egcd.gcd.is_one() {
        if n.is_one() {
            return Ok(BigUint::zero());
        }
        return Err(NumthError::NotInvertible {
            a: a.clone(),
            n: n.clone(),
        });
    }
    Ok(egcd.x.mod_floor(&modulus).magnitude().clone())
}

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_BUDGET: u64 = 1 << 24;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `u64` (first twelve prime bases).
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard's rho; returns a non-trivial factor of the
/// composite `n`.
fn rho(n: u64) -> Result<u64, NumthError> {
    if n.is_multiple_of(2) {
        return Ok(2);
    }
    let mut spent = 0u64;
    for c in 1..n {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
            spent += r;
            if spent > RHO_BUDGET {
                return Err(NumthError::FactorBudget(n));
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Ok(g);
        }
    }
    Err(NumthError::FactorBudget(n))
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>, NumthError> {
    if n == 0 {
        return Err(NumthError::NonPositive);
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p < TRIAL_LIMIT && p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = Vec::new();
    if rest > 1 {
        stack.push(rest);
    }
    let mut big = Vec::new();
    while let Some(m) = stack.pop() {
        if m < TRIAL_LIMIT * TRIAL_LIMIT && m < p * p || is_prime_u64(m) {
            big.push(m);
        } else {
            let f = rho(m)?;
            stack.push(f);
            stack.push(m / f);
        }
    }
    big.sort_unstable();
    for q in big {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    Ok(out)
}

/// Euler's totient via factorization.
pub fn euler_phi(n: u64) -> Result<u64, NumthError> {
    Ok(factorize(n)?
        .into_iter()
        .fold(1u64, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1)))
}

/// `m1` and `N = m1 + 1`: `m1 = 0` when `d2 = 1`, otherwise
/// `N = φ(u2²(b−1)²)`. Postconditions `u1 | b^{m1}` and `u2·q1 = b^N − 1`
/// are checked here.
pub fn choose_m1(pair: &DigitPair) -> Result<(u64, u64), NumthError> {
    let b = u64::from(pair.base());
    let split = split_u(u64::from(pair.u()), b);
    let (m1, n) = if pair.d2() == 1 {
        (0, 1)
    } else {
        let arg = (split.u2 * (b - 1))
            .checked_pow(2)
            .ok_or_else(|| NumthError::Invariant("u2²(b−1)² overflows".into()))?;
        let n = euler_phi(arg)?;
        (n - 1, n)
    };
    let bb = BigUint::from(b);
    let b_m1 = Pow::pow(&bb, m1);
    if !(&b_m1 % split.u1).is_zero() {
        return Err(NumthError::Invariant(format!("u1 = {} does not divide b^m1", split.u1)));
    }
    let v = DigitWord::literal(vec![pair.d1(); m1 as usize]);
    let mut w1 = vec![pair.d2()];
    w1.extend(std::iter::repeat_n(pair.d1(), m1 as usize));
    let r = periodic_to_rational(&v, &DigitWord::literal(w1), pair.base())
        .map_err(|e| NumthError::Invariant(e.to_string()))?;
    let lhs = BigInt::from(split.u2) * r.denom();
    if lhs != BigInt::from(Pow::pow(&bb, n) - 1u32) {
        return Err(NumthError::Invariant(format!("u2·q1 = {lhs} differs from b^N − 1")));
    }
    Ok((m1, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_phi(n: u64) -> u64 {
        (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_u(2, 3), USplit { u: 2, u1: 1, u2: 2 });
        assert_eq!(split_u(6, 12), USplit { u: 6, u1: 6, u2: 1 });
        assert_eq!(split_u(12, 10), USplit { u: 12, u1: 4, u2: 3 });
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(16).unwrap(), naive_phi(16));
        assert_eq!(euler_phi(16).unwrap(), 8);
        assert_eq!(euler_phi(36).unwrap(), 12);
        assert_eq!(euler_phi(0), Err(NumthError::NonPositive));
    }

    #[test]
    fn factorization_beyond_trial_range() {
        // 1_000_003 and 1_000_033 are both prime, so the product needs rho
        let n = 1_000_003u64 * 1_000_033;
        assert_eq!(factorize(n).unwrap(), vec![(1_000_003, 1), (1_000_033, 1)]);
        assert_eq!(euler_phi(n).unwrap(), 1_000_002 * 1_000_032);
        let p = 18_446_744_073_709_551_557u64; // largest prime below 2^64
        assert!(is_prime_u64(p));
        assert_eq!(factorize(p).unwrap(), vec![(p, 1)]);
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        let sq = 4_294_967_291u64 * 4_294_967_291; // (largest 32-bit prime)^2
        assert_eq!(factorize(sq).unwrap(), vec![(4_294_967_291, 2)]);
    }

    #[test]
    fn inverse_examples() {
        let inv = |a: i64, n: u64| mod_inverse(&BigInt::from(a), &BigUint::from(n));
        assert_eq!(inv(1, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(inv(3, 10).unwrap(), BigUint::from(7u32));
        let x = inv(2187, 3280).unwrap();
        // brute-force oracle
        let expected = (0u64..3280).find(|x| 2187 * x % 3280 == 1).unwrap();
        assert_eq!(x, BigUint::from(expected));
        assert_eq!(x, BigUint::from(3u32));
        assert_eq!(inv(-1, 7).unwrap(), BigUint::from(6u32));
        assert!(inv(4, 10).is_err());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(2, &BigUint::from(16u32)), 4);
        assert_eq!(valuation(3, &BigUint::from(10u32)), 0);
        assert_eq!(valuation(2, &BigUint::from(6560u32)), 5);
    }

    #[test]
    fn m1_examples() {
        let p = DigitPair::new(3, &[0, 1], None).unwrap();
        assert_eq!(choose_m1(&p).unwrap(), (0, 1));
        let p = DigitPair::new(3, &[0, 2], None).unwrap();
        assert_eq!(choose_m1(&p).unwrap(), (7, 8));
        let p = DigitPair::new(4, &[0, 3], None).unwrap();
        assert_eq!(split_u(3, 4), USplit { u: 3, u1: 1, u2: 3 });
        assert_eq!(choose_m1(&p).unwrap(), (53, 54));
    }

    #[test]
    fn m1_condition_holds_for_all_small_bases() {
        for b in 3u32..=12 {
            for d1 in 0..b as u8 {
                for d2 in d1 + 1..b as u8 {
                    let pair = DigitPair::new(b, &[d1, d2], None).unwrap();
                    let (m1, n) = choose_m1(&pair).unwrap_or_else(|e| panic!("b={b} ({d1},{d2}): {e}"));
                    assert_eq!(n, m1 + 1);
                }
            }
        }
    }

    #[test]
    fn phi_agrees_with_naive_count() {
        for n in 1..=10_000u64 {
            assert_eq!(euler_phi(n).unwrap(), naive_phi(n), "n = {n}");
        }
    }

    proptest! {
        #[test]
        fn split_invariants(u in 1u64..=10_000, b in 2u64..=64) {
            let s = split_u(u, b);
            prop_assert_eq!(s.u1 * s.u2, u);
            prop_assert_eq!(s.u2.gcd(&b), 1);
            // every prime of u1 divides b: u1 | b^k for k = bits(u1)
            let b_pow = BigUint::from(b).pow(64u32);
            prop_assert!((b_pow % s.u1).is_zero());
        }
    }
}
