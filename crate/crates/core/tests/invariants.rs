mod common;

use cantor_convergents::build::{run, Mode};
use cantor_convergents::verify::euclid_convergents;
use cantor_convergents::words::{in_cantor, periodic_to_fraction, ratio, rational_to_expansion, DigitWord};
use cantor_convergents::{verify_all, Certificate, VerifyOptions};
use common::*;
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

fn arb_pair() -> impl Strategy<Value = (u32, u8, u8)> {
    (3u32..=8)
        .prop_flat_map(|b| (Just(b), 0..b as u8 - 1))
        .prop_flat_map(|(b, d1)| (Just(b), Just(d1), d1 + 1..b as u8))
}

fn arb_psi() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["1", "q^-1", "q^-2", "1/2 * q^-2", "min(q^-3, 1/7)"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructed_certificates_verify((b, d1, d2) in arb_pair(), psi in arb_psi(), strict in any::<bool>()) {
        let mode = if strict { Mode::Strict } else { Mode::Relaxed };
        let cert = run(params(b, &[d1, d2], psi, mode, 3, 40_000)).unwrap();
        let report = verify_all(&cert, &VerifyOptions::default());
        prop_assert!(report.passed(), "{}", report);
        prop_assert_eq!(Certificate::from_json(&cert.to_json()).unwrap().to_json(), cert.to_json());
    }

    #[test]
    fn recurrences_hold_at_every_step((b, d1, d2) in arb_pair()) {
        let cert = run(params(b, &[d1, d2], "1", Mode::Relaxed, 3, 40_000)).unwrap();
        let u = BigUint::from(cert.pair.u());
        let bb = BigUint::from(b);
        let mut prev_q = cert.q0.clone();
        for s in &cert.steps {
            // b^m1 (b^N − 1) = u q_{i−1} q_i
            let lhs = bb.pow(cert.m1 as u32) * (bb.pow(s.n as u32) - 1u32);
            prop_assert_eq!(lhs, &u * &prev_q * &s.q);
            prev_q = s.q.clone();
        }
        for w in cert.steps.windows(2) {
            let det = BigInt::from(&w[1].p * &w[0].q) - BigInt::from(&w[1].q * &w[0].p);
            prop_assert_eq!(det, BigInt::from(w[0].sigma));
        }
        if let Some(last) = cert.steps.last() {
            let cf = euclid_convergents(&last.p, &last.q);
            for s in &cert.steps {
                prop_assert!(cf.convergents.contains(&(s.p.clone(), s.q.clone())));
            }
        }
    }

    #[test]
    fn constructed_fractions_lie_in_the_set((b, d1, d2) in arb_pair()) {
        let cert = run(params(b, &[d1, d2], "1", Mode::Relaxed, 2, 4_000)).unwrap();
        for s in &cert.steps {
            let x = ratio(BigInt::from(s.p.clone()), BigInt::from(s.q.clone()));
            prop_assert!(in_cantor(&x, &cert.pair, 10_000).unwrap());
        }
    }

    #[test]
    fn any_edited_fraction_is_rejected((b, d1, d2) in arb_pair(), step in 0usize..3, which in any::<bool>(), up in any::<bool>()) {
        let cert = run(params(b, &[d1, d2], "1", Mode::Relaxed, 3, 40_000)).unwrap();
        let i = step % cert.steps.len();
        let mut doc: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        let field = if which { "p" } else { "q" };
        let old: BigUint = doc["steps"][i][field].as_str().unwrap().parse().unwrap();
        let new = if up { old + 1u32 } else if old > BigUint::from(1u32) { old - 1u32 } else { old + 2u32 };
        doc["steps"][i][field] = serde_json::Value::from(new.to_string());
        let tampered = Certificate::from_json(&doc.to_string()).unwrap();
        prop_assert!(!verify_all(&tampered, &VerifyOptions::default()).passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn expansions_round_trip(b in 2u32..=36, q in 1u64..=100_000, p in 0u64..=100_000) {
        let p = p % (q + 1);
        let x = ratio(p, q);
        let e = rational_to_expansion(&x, b, 200_000).unwrap();
        let (n, d) = periodic_to_fraction(&DigitWord::literal(e.preperiod.clone()), &DigitWord::literal(e.period.clone()), b).unwrap();
        prop_assert_eq!(n * q, d * p);
    }
}
