//! Randomized invariants via proptest, complementing the seeded
//! acceptance families with shrinkable counterexamples.

use ldolc_core::dp::bellman_backstep;
use ldolc_core::problem::LdoLcProblem;
use ldolc_core::pwl::PwlConcaveFn;
use ldolc_core::rational::{format_rat, parse_rat, rat, Rat};
use ldolc_core::sequence::{geom_pair_sign_ok, TailedSequence};
use num::{BigInt, BigRational, Signed, Zero};
use proptest::prelude::*;

fn big_rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational() -> impl Strategy<Value = Rat> {
    (-1000i64..=1000, 1i64..=1000).prop_map(|(n, d)| big_rat(n, d))
}

fn small_nonneg() -> impl Strategy<Value = Rat> {
    (0i64..=16, 1i64..=16).prop_map(|(n, d)| big_rat(n, d))
}

proptest! {
    /// Formatting then parsing a rational is the identity.
    #[test]
    fn rational_text_round_trip(r in rational()) {
        prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
    }

    /// Decimal literals parse to the exact scaled integer.
    #[test]
    fn decimal_parsing_is_exact(n in -9999i64..=9999) {
        let sign = if n < 0 { "-" } else { "" };
        let text = format!("{}{}.{:02}", sign, (n / 100).abs(), (n % 100).abs());
        let expected = big_rat(n, 100);
        prop_assert_eq!(parse_rat(&text).unwrap(), expected);
    }

    /// The finite sign decision for `A r1^k + B r2^k` matches direct
    /// evaluation over a long sampled range of exponents.
    #[test]
    fn geom_pair_decision_matches_pointwise(
        a in rational(), b in rational(),
        (n1, n2) in (-4i64..=4, -4i64..=4),
    ) {
        let r1 = big_rat(n1, 4);
        let r2 = big_rat(n2, 4);
        let verdict = geom_pair_sign_ok(&a, &r1, &b, &r2, false);
        let mut t1 = Rat::from_integer(1.into());
        let mut t2 = t1.clone();
        let mut first_bad = None;
        for k in 0..=40usize {
            if (&a * &t1 + &b * &t2).is_negative() {
                first_bad = Some(k);
                break;
            }
            t1 *= &r1;
            t2 *= &r2;
        }
        match (verdict, first_bad) {
            (Ok(()), None) => {}
            (Err(k), Some(j)) => prop_assert_eq!(k, j),
            (Ok(()), Some(j)) => prop_assert!(false, "missed failure at k = {}", j),
            // A rejection beyond the sampled range is consistent.
            (Err(k), None) => prop_assert!(k > 40, "spurious failure at k = {}", k),
        }
    }

    /// One Bellman backstep of a concave function is concave and never
    /// falls below the myopic payoff `p x` (the zero next state is always
    /// admissible and the continuation is nonnegative at zero here).
    #[test]
    fn backstep_preserves_concavity(
        p0 in rational(),
        c0 in small_nonneg(),
        v_slope in (-8i64..=8).prop_map(|n| big_rat(n, 4)),
    ) {
        let b = rat(1, 1);
        let problem = LdoLcProblem::new(
            b.clone(),
            TailedSequence::zero_tailed(vec![p0.clone()]),
            TailedSequence::zero_tailed(vec![c0]),
            TailedSequence::zero(),
        );
        let v_next = PwlConcaveFn::linear(&v_slope, &b);
        let v = bellman_backstep(&problem, 0, &v_next);
        prop_assert!(v.is_concave());
        for k in 0..=8i64 {
            let x = big_rat(k, 8);
            let myopic = &p0 * &x + v_next.eval(&Rat::zero()).unwrap().max(Rat::zero());
            prop_assert!(v.eval(&x).unwrap() >= myopic);
        }
    }
}
