use hyperarith_core::arith::*;
use hyperarith_core::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn naive_is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Exponent of `p` in a nonzero integer, by repeated division.
fn strip(p: u64, mut n: BigInt) -> i64 {
    let mut e = 0;
    while (&n % p).is_zero() {
        n /= p;
        e += 1;
    }
    e
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=1_000_000_000, 1i64..=1_000_000_000, any::<bool>())
        .prop_map(|(n, d, neg)| Rational::new(BigInt::from(if neg { -n } else { n }), d.into()))
}

proptest! {
    #[test]
    fn embedding_round_trips(x in nonzero_rational()) {
        let f = factor_embed(&x).unwrap();
        prop_assert_eq!(factor_reconstruct(&f).unwrap(), x.clone());
        prop_assert_eq!(f.sign == Sign::Minus, x.is_negative());
        for (p, e) in &f.exps {
            prop_assert!(*e != 0 && is_prime(p).unwrap());
            let p64: u64 = p.try_into().unwrap();
            prop_assert_eq!(*e, strip(p64, x.numer().abs()) - strip(p64, x.denom().clone()));
        }
    }

    #[test]
    fn embedding_separates(x in nonzero_rational(), y in nonzero_rational()) {
        prop_assert_eq!(factor_embed(&x).unwrap() == factor_embed(&y).unwrap(), x == y);
    }

    #[test]
    fn valuation_is_a_valuation(a in nonzero_rational(), b in nonzero_rational(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 9973])) {
        let pb = BigInt::from(p);
        let (va, vb) = (vp(&pb, &a).unwrap().exp, vp(&pb, &b).unwrap().exp);
        prop_assert_eq!(vp(&pb, &(&a * &b)).unwrap().exp, va + vb);
        let s = &a + &b;
        if !s.is_zero() {
            let vs = vp(&pb, &s).unwrap().exp;
            prop_assert!(vs >= va.min(vb));
            if va != vb {
                prop_assert_eq!(vs, va.min(vb));
            }
        }
        prop_assert_eq!(vp(&pb, &a).unwrap().value() * vp(&pb, &b).unwrap().value(), vp(&pb, &(&a * &b)).unwrap().value());
    }

    #[test]
    fn primality_matches_trial_division(n in 0u64..200_000) {
        prop_assert_eq!(is_prime(&BigInt::from(n)).unwrap(), naive_is_prime(n));
    }

    #[test]
    fn four_squares_witnesses_sum(n in 0u64..100_000) {
        let w = four_squares_witness(&BigInt::from(n)).unwrap();
        prop_assert_eq!(w.iter().map(|x| x * x).sum::<BigInt>(), BigInt::from(n));
    }

    #[test]
    fn gcd_ideal_generates(n in -500i64..500, m in -500i64..500) {
        prop_assume!(n != 0 || m != 0);
        let g = gcd_ideal(&BigInt::from(n), &BigInt::from(m)).unwrap();
        prop_assert!(g.is_positive());
        prop_assert!((BigInt::from(n) % &g).is_zero() && (BigInt::from(m) % &g).is_zero());
        // some combination a·n + b·m reaches g
        let reached = (-500i64..=500).any(|a| {
            let rest = &g - BigInt::from(a * n);
            if m == 0 { rest.is_zero() } else { (&rest % m).is_zero() }
        });
        prop_assert!(reached);
    }
}

#[test]
fn zero_is_rejected() {
    let zero = Rational::from_integer(0.into());
    assert_eq!(factor_embed(&zero), Err(ArithError::ZeroArgument));
    assert_eq!(vp(&BigInt::from(2), &zero), Err(ArithError::ZeroArgument));
}

#[test]
fn heights_enumerate_each_rational_once() {
    let all = rationals_up_to_height(12);
    let mut seen = std::collections::BTreeSet::new();
    for x in &all {
        assert!(height(x) <= BigInt::from(12));
        assert!(seen.insert(x.clone()), "{x} twice");
    }
    // 0 and ±a/b with coprime 1 ≤ a, b ≤ 12
    let coprime = (1..=12u64)
        .flat_map(|a| (1..=12u64).map(move |b| (a, b)))
        .filter(|&(a, b)| num_integer::gcd(a, b) == 1)
        .count();
    assert_eq!(all.len(), 1 + 2 * coprime);
}
