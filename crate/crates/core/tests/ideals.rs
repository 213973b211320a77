use std::collections::BTreeSet;

use hyperarith_core::arith::{prime_factor_set, PrimeFactors, PrimeSet};
use hyperarith_core::ideals::*;
use hyperarith_core::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL_PRIMES: [u64; 11] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

fn random_primes(rng: &mut ChaCha8Rng, min: usize) -> BTreeSet<u64> {
    let mut s: BTreeSet<u64> = SMALL_PRIMES.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
    while s.len() < min {
        s.insert(*SMALL_PRIMES.choose(rng).unwrap());
    }
    s
}

fn ps(s: &BTreeSet<u64>) -> PrimeSet {
    PrimeSet::new(s.iter().map(|p| BigInt::from(*p))).unwrap()
}

#[test]
fn filter_axioms_hold_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..500 {
        let core = random_primes(&mut rng, 1);
        // several base sets, each containing the core
        let mut base: Vec<PrimeSet> = (0..rng.gen_range(0..3)).map(|_| ps(&core.union(&random_primes(&mut rng, 0)).copied().collect())).collect();
        base.push(ps(&core));
        let f = FilterDesc::new(base.clone()).unwrap();
        assert!(!f.contains_set(&PrimeSet::empty()));
        for b in &base {
            assert!(f.contains_set(b));
        }
        let s1 = ps(&core.union(&random_primes(&mut rng, 0)).copied().collect());
        let s2 = ps(&core.union(&random_primes(&mut rng, 0)).copied().collect());
        assert!(f.contains_set(&s1.intersection(&s2)));
        let bigger = s1.union(&ps(&random_primes(&mut rng, 0)));
        assert!(f.contains_set(&bigger));
        assert!(f.contains(&PrimeFactors::All));
        // meets through gcd: pr(n) ∩ pr(m) = pr(gcd(n, m))
        let n: BigInt = ps(&core).radical() * rng.gen_range(1..50);
        let m: BigInt = ps(&core).radical() * rng.gen_range(1..50);
        let meet = prime_factor_set(&n).unwrap().intersection(&prime_factor_set(&m).unwrap());
        assert!(f.contains(&meet));
    }
}

proptest! {
    #[test]
    fn prime_factors_meet_at_gcd(n in -5000i64..5000, m in -5000i64..5000) {
        let (n, m) = (BigInt::from(n), BigInt::from(m));
        let lhs = prime_factor_set(&n).unwrap().intersection(&prime_factor_set(&m).unwrap());
        prop_assert_eq!(lhs, prime_factor_set(&n.gcd(&m)).unwrap());
    }

    #[test]
    fn hull_matches_closed_form(members in prop::collection::btree_set(0u64..=30, 0..5), window in 1u64..=30) {
        let members: BTreeSet<u64> = members.into_iter().filter(|k| *k <= window).collect();
        let t = WindowSubset::new(SemigroupModel::Nat, window, members.clone()).unwrap();
        let hull = t.convex_hull();
        // in a copy of (ℕ, +) the hull is [min T, ∞) once T has a nonzero element
        let expected: BTreeSet<u64> = match members.first() {
            None => BTreeSet::new(),
            Some(_) if members.iter().all(|k| *k == 0) => [0].into(),
            Some(lo) => (*lo..=window).collect(),
        };
        prop_assert_eq!(hull.members(), &expected);
        prop_assert_eq!(hull.convex_hull(), hull.clone());
        prop_assert!(hull.is_convex() && hull.is_subsemigroup());
        let w = t.wrep_closure();
        prop_assert!(w.is_wrep() && w.is_subsemigroup() && members.is_subset(w.members()));
        prop_assert_eq!(w.wrep_closure(), w);
    }
}

#[test]
fn galois_laws_on_random_instances() {
    let table = PrTable::new(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let g1: i64 = loop {
            let g = rng.gen_range(0..=120);
            if g != 1 {
                break g;
            }
        };
        let g2: i64 = if g1 != 0 && rng.gen_bool(0.7) {
            let divisors: Vec<i64> = (2..=g1).filter(|d| g1 % d == 0).collect();
            *divisors.choose(&mut rng).unwrap()
        } else {
            rng.gen_range(2..=60)
        };
        let core = random_primes(&mut rng, 1);
        let f1 = FilterDesc::new([ps(&core)]).unwrap();
        let sub: BTreeSet<u64> = core.iter().copied().take(rng.gen_range(1..=core.len())).collect();
        let f2 = FilterDesc::new([ps(&sub)]).unwrap();
        assert!(f1.is_subset(&f2));
        let r = galois_checks(&table, (&FGIdeal::new(g1.into()), &FGIdeal::new(g2.into())), (&f1, &f2)).unwrap();
        assert!(r.passed, "{g1} {g2} {f1} {f2}: {r:?}");
        // I(F(I)) strictly contains I exactly when the generator is not squarefree
        let squarefree = g1 != 0 && (2..=g1).all(|d| g1 % (d * d) != 0);
        assert_eq!(r.strictness_witness.is_none(), g1 == 0 || squarefree, "{g1}");
    }
}

#[test]
fn maximal_principal_filters() {
    for p in SMALL_PRIMES {
        let f = filter_of_ideal(&FGIdeal::new(p.into())).unwrap();
        assert!(is_maximal_principal_filter(&f));
        assert_eq!(ideal_of_filter(&f), FGIdeal::new(p.into()));
    }
    for n in [6u64, 10, 30, 12 * 35] {
        let f = filter_of_ideal(&FGIdeal::new(n.into())).unwrap();
        assert!(!is_maximal_principal_filter(&f));
        // properly extended by the filter of any one prime factor
        let PrimeFactors::Finite(core) = f.core() else { panic!() };
        let p = core.iter().next().unwrap().clone();
        let larger = FilterDesc::principal(&p).unwrap();
        assert!(f.is_subset(&larger) && !larger.is_subset(&f));
    }
}

#[test]
fn radical_iff_prime_exhaustively() {
    for model in [SemigroupModel::Nat, SemigroupModel::PPower { p: 2 }, SemigroupModel::NonNegRat { den: 3 }] {
        let r = radical_prime_exhaustive(model, 12).unwrap();
        assert!(r.equivalence_holds, "{r:?}");
        assert!(r.prime_implies_radical, "{r:?}");
    }
}

/// `r ∈ I(T)` straight from `I(T) = ⋃_{n∈T} ν⁻¹([n, ∞])` in `ℤ_(p)`.
fn in_i_of_t(p: i64, t: &WindowSubset, r: &Rational) -> bool {
    if *r == Rational::from_integer(0.into()) {
        return true;
    }
    let v = |mut x: BigInt| {
        let mut e = 0i64;
        while (&x % p) == BigInt::from(0) {
            x /= p;
            e += 1;
        }
        e
    };
    let val = v(r.numer().clone()) - v(r.denom().clone());
    t.members().iter().any(|n| val >= *n as i64)
}

#[test]
fn valuation_correspondence() {
    let window = 60;
    for p in [2i64, 3, 5] {
        let dvr = Dvr::new(p.into(), window).unwrap();
        for k in 1..=50 {
            let s = dvr.s_of_i(k).unwrap();
            assert_eq!(dvr.i_of_t(&s).unwrap().k, k);
            assert!(s.is_wrep() && s.is_subsemigroup());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
        for _ in 0..100 {
            let members: Vec<u64> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(1..=50)).collect();
            let t = WindowSubset::new(SemigroupModel::Nat, window, members).unwrap();
            let i = dvr.i_of_t(&t).unwrap();
            assert_eq!(dvr.s_of_i(i.k).unwrap(), t.wrep_closure());
            for _ in 0..20 {
                let e = rng.gen_range(0..55u32);
                let u = loop {
                    let u = rng.gen_range(1..40i64);
                    if u % p != 0 {
                        break u;
                    }
                };
                let w = loop {
                    let w = rng.gen_range(1..40i64);
                    if w % p != 0 {
                        break w;
                    }
                };
                let r = Rational::new(BigInt::from(p).pow(e) * u, w.into());
                assert_eq!(i.contains(&r), in_i_of_t(p, &t, &r), "{r} in {i}");
            }
        }
    }
}
