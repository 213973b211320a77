use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ArithError;

/// Deterministic Miller–Rabin with bases 2..=17 is exact below this value.
pub const MILLER_RABIN_LIMIT: u64 = 341_550_071_728_321;

const MR_BASES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

pub const DEFAULT_SIEVE_BOUND: u64 = 1_000_000;

static DEFAULT_SIEVE: OnceLock<Sieve> = OnceLock::new();

/// Primes up to a fixed bound, used for trial-division factoring.
#[derive(Debug, Clone)]
pub struct Sieve {
    bound: u64,
    primes: Vec<u64>,
}

impl Sieve {
    pub fn new(bound: u64) -> Self {
        let bound = bound.max(2);
        let n = bound as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        Sieve { bound, primes }
    }

    /// The process-wide sieve with bound 10^6.
    pub fn shared() -> &'static Sieve {
        DEFAULT_SIEVE.get_or_init(|| Sieve::new(DEFAULT_SIEVE_BOUND))
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Factors a positive integer into `prime -> exponent`.
    ///
    /// Trial division runs over the sieve primes. A leftover cofactor is
    /// accepted as prime when it is below `bound²` or certified by
    /// Miller–Rabin; anything else is reported as out of range.
    pub fn factor(&self, n: &BigInt) -> Result<BTreeMap<BigInt, u64>, ArithError> {
        if !n.is_positive() {
            return Err(ArithError::ZeroArgument);
        }
        if let Some(small) = n.to_u64() {
            return self.factor_u64(small).map(|m| {
                m.into_iter().map(|(p, e)| (BigInt::from(p), e)).collect()
            });
        }
        let mut rest = n.clone();
        let mut out = BTreeMap::new();
        for &p in &self.primes {
            let pb = BigInt::from(p);
            if &pb * &pb > rest {
                break;
            }
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.insert(pb, e);
            }
            if let Some(small) = rest.to_u64() {
                for (q, f) in self.factor_u64(small)? {
                    *out.entry(BigInt::from(q)).or_insert(0) += f;
                }
                return Ok(out);
            }
        }
        if !rest.is_one() {
            self.accept_cofactor(&rest)?;
            *out.entry(rest).or_insert(0) += 1;
        }
        Ok(out)
    }

    fn factor_u64(&self, mut n: u64) -> Result<BTreeMap<u64, u64>, ArithError> {
        let mut out = BTreeMap::new();
        for &p in &self.primes {
            if p.saturating_mul(p) > n {
                break;
            }
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.insert(p, e);
            }
        }
        if n > 1 {
            self.accept_cofactor(&BigInt::from(n))?;
            *out.entry(n).or_insert(0) += 1;
        }
        Ok(out)
    }

    // Every prime <= min(bound, sqrt(rest)) has been divided out already.
    fn accept_cofactor(&self, rest: &BigInt) -> Result<(), ArithError> {
        let b = BigInt::from(self.bound);
        if rest < &(&b * &b) {
            return Ok(());
        }
        match rest.to_u64() {
            Some(r) if r < MILLER_RABIN_LIMIT && miller_rabin(r) => Ok(()),
            _ => Err(ArithError::FactorBoundExceeded {
                cofactor: rest.clone(),
                bound: self.bound,
            }),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
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

fn miller_rabin(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// True iff `x` is a positive prime.
///
/// Exact below [`MILLER_RABIN_LIMIT`]. Above it, numbers with a small
/// factor are still rejected; anything else is `OutOfRange`.
pub fn is_prime(x: &BigInt) -> Result<bool, ArithError> {
    if x <= &BigInt::one() {
        return Ok(false);
    }
    match x.to_u64() {
        Some(v) if v < MILLER_RABIN_LIMIT => Ok(miller_rabin(v)),
        _ => {
            for &p in Sieve::shared().primes().iter().take(1000) {
                if (x % p).is_zero() {
                    return Ok(false);
                }
            }
            Err(ArithError::OutOfRange(x.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(miller_rabin(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_are_rejected() {
        // strong pseudoprimes to several small bases
        for n in [2047u64, 1_373_653, 25_326_001, 3_215_031_751, 2_152_302_898_747, 3_474_749_660_383] {
            assert!(!miller_rabin(n), "{n}");
        }
        assert!(miller_rabin(1_000_000_007));
        assert!(miller_rabin(MILLER_RABIN_LIMIT - 2) == trial_is_prime_big(MILLER_RABIN_LIMIT - 2));
    }

    fn trial_is_prime_big(n: u64) -> bool {
        let mut d = 2u64;
        while d.saturating_mul(d) <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        n >= 2
    }

    #[test]
    fn above_limit_is_out_of_range_unless_small_factor() {
        let big = BigInt::from(MILLER_RABIN_LIMIT) * 1_000_003u64 + 0u32;
        // divisible by 1_000_003 only, which is past the first 1000 primes
        assert!(matches!(is_prime(&big), Err(ArithError::OutOfRange(_))));
        let even = BigInt::from(MILLER_RABIN_LIMIT) * 2u32;
        assert_eq!(is_prime(&even), Ok(false));
    }

    #[test]
    fn factor_small_and_beyond_u64() {
        let s = Sieve::new(1000);
        let f = s.factor(&BigInt::from(360u32)).unwrap();
        assert_eq!(f.get(&BigInt::from(2)), Some(&3));
        assert_eq!(f.get(&BigInt::from(3)), Some(&2));
        assert_eq!(f.get(&BigInt::from(5)), Some(&1));

        let n = BigInt::from(u64::MAX) * BigInt::from(4u32);
        let f = Sieve::shared().factor(&n).unwrap();
        let back: BigInt = f.iter().map(|(p, e)| p.pow(*e as u32)).product();
        assert_eq!(back, n);
    }

    #[test]
    fn cofactor_beyond_bound_squared_errors() {
        let s = Sieve::new(100);
        // 101 * 103 > 100^2 and composite
        let n = BigInt::from(101u32 * 103);
        assert!(matches!(s.factor(&n), Err(ArithError::FactorBoundExceeded { .. })));
        // a prime above bound^2 is certified by Miller-Rabin
        assert!(s.factor(&BigInt::from(10_007u32)).is_ok());
    }
}
