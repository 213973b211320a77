//! Exact arithmetic on ℤ and ℚ: p-adic valuations, sign, gcd, prime-factor
//! sets and the signed factorization embedding of ℚ^×.

mod primes;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use primes::{is_prime, Sieve, DEFAULT_SIEVE_BOUND, MILLER_RABIN_LIMIT};

pub type Integer = BigInt;
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("gcd_ideal(0, 0) is undefined")]
    BothZero,
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("{0} must be a positive integer")]
    NotPositive(BigInt),
    #[error("{0} is beyond the deterministic primality range")]
    OutOfRange(BigInt),
    #[error("cofactor {cofactor} has no factor up to the sieve bound {bound} and cannot be certified prime")]
    FactorBoundExceeded { cofactor: BigInt, bound: u64 },
    #[error("malformed factorization: {0}")]
    MalformedFactorization(String),
}

/// Nonnegative generator of the ideal `nℤ + mℤ`.
pub fn gcd_ideal<T>(n: &T, m: &T) -> Result<T, ArithError>
where
    T: num_integer::Integer + Signed + Clone,
{
    if n.is_zero() && m.is_zero() {
        return Err(ArithError::BothZero);
    }
    Ok(n.gcd(m).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.as_i8()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// `p^exp`, an element of the multiplicative value group of the p-adic valuation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub p: BigInt,
    pub exp: i64,
}

impl PrimePower {
    pub fn value(&self) -> Rational {
        let mag = num_traits::pow(self.p.clone(), self.exp.unsigned_abs() as usize);
        if self.exp >= 0 {
            Rational::from_integer(mag)
        } else {
            Rational::new(BigInt::one(), mag)
        }
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.exp)
    }
}

/// Image of a nonzero rational under `a ↦ (v_p(a))_p × sgn(a)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedFactorization {
    pub sign: Sign,
    pub exps: BTreeMap<BigInt, i64>,
}

impl SignedFactorization {
    pub fn one() -> Self {
        SignedFactorization { sign: Sign::Plus, exps: BTreeMap::new() }
    }
}

/// A finite set of primes, the desk model of `pr(n)` for `n ∉ {0, ±1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeSet(BTreeSet<BigInt>);

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet(BTreeSet::new())
    }

    /// Builds a set after checking every member is prime.
    pub fn new<I: IntoIterator<Item = BigInt>>(items: I) -> Result<Self, ArithError> {
        let set: BTreeSet<BigInt> = items.into_iter().collect();
        for p in &set {
            if !is_prime(p)? {
                return Err(ArithError::NotPrime(p.clone()));
            }
        }
        Ok(PrimeSet(set))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, p: &BigInt) -> bool {
        self.0.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BigInt> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.0.union(&other.0).cloned().collect())
    }

    /// Squarefree product of the members; 1 for the empty set.
    pub fn radical(&self) -> BigInt {
        self.0.iter().product()
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// `pr(n)`: either a finite prime set or, for `n = 0`, every prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimeFactors {
    All,
    Finite(PrimeSet),
}

impl PrimeFactors {
    pub fn is_subset(&self, other: &PrimeFactors) -> bool {
        match (self, other) {
            (_, PrimeFactors::All) => true,
            (PrimeFactors::All, PrimeFactors::Finite(_)) => false,
            (PrimeFactors::Finite(a), PrimeFactors::Finite(b)) => a.is_subset(b),
        }
    }

    pub fn intersection(&self, other: &PrimeFactors) -> PrimeFactors {
        match (self, other) {
            (PrimeFactors::All, x) | (x, PrimeFactors::All) => x.clone(),
            (PrimeFactors::Finite(a), PrimeFactors::Finite(b)) => {
                PrimeFactors::Finite(a.intersection(b))
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PrimeFactors::Finite(s) if s.is_empty())
    }
}

impl fmt::Display for PrimeFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeFactors::All => write!(f, "ALL"),
            PrimeFactors::Finite(s) => s.fmt(f),
        }
    }
}

fn require_prime(p: &BigInt) -> Result<(), ArithError> {
    if is_prime(p)? {
        Ok(())
    } else {
        Err(ArithError::NotPrime(p.clone()))
    }
}

fn int_valuation(p: &BigInt, n: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        n = q;
        e += 1;
    }
}

/// The p-adic value of a nonzero rational, returned as `p^v`.
pub fn vp(p: &BigInt, x: &Rational) -> Result<PrimePower, ArithError> {
    require_prime(p)?;
    if x.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let exp = int_valuation(p, x.numer()) - int_valuation(p, x.denom());
    Ok(PrimePower { p: p.clone(), exp })
}

pub fn sign(x: &Rational) -> Result<Sign, ArithError> {
    if x.is_zero() {
        Err(ArithError::ZeroArgument)
    } else if x.is_positive() {
        Ok(Sign::Plus)
    } else {
        Ok(Sign::Minus)
    }
}

/// Signed factorization with the shared 10^6 sieve.
pub fn factor_embed(x: &Rational) -> Result<SignedFactorization, ArithError> {
    factor_embed_with(Sieve::shared(), x)
}

pub fn factor_embed_with(sieve: &Sieve, x: &Rational) -> Result<SignedFactorization, ArithError> {
    let sign = sign(x)?;
    let mut exps = BTreeMap::new();
    for (p, e) in sieve.factor(&x.numer().abs())? {
        exps.insert(p, e as i64);
    }
    for (p, e) in sieve.factor(x.denom())? {
        // numerator and denominator are coprime
        exps.insert(p, -(e as i64));
    }
    Ok(SignedFactorization { sign, exps })
}

pub fn factor_reconstruct(f: &SignedFactorization) -> Result<Rational, ArithError> {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (p, &e) in &f.exps {
        if e == 0 {
            return Err(ArithError::MalformedFactorization(format!("zero exponent at {p}")));
        }
        if !is_prime(p)? {
            return Err(ArithError::MalformedFactorization(format!("{p} is not prime")));
        }
        let pe = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
        if e > 0 {
            num *= pe;
        } else {
            den *= pe;
        }
    }
    if f.sign == Sign::Minus {
        num = -num;
    }
    Ok(Rational::new(num, den))
}

/// A rational is an integer iff none of its valuations is negative.
pub fn is_integer_by_valuations(x: &Rational) -> Result<bool, ArithError> {
    if x.is_zero() {
        return Ok(true);
    }
    Ok(factor_embed(x)?.exps.values().all(|&e| e >= 0))
}

/// Direct test: `x` is a nonnegative integer.
pub fn is_nat(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Four squares summing to `n`, largest first, if `n` is a nonnegative integer.
///
/// The search is exhaustive over `0 ≤ y4 ≤ y3 ≤ y2 ≤ y1 ≤ ⌊√n⌋`.
pub fn four_squares_witness(n: &BigInt) -> Option<[BigInt; 4]> {
    if n.is_negative() {
        return None;
    }
    let mut y1 = n.sqrt();
    loop {
        let r1 = n - &y1 * &y1;
        // the other three squares are at most y1² each
        if r1 > BigInt::from(3) * &y1 * &y1 {
            return None;
        }
        let mut y2 = r1.sqrt().min(y1.clone());
        loop {
            let r2 = &r1 - &y2 * &y2;
            if r2 > BigInt::from(2) * &y2 * &y2 {
                break;
            }
            let mut y3 = r2.sqrt().min(y2.clone());
            loop {
                let r3 = &r2 - &y3 * &y3;
                if r3 > &y3 * &y3 {
                    break;
                }
                let y4 = r3.sqrt();
                if &y4 * &y4 == r3 {
                    return Some([y1, y2, y3, y4]);
                }
                if y3.is_zero() {
                    break;
                }
                y3 -= 1;
            }
            if y2.is_zero() {
                break;
            }
            y2 -= 1;
        }
        if y1.is_zero() {
            return None;
        }
        y1 -= 1;
    }
}

/// `x ∈ ℕ` decided by searching for a four-squares representation with integer entries.
pub fn is_nat_by_squares(x: &Rational) -> bool {
    x.is_integer() && four_squares_witness(x.numer()).is_some()
}

/// `y ∈ p^ℕ`.
pub fn is_prime_power(p: &BigInt, y: &BigInt) -> Result<bool, ArithError> {
    require_prime(p)?;
    if !y.is_positive() {
        return Err(ArithError::NotPositive(y.clone()));
    }
    let mut y = y.clone();
    loop {
        let (q, r) = y.div_rem(p);
        if !r.is_zero() {
            return Ok(y.is_one());
        }
        y = q;
    }
}

pub fn prime_factor_set(n: &BigInt) -> Result<PrimeFactors, ArithError> {
    prime_factor_set_with(Sieve::shared(), n)
}

pub fn prime_factor_set_with(sieve: &Sieve, n: &BigInt) -> Result<PrimeFactors, ArithError> {
    if n.is_zero() {
        return Ok(PrimeFactors::All);
    }
    let primes = sieve.factor(&n.abs())?.into_keys().collect();
    Ok(PrimeFactors::Finite(PrimeSet(primes)))
}

/// `max(|num|, den)` of the canonical form.
pub fn height(x: &Rational) -> BigInt {
    x.numer().abs().max(x.denom().clone())
}

/// All rationals of height exactly `h`, ordered by value (hence by numerator sign and size).
pub fn rationals_of_height(h: u64) -> Vec<Rational> {
    if h == 0 {
        return Vec::new();
    }
    if h == 1 {
        return [-1, 0, 1].into_iter().map(|n| Rational::from_integer(n.into())).collect();
    }
    let mut out = Vec::new();
    // |num| = h with den < h, or den = h with |num| < h
    for d in 1..h {
        if num_integer::gcd(h, d) == 1 {
            out.push(Rational::new(BigInt::from(h), BigInt::from(d)));
            out.push(Rational::new(-BigInt::from(h), BigInt::from(d)));
        }
    }
    for n in 1..h {
        if num_integer::gcd(h, n) == 1 {
            out.push(Rational::new(BigInt::from(n), BigInt::from(h)));
            out.push(Rational::new(-BigInt::from(n), BigInt::from(h)));
        }
    }
    out.sort();
    out
}

/// Rationals of height `1..=bound`, grouped by increasing height.
pub fn rationals_up_to_height(bound: u64) -> Vec<Rational> {
    (1..=bound).flat_map(rationals_of_height).collect()
}

/// Parses `"p/q"` or `"n"` into a canonical rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}
