use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::IdealError;
use crate::arith::{prime_factor_set, PrimeFactors, PrimeSet};

/// An ideal of ℤ, stored by its nonnegative generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FGIdeal {
    generator: BigInt,
}

impl FGIdeal {
    pub fn new(g: BigInt) -> Self {
        FGIdeal { generator: g.abs() }
    }

    /// The ideal generated by several elements.
    pub fn generated<I: IntoIterator<Item = BigInt>>(gens: I) -> Self {
        FGIdeal::new(gens.into_iter().fold(BigInt::zero(), |a, b| a.gcd(&b)))
    }

    pub fn generator(&self) -> &BigInt {
        &self.generator
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        if self.generator.is_zero() {
            n.is_zero()
        } else {
            n.is_multiple_of(&self.generator)
        }
    }

    pub fn is_unit(&self) -> bool {
        self.generator.is_one()
    }

    pub fn is_subset(&self, other: &FGIdeal) -> bool {
        other.contains(&self.generator)
    }
}

impl fmt::Display for FGIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

/// A filter on sets of primes generated by finitely many base sets.
///
/// It consists of the supersets of the intersection of the base (the core),
/// so membership is exact and every such filter is principal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterDesc {
    base: Vec<PrimeFactors>,
    core: PrimeFactors,
    principal_of: Option<BigInt>,
}

impl FilterDesc {
    pub fn new<I: IntoIterator<Item = PrimeSet>>(base: I) -> Result<Self, IdealError> {
        Self::from_factors(base.into_iter().map(PrimeFactors::Finite).collect(), None)
    }

    fn from_factors(base: Vec<PrimeFactors>, principal_of: Option<BigInt>) -> Result<Self, IdealError> {
        let core = base.iter().cloned().reduce(|a, b| a.intersection(&b)).ok_or(IdealError::EmptyBase)?;
        if core.is_empty() {
            return Err(IdealError::EmptyCore);
        }
        Ok(FilterDesc { base, core, principal_of })
    }

    /// `F(n) = {S : pr(n) ⊆ S}`.
    pub fn principal(n: &BigInt) -> Result<Self, IdealError> {
        let pr = prime_factor_set(n).map_err(|e| IdealError::BadParameter(e.to_string()))?;
        Self::from_factors(vec![pr], Some(n.abs())).map_err(|e| match e {
            IdealError::EmptyCore => IdealError::UnitIdeal,
            other => other,
        })
    }

    pub fn base(&self) -> &[PrimeFactors] {
        &self.base
    }

    pub fn core(&self) -> &PrimeFactors {
        &self.core
    }

    /// The `n` this filter was built from as `F(n)`, if any.
    pub fn principal_of(&self) -> Option<&BigInt> {
        self.principal_of.as_ref()
    }

    pub fn contains(&self, s: &PrimeFactors) -> bool {
        self.core.is_subset(s)
    }

    pub fn contains_set(&self, s: &PrimeSet) -> bool {
        self.contains(&PrimeFactors::Finite(s.clone()))
    }

    pub fn is_subset(&self, other: &FilterDesc) -> bool {
        other.core.is_subset(&self.core)
    }
}

impl fmt::Display for FilterDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.core)
    }
}

/// `F(I) = {pr(n) : n ∈ I}`.
pub fn filter_of_ideal(i: &FGIdeal) -> Result<FilterDesc, IdealError> {
    if i.is_unit() {
        return Err(IdealError::UnitIdeal);
    }
    FilterDesc::principal(&i.generator)
}

/// `I(F) = {n : pr(n) ∈ F}`, generated by the product of the primes in the core.
pub fn ideal_of_filter(f: &FilterDesc) -> FGIdeal {
    match &f.core {
        PrimeFactors::All => FGIdeal::new(BigInt::zero()),
        PrimeFactors::Finite(s) => FGIdeal::new(s.radical()),
    }
}

/// True iff the core is a single prime, i.e. the filter is `F(p)`.
pub fn is_maximal_principal_filter(f: &FilterDesc) -> bool {
    matches!(&f.core, PrimeFactors::Finite(s) if s.len() == 1)
}

/// `pr(n)` for `0 ≤ n ≤ bound`, for membership scans.
pub struct PrTable {
    bound: u64,
    factors: Vec<PrimeFactors>,
}

impl PrTable {
    pub fn new(bound: u64) -> Self {
        let n = bound as usize;
        let mut lists: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
        for p in 2..=n {
            if lists[p].is_empty() {
                for m in (p..=n).step_by(p) {
                    lists[m].push(p as u64);
                }
            }
        }
        let mut factors = vec![PrimeFactors::All];
        factors.extend(lists.into_iter().skip(1).map(|l| {
            PrimeFactors::Finite(PrimeSet::new(l.into_iter().map(BigInt::from)).expect("sieved primes"))
        }));
        PrTable { bound, factors }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// `pr(n)` for `|n| ≤ bound`.
    pub fn pr(&self, n: i64) -> &PrimeFactors {
        &self.factors[n.unsigned_abs() as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub law: String,
    pub passed: bool,
    /// An element violating the law, if one was found.
    pub counterexample: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    /// Least positive element of `I(F(I₁)) \ I₁`.
    pub strictness_witness: Option<BigInt>,
}

const MULTIPLIER_SCAN: i64 = 16;

/// `x ∈ F(I)` read off the definition: `x = pr(n)` for some scanned `n ∈ I`,
/// or contains such a set (filters are upward closed).
fn in_filter_of_ideal(table: &PrTable, i: &FGIdeal, x: &PrimeFactors) -> bool {
    let b = BigInt::from(table.bound());
    (0..=MULTIPLIER_SCAN).any(|k| {
        let n = i.generator() * k;
        if n <= b {
            table.pr(n.try_into().expect("within the table")).is_subset(x)
        } else {
            prime_factor_set(&n).map_or(false, |pr| pr.is_subset(x))
        }
    })
}

/// `n ∈ I(F)` read off the definition: `pr(n) ∈ F`.
fn in_ideal_of_filter(table: &PrTable, f: &FilterDesc, n: i64) -> bool {
    f.contains(table.pr(n))
}

fn outcome(law: &str, counterexample: Option<i64>) -> CheckOutcome {
    CheckOutcome { law: law.into(), passed: counterexample.is_none(), counterexample: counterexample.map(BigInt::from) }
}

/// Checks monotonicity of `F(·)` and `I(·)` on the two pairs (when they are
/// nested) and both inflation laws, scanning `|n| ≤ table.bound()`.
pub fn galois_checks(
    table: &PrTable,
    ideals: (&FGIdeal, &FGIdeal),
    filters: (&FilterDesc, &FilterDesc),
) -> Result<GaloisReport, IdealError> {
    let b = table.bound() as i64;
    let scan = || (0..=b).chain((1..=b).map(|n| -n));
    let mut checks = Vec::new();
    let (i1, i2) = ideals;
    let (f1, f2) = filters;
    let fi1 = filter_of_ideal(i1)?;
    let if1 = ideal_of_filter(f1);

    // F(I₁) is a filter: no empty set, meets closed via gcd, upward closed
    let members: Vec<i64> = scan().filter(|n| i1.contains(&BigInt::from(*n))).take(60).collect();
    let bad = members.iter().find(|n| table.pr(**n).is_empty());
    checks.push(outcome("F(I) omits the empty set", bad.copied()));
    let bad = members.iter().flat_map(|a| members.iter().map(move |c| (*a, *c))).find(|(a, c)| {
        let meet = table.pr(*a).intersection(table.pr(*c));
        &meet != table.pr(a.gcd(c)) || !in_filter_of_ideal(table, i1, &meet)
    });
    checks.push(outcome("F(I) is closed under intersection", bad.map(|p| p.0)));
    let bad = scan().find(|n| {
        members.iter().take(8).any(|a| table.pr(*a).is_subset(table.pr(*n))) && !in_filter_of_ideal(table, i1, table.pr(*n))
    });
    checks.push(outcome("F(I) is upward closed", bad));

    if i1.is_subset(i2) && !i2.is_unit() {
        let bad = scan().find(|n| i1.contains(&BigInt::from(*n)) && !in_filter_of_ideal(table, i2, table.pr(*n)));
        checks.push(outcome("I1 ⊆ I2 implies F(I1) ⊆ F(I2)", bad));
    }
    if f1.is_subset(f2) {
        let bad = scan().find(|n| in_ideal_of_filter(table, f1, *n) && !in_ideal_of_filter(table, f2, *n));
        checks.push(outcome("F1 ⊆ F2 implies I(F1) ⊆ I(F2)", bad));
    }
    let ifi1 = ideal_of_filter(&fi1);
    let bad = scan().find(|n| i1.contains(&BigInt::from(*n)) && !in_ideal_of_filter(table, &fi1, *n));
    checks.push(outcome("I ⊆ I(F(I))", bad));
    let fif1 = filter_of_ideal(&if1)?;
    let bad = scan().find(|n| f1.contains(table.pr(*n)) && !in_filter_of_ideal(table, &if1, table.pr(*n)));
    checks.push(outcome("F ⊆ F(I(F))", bad));
    // the closed forms agree with the definitions
    let bad = scan().find(|n| ifi1.contains(&BigInt::from(*n)) != in_ideal_of_filter(table, &fi1, *n));
    checks.push(outcome("I(F(I)) is generated by the radical", bad));
    let bad = scan().find(|n| fif1.contains(table.pr(*n)) != f1.contains(table.pr(*n)));
    checks.push(outcome("F(I(F)) = F", bad));

    let strictness_witness = (1..=b)
        .find(|n| !i1.contains(&BigInt::from(*n)) && in_ideal_of_filter(table, &fi1, *n))
        .map(BigInt::from);
    Ok(GaloisReport { passed: checks.iter().all(|c| c.passed), checks, strictness_witness })
}
