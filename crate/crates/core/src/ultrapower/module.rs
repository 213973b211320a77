use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::{SeqExpr, UltraError};

/// The product of the cyclic groups `ℤ/m_i`, `m_i` given in closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicModuleSeq {
    pub moduli: SeqExpr,
}

/// A sequence read modulo `m_i` at each index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleElement {
    pub module: CyclicModuleSeq,
    pub value: SeqExpr,
}

impl CyclicModuleSeq {
    pub fn new(moduli: SeqExpr) -> Self {
        CyclicModuleSeq { moduli }
    }

    pub fn modulus(&self, i: u64) -> Result<BigInt, UltraError> {
        let m = self.moduli.eval(i);
        if m < BigInt::one() {
            return Err(UltraError::BadModulus { index: i, value: m });
        }
        Ok(m)
    }

    pub fn element(&self, value: SeqExpr) -> ModuleElement {
        ModuleElement { module: self.clone(), value }
    }

    pub fn zero(&self) -> ModuleElement {
        self.element(SeqExpr::constant(0))
    }
}

impl ModuleElement {
    /// The component at `i`, in `0..m_i`.
    pub fn at(&self, i: u64) -> Result<BigInt, UltraError> {
        Ok(self.value.eval(i).mod_floor(&self.module.modulus(i)?))
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        self.module.element(SeqExpr::Add(Box::new(self.value.clone()), Box::new(other.value.clone())))
    }
}

/// `n·a`, computed componentwise.
pub fn module_action(n: &SeqExpr, a: &ModuleElement) -> ModuleElement {
    a.module.element(SeqExpr::Mul(Box::new(n.clone()), Box::new(a.value.clone())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub k: u64,
    pub generators: usize,
    /// `k^generators`.
    pub bound: BigInt,
    /// `|A_i / k A_i|` for `i = 0..=trunc`.
    pub sizes: Vec<u64>,
    pub max_observed: u64,
    pub holds: bool,
}

const BRUTE_FORCE_LIMIT: u64 = 10_000;

/// `|ℤ/m / k(ℤ/m)|`, counting the image of multiplication by `k` when `m` is small.
fn quotient_size(m: &BigInt, k: u64) -> u64 {
    match m.to_u64() {
        Some(mu) if mu <= BRUTE_FORCE_LIMIT => {
            let image: std::collections::BTreeSet<u64> = (0..mu).map(|x| (x * (k % mu)) % mu).collect();
            mu / image.len() as u64
        }
        _ => m.gcd(&BigInt::from(k)).to_u64().expect("divides k"),
    }
}

/// Checks `|A_i / k A_i| ≤ k^n` at each index up to `trunc`, where the `n`
/// generators must generate every `A_i = ℤ/m_i`.
pub fn quotient_bound_check(
    moduli: &SeqExpr,
    gens: &[SeqExpr],
    k: u64,
    trunc: u64,
) -> Result<QuotientReport, UltraError> {
    if k == 0 {
        return Err(UltraError::BadParameter("k must be at least 1".into()));
    }
    let module = CyclicModuleSeq::new(moduli.clone());
    let bound = num_traits::pow(BigInt::from(k), gens.len());
    let mut sizes = Vec::with_capacity(trunc as usize + 1);
    for i in 0..=trunc {
        let m = module.modulus(i)?;
        let g = gens.iter().fold(m.clone(), |acc, g| acc.gcd(&g.eval(i)));
        if !g.abs().is_one() {
            return Err(UltraError::NotGenerating { index: i });
        }
        sizes.push(quotient_size(&m, k));
    }
    let max_observed = sizes.iter().copied().max().unwrap_or(1);
    let holds = BigInt::from(max_observed) <= bound;
    Ok(QuotientReport { k, generators: gens.len(), bound, sizes, max_observed, holds })
}
