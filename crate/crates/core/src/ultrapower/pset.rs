use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::UltraError;

/// An eventually periodic subset of ℕ: the residues `r mod m`, plus finitely
/// many inserted indices, minus finitely many removed ones.
///
/// Values are kept canonical (minimal modulus, no redundant exceptions), so
/// structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicSet {
    modulus: u64,
    residues: BTreeSet<u64>,
    inserted: BTreeSet<u64>,
    removed: BTreeSet<u64>,
}

impl PeriodicSet {
    /// `(residues mod modulus) ∪ inserted ∖ removed`, canonicalized.
    pub fn new<R, I, D>(modulus: u64, residues: R, inserted: I, removed: D) -> Result<Self, UltraError>
    where
        R: IntoIterator<Item = u64>,
        I: IntoIterator<Item = u64>,
        D: IntoIterator<Item = u64>,
    {
        if modulus == 0 {
            return Err(UltraError::BadSet("modulus must be positive".into()));
        }
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if let Some(r) = residues.iter().find(|r| **r >= modulus) {
            return Err(UltraError::BadSet(format!("residue {r} is not below {modulus}")));
        }
        let inserted: BTreeSet<u64> = inserted.into_iter().collect();
        let removed: BTreeSet<u64> = removed.into_iter().collect();
        if let Some(i) = inserted.intersection(&removed).next() {
            return Err(UltraError::BadSet(format!("{i} is both inserted and removed")));
        }
        let raw = PeriodicSet { modulus, residues, inserted, removed };
        Ok(raw.canonical())
    }

    pub fn empty() -> Self {
        PeriodicSet { modulus: 1, residues: BTreeSet::new(), inserted: BTreeSet::new(), removed: BTreeSet::new() }
    }

    pub fn all() -> Self {
        PeriodicSet { modulus: 1, residues: BTreeSet::from([0]), inserted: BTreeSet::new(), removed: BTreeSet::new() }
    }

    /// `{i : i ≡ a (mod m)}`.
    pub fn residue_class(a: u64, m: u64) -> Self {
        assert!(m > 0, "modulus must be positive");
        Self::from_fn(m, 0, |i| i % m == a % m)
    }

    pub fn finite<I: IntoIterator<Item = u64>>(items: I) -> Self {
        PeriodicSet { modulus: 1, residues: BTreeSet::new(), inserted: items.into_iter().collect(), removed: BTreeSet::new() }
    }

    /// `{i : i ≥ n}`.
    pub fn cofinite_from(n: u64) -> Self {
        Self::from_fn(1, n, |i| i >= n)
    }

    /// The set agreeing with `f` everywhere, given that `f` is periodic with
    /// period `modulus` on `[threshold, ∞)`.
    pub fn from_fn(modulus: u64, threshold: u64, mut f: impl FnMut(u64) -> bool) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        let mut residues = BTreeSet::new();
        for i in threshold..threshold + modulus {
            if f(i) {
                residues.insert(i % modulus);
            }
        }
        let mut inserted = BTreeSet::new();
        let mut removed = BTreeSet::new();
        for i in 0..threshold {
            match (f(i), residues.contains(&(i % modulus))) {
                (true, false) => {
                    inserted.insert(i);
                }
                (false, true) => {
                    removed.insert(i);
                }
                _ => {}
            }
        }
        PeriodicSet { modulus, residues, inserted, removed }.canonical()
    }

    fn canonical(self) -> Self {
        let m = self.modulus;
        let mut d = 1;
        while d < m {
            if m % d == 0 && (0..m).all(|r| self.residues.contains(&r) == self.residues.contains(&(r % d))) {
                break;
            }
            d += 1;
        }
        let residues: BTreeSet<u64> = self.residues.iter().filter(|r| **r < d).copied().collect();
        let periodic = |i: &u64| residues.contains(&(i % d));
        let inserted = self.inserted.iter().filter(|i| !periodic(i)).copied().collect();
        let removed = self.removed.iter().filter(|i| periodic(i)).copied().collect();
        PeriodicSet { modulus: d, residues, inserted, removed }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn inserted(&self) -> &BTreeSet<u64> {
        &self.inserted
    }

    pub fn removed(&self) -> &BTreeSet<u64> {
        &self.removed
    }

    /// One past the largest exceptional index; the set is purely periodic from here on.
    pub fn threshold(&self) -> u64 {
        self.inserted.iter().chain(&self.removed).max().map_or(0, |i| i + 1)
    }

    pub fn member(&self, i: u64) -> bool {
        if self.inserted.contains(&i) {
            return true;
        }
        if self.removed.contains(&i) {
            return false;
        }
        self.residues.contains(&(i % self.modulus))
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.residues.len() as u64 == self.modulus
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.inserted.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.is_cofinite() && self.removed.is_empty()
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let m = self.modulus.lcm(&other.modulus);
        let t = self.threshold().max(other.threshold());
        Self::from_fn(m, t, |i| op(self.member(i), other.member(i)))
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        PeriodicSet {
            modulus: self.modulus,
            residues: (0..self.modulus).filter(|r| !self.residues.contains(r)).collect(),
            inserted: self.removed.clone(),
            removed: self.inserted.clone(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Members below `n`, ascending.
    pub fn members_below(&self, n: u64) -> Vec<u64> {
        (0..n).filter(|i| self.member(*i)).collect()
    }
}

fn list(s: &BTreeSet<u64>) -> String {
    s.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Canonical text form, e.g. `[0,3] mod 6 +[1] -[0]`; empty exception lists are omitted.
impl fmt::Display for PeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] mod {}", list(&self.residues), self.modulus)?;
        if !self.inserted.is_empty() {
            write!(f, " +[{}]", list(&self.inserted))?;
        }
        if !self.removed.is_empty() {
            write!(f, " -[{}]", list(&self.removed))?;
        }
        Ok(())
    }
}

impl FromStr for PeriodicSet {
    type Err = UltraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || UltraError::BadSet(format!("cannot parse set '{s}'"));
        let bracketed = |t: &str| -> Result<Vec<u64>, UltraError> {
            let inner = t.strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
            if inner.trim().is_empty() {
                return Ok(Vec::new());
            }
            inner.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
        };
        let mut parts = s.split_whitespace();
        let residues = bracketed(parts.next().ok_or_else(bad)?)?;
        if parts.next() != Some("mod") {
            return Err(bad());
        }
        let modulus: u64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let (mut inserted, mut removed) = (Vec::new(), Vec::new());
        for p in parts {
            if let Some(rest) = p.strip_prefix('+') {
                inserted = bracketed(rest)?;
            } else if let Some(rest) = p.strip_prefix('-') {
                removed = bracketed(rest)?;
            } else {
                return Err(bad());
            }
        }
        PeriodicSet::new(modulus, residues, inserted, removed)
    }
}

impl Serialize for PeriodicSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PeriodicSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> PeriodicSet {
        PeriodicSet::residue_class(0, 2)
    }

    fn odds() -> PeriodicSet {
        PeriodicSet::residue_class(1, 2)
    }

    #[test]
    fn spec_examples() {
        assert!(evens().intersect(&odds()).is_empty());
        let c = PeriodicSet::finite([1, 2]).complement();
        assert!(c.is_cofinite() && !c.member(1) && c.member(0) && c.member(3));
        assert!(evens().union(&odds()).is_all());
        assert_eq!(evens().union(&odds()), PeriodicSet::all());
    }

    #[test]
    fn canonical_form_is_minimal() {
        let s = PeriodicSet::new(6, [0, 2, 4], [3], [2]).unwrap();
        assert_eq!(s.modulus(), 2);
        assert_eq!(s.to_string(), "[0] mod 2 +[3] -[2]");
        assert_eq!(s.to_string().parse::<PeriodicSet>().unwrap(), s);
        // redundant exceptions disappear
        assert_eq!(PeriodicSet::new(2, [0], [4], [1]).unwrap(), evens());
        assert_eq!(PeriodicSet::empty().to_string(), "[] mod 1");
        assert_eq!(PeriodicSet::cofinite_from(3).to_string(), "[0] mod 1 -[0,1,2]");
    }

    #[test]
    fn rejects_malformed() {
        assert!(PeriodicSet::new(0, [], [], []).is_err());
        assert!(PeriodicSet::new(3, [3], [], []).is_err());
        assert!(PeriodicSet::new(3, [0], [5], [5]).is_err());
        for s in ["", "[0] mod", "[0] mod x", "[a] mod 2", "[0] div 2", "[0] mod 2 *[1]"] {
            assert!(s.parse::<PeriodicSet>().is_err(), "{s}");
        }
    }

    #[test]
    fn threshold_and_members() {
        let s = PeriodicSet::new(3, [1], [0, 9], [4]).unwrap();
        assert_eq!(s.threshold(), 10);
        assert_eq!(s.members_below(14), vec![0, 1, 7, 9, 10, 13]);
        assert!(PeriodicSet::finite([3, 7]).is_subset(&PeriodicSet::cofinite_from(3)));
        assert!(!PeriodicSet::finite([2, 7]).is_subset(&PeriodicSet::cofinite_from(3)));
    }
}
