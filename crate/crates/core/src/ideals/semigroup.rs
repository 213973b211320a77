use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::IdealError;
use crate::arith::{is_prime, parse_rational, vp};
use crate::Rational;

/// The ordered semigroups used as desk models. Each is a copy of `(ℕ, +, <)`
/// and elements are stored by their index `k`:
/// `k` itself, `k/den` in `(1/den)ℕ ⊂ ℚ≥0`, or `p^k` under multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum SemigroupModel {
    Nat,
    NonNegRat { den: u64 },
    PPower { p: u64 },
}

impl SemigroupModel {
    pub fn name(&self) -> &'static str {
        match self {
            SemigroupModel::Nat => "nat",
            SemigroupModel::NonNegRat { .. } => "nonnegrat",
            SemigroupModel::PPower { .. } => "ppower",
        }
    }

    /// The element with index `k`.
    pub fn label(&self, k: u64) -> String {
        match self {
            SemigroupModel::Nat => k.to_string(),
            SemigroupModel::NonNegRat { den } => Rational::new(k.into(), (*den).into()).to_string(),
            SemigroupModel::PPower { p } => num_traits::pow(BigInt::from(*p), k as usize).to_string(),
        }
    }

    /// The index of an element written as a JSON number or string.
    pub fn index_of(&self, v: &serde_json::Value) -> Result<u64, IdealError> {
        let text = match v {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s.trim().to_string(),
            other => return Err(IdealError::BadScenario(format!("element {other} is not a number"))),
        };
        let bad = || IdealError::BadScenario(format!("{text} is not an element of the {} model", self.name()));
        let r = parse_rational(&text).ok_or_else(bad)?;
        let k = match self {
            SemigroupModel::Nat => r.is_integer().then(|| r.to_integer()),
            SemigroupModel::NonNegRat { den } => {
                let scaled = r * Rational::from_integer((*den).into());
                scaled.is_integer().then(|| scaled.to_integer())
            }
            SemigroupModel::PPower { p } => {
                if !r.is_integer() || r <= Rational::zero() {
                    None
                } else {
                    let (p, mut n, mut e) = (BigInt::from(*p), r.to_integer(), 0u64);
                    while (&n % &p).is_zero() {
                        n /= &p;
                        e += 1;
                    }
                    (n == BigInt::from(1)).then(|| BigInt::from(e))
                }
            }
        };
        k.and_then(|k| k.to_u64()).ok_or_else(bad)
    }
}

impl fmt::Display for SemigroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemigroupModel::Nat => write!(f, "(ℕ, +)"),
            SemigroupModel::NonNegRat { den } => write!(f, "((1/{den})ℕ, +)"),
            SemigroupModel::PPower { p } => write!(f, "({p}^ℕ, ×)"),
        }
    }
}

/// A subset of the window `0..=window` of a model (by index).
///
/// All closures and checks are taken in the untruncated semigroup and then
/// restricted to the window; quantifiers over the semigroup range over the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSubset {
    model: SemigroupModel,
    window: u64,
    members: BTreeSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    /// `y^n = x` with `x ∈ T` and `y ∉ T`.
    Root { x: String, n: u64, y: String },
    /// `a·b ∈ T` with `a, b ∉ T`.
    Factors { a: String, b: String, product: String },
}

impl WindowSubset {
    pub fn new<I: IntoIterator<Item = u64>>(model: SemigroupModel, window: u64, members: I) -> Result<Self, IdealError> {
        let members: BTreeSet<u64> = members.into_iter().collect();
        if let Some(k) = members.iter().find(|k| **k > window) {
            return Err(IdealError::WindowOverflow { value: model.label(*k), window });
        }
        Ok(WindowSubset { model, window, members })
    }

    /// The interval `[from, window]`.
    pub fn upward(model: SemigroupModel, window: u64, from: u64) -> Self {
        WindowSubset { model, window, members: (from..=window).collect() }
    }

    pub fn model(&self) -> SemigroupModel {
        self.model
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn members(&self) -> &BTreeSet<u64> {
        &self.members
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(|k| self.model.label(*k)).collect()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.members.contains(&k)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.members.first().copied()
    }

    fn with(&self, members: BTreeSet<u64>) -> Self {
        WindowSubset { model: self.model, window: self.window, members }
    }

    /// Closed under the operation wherever the result stays in the window.
    pub fn is_subsemigroup(&self) -> bool {
        self.members.iter().all(|a| {
            self.members.iter().take_while(|b| a + **b <= self.window).all(|b| self.contains(a + b))
        })
    }

    pub fn is_convex(&self) -> bool {
        match (self.members.first(), self.members.last()) {
            (Some(lo), Some(hi)) => (hi - lo + 1) as usize == self.members.len(),
            _ => true,
        }
    }

    /// Convex and upward closed.
    pub fn is_wrep(&self) -> bool {
        self.min().map_or(true, |m| self.members.len() as u64 == self.window - m + 1)
    }

    pub fn is_proper(&self) -> bool {
        self.members.len() as u64 != self.window + 1
    }

    /// Smallest root `y ∉ T` of a member, if any.
    pub fn radical_witness(&self) -> Option<Witness> {
        for x in &self.members {
            for n in 2..=*x {
                if x % n == 0 && !self.contains(x / n) {
                    let y = x / n;
                    return Some(Witness::Root { x: self.model.label(*x), n, y: self.model.label(y) });
                }
            }
        }
        None
    }

    /// For the least member that factors outside `T`, the most balanced such factorization.
    pub fn prime_witness(&self) -> Option<Witness> {
        for x in &self.members {
            for a in (0..=x / 2).rev() {
                let b = x - a;
                if !self.contains(a) && !self.contains(b) {
                    let l = |k| self.model.label(k);
                    return Some(Witness::Factors { a: l(a), b: l(b), product: l(*x) });
                }
            }
        }
        None
    }

    pub fn is_radical(&self) -> bool {
        self.radical_witness().is_none()
    }

    pub fn is_prime(&self) -> bool {
        self.prime_witness().is_none()
    }

    /// The subsemigroup generated by `T`, in `0..=limit`.
    fn closure_to(&self, limit: u64) -> BTreeSet<u64> {
        let mut out = self.members.clone();
        let mut frontier: Vec<u64> = out.iter().copied().collect();
        while let Some(a) = frontier.pop() {
            let sums: Vec<u64> = out.iter().map(|b| a + b).filter(|s| *s <= limit && !out.contains(s)).collect();
            for s in sums {
                out.insert(s);
                frontier.push(s);
            }
        }
        out
    }

    /// Generated subsemigroup, restricted to the window.
    pub fn generated(&self) -> Self {
        self.with(self.closure_to(self.window))
    }

    /// `⟨T⟩`: close under the operation up to twice the window (far enough to
    /// see a member beyond it when `T` has a non-identity element), fill the
    /// gaps, and restrict.
    pub fn convex_hull(&self) -> Self {
        let closed = self.closure_to(2 * self.window.max(1));
        let members = match (closed.first(), closed.last()) {
            (Some(lo), Some(hi)) => (*lo..=(*hi).min(self.window)).collect(),
            _ => BTreeSet::new(),
        };
        self.with(members)
    }

    /// `⟨T⟩_∞`: the convex hull, closed upward.
    pub fn wrep_closure(&self) -> Self {
        let hull = self.convex_hull();
        match hull.min() {
            Some(m) => Self::upward(self.model, self.window, m),
            None => hull,
        }
    }
}

impl fmt::Display for WindowSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExhaustiveReport {
    pub model: String,
    pub window: u64,
    pub subsets: u64,
    pub subsemigroups: u64,
    pub wrep_subsemigroups: u64,
    /// Radical iff prime on every subsemigroup without right end point.
    pub equivalence_holds: bool,
    /// Prime implies radical on every subsemigroup.
    pub prime_implies_radical: bool,
    pub counterexample: Option<Vec<String>>,
}

const EXHAUSTIVE_WINDOW_LIMIT: u64 = 16;

/// Every subset of `0..=window`: on the subsemigroups without right end point,
/// radical and prime agree.
pub fn radical_prime_exhaustive(model: SemigroupModel, window: u64) -> Result<ExhaustiveReport, IdealError> {
    if window > EXHAUSTIVE_WINDOW_LIMIT {
        return Err(IdealError::BadParameter(format!("exhaustive search is limited to windows ≤ {EXHAUSTIVE_WINDOW_LIMIT}")));
    }
    let subsets = 1u64 << (window + 1);
    let (mut semigroups, mut wrep) = (0, 0);
    let mut counterexample = None;
    let mut prime_implies_radical = true;
    for mask in 0..subsets {
        let t = WindowSubset::new(model, window, (0..=window).filter(|k| mask & (1 << k) != 0))?;
        if !t.is_subsemigroup() {
            continue;
        }
        semigroups += 1;
        let (r, p) = (t.is_radical(), t.is_prime());
        if p && !r {
            prime_implies_radical = false;
        }
        if t.is_wrep() {
            wrep += 1;
            if r != p && counterexample.is_none() {
                counterexample = Some(t.labels());
            }
        }
    }
    Ok(ExhaustiveReport {
        model: model.to_string(),
        window,
        subsets,
        subsemigroups: semigroups,
        wrep_subsemigroups: wrep,
        equivalence_holds: counterexample.is_none(),
        prime_implies_radical,
        counterexample,
    })
}

/// `ℤ_(p)` with valuation `v_p`; its value semigroup is `(ℕ, +)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dvr {
    p: BigInt,
    window: u64,
}

/// The ideal `p^k ℤ_(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationIdeal {
    pub p: BigInt,
    pub k: u64,
}

impl ValuationIdeal {
    pub fn contains(&self, r: &Rational) -> bool {
        r.is_zero() || vp(&self.p, r).map_or(false, |v| v.exp >= self.k as i64)
    }
}

impl fmt::Display for ValuationIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}·ℤ_({})", self.p, self.k, self.p)
    }
}

impl Dvr {
    pub fn new(p: BigInt, window: u64) -> Result<Self, IdealError> {
        if !is_prime(&p).map_err(|e| IdealError::BadParameter(e.to_string()))? {
            return Err(IdealError::NotPrime(p));
        }
        Ok(Dvr { p, window })
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    /// `S(p^k ℤ_(p)) = ν(I) ∩ S = [k, ∞)`, restricted to the window.
    pub fn s_of_i(&self, k: u64) -> Result<WindowSubset, IdealError> {
        if k > self.window {
            return Err(IdealError::WindowOverflow { value: k.to_string(), window: self.window });
        }
        Ok(WindowSubset::upward(SemigroupModel::Nat, self.window, k))
    }

    /// `I(T) = ⋃_{n∈T} ν⁻¹([n, ∞])`, which is `p^{min T} ℤ_(p)`.
    pub fn i_of_t(&self, t: &WindowSubset) -> Result<ValuationIdeal, IdealError> {
        let k = t.min().ok_or(IdealError::EmptySubsemigroup)?;
        Ok(ValuationIdeal { p: self.p.clone(), k })
    }
}

/// A semigroup scenario as read from JSON.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: String,
    #[serde(default)]
    pub p: Option<u64>,
    /// Grid denominator for `nonnegrat` (default 2).
    #[serde(default)]
    pub den: Option<u64>,
    pub window: u64,
    #[serde(default)]
    pub subset: Vec<serde_json::Value>,
    /// Also run the exhaustive radical/prime comparison at this window.
    #[serde(default)]
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub model: String,
    pub window: u64,
    pub subset: Vec<String>,
    pub is_subsemigroup: bool,
    pub convex_hull: Vec<String>,
    pub wrep_closure: Vec<String>,
    pub is_wrep: bool,
    pub radical: bool,
    pub radical_witness: Option<Witness>,
    pub prime: bool,
    pub prime_witness: Option<Witness>,
    /// Radical and prime agree on the closure `⟨T⟩_∞`.
    pub closure_equivalence: bool,
    pub pass: bool,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, IdealError> {
        serde_json::from_str(text).map_err(|e| IdealError::BadScenario(e.to_string()))
    }

    pub fn semigroup_model(&self) -> Result<SemigroupModel, IdealError> {
        Ok(match self.model.as_str() {
            "nat" => SemigroupModel::Nat,
            "nonnegrat" => match self.den.unwrap_or(2) {
                0 => return Err(IdealError::BadScenario("den must be positive".into())),
                den => SemigroupModel::NonNegRat { den },
            },
            "ppower" => {
                let p = self.p.ok_or_else(|| IdealError::BadScenario("the ppower model needs \"p\"".into()))?;
                if !is_prime(&BigInt::from(p)).unwrap_or(false) {
                    return Err(IdealError::BadScenario(format!("p = {p} is not prime")));
                }
                SemigroupModel::PPower { p }
            }
            other => return Err(IdealError::BadScenario(format!("unknown model '{other}'"))),
        })
    }

    pub fn subset(&self) -> Result<WindowSubset, IdealError> {
        let model = self.semigroup_model()?;
        let idx = self.subset.iter().map(|v| model.index_of(v)).collect::<Result<Vec<_>, _>>()?;
        WindowSubset::new(model, self.window, idx)
    }
}

pub fn analyse_scenario(s: &Scenario) -> Result<ScenarioReport, IdealError> {
    if s.window > 10_000 {
        return Err(IdealError::BadScenario("window is limited to 10000".into()));
    }
    if s.subset.is_empty() {
        return Err(IdealError::BadScenario("subset is empty".into()));
    }
    let t = s.subset()?;
    let closure = t.wrep_closure();
    let closure_equivalence = closure.is_radical() == closure.is_prime();
    let is_wrep = t.is_wrep() && t.is_subsemigroup();
    let pass = closure_equivalence && (!is_wrep || t.is_radical() == t.is_prime());
    Ok(ScenarioReport {
        model: t.model().to_string(),
        window: t.window(),
        subset: t.labels(),
        is_subsemigroup: t.is_subsemigroup(),
        convex_hull: t.convex_hull().labels(),
        wrep_closure: closure.labels(),
        is_wrep,
        radical: t.is_radical(),
        radical_witness: t.radical_witness(),
        prime: t.is_prime(),
        prime_witness: t.prime_witness(),
        closure_equivalence,
        pass,
    })
}

/// Result of a scenario file: the subset analysis, the exhaustive run, or both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioRun {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<ScenarioReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<ExhaustiveReport>,
}

/// An exhaustive scenario may omit the subset; any other needs a nonempty one.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun, IdealError> {
    let subset = if s.exhaustive && s.subset.is_empty() { None } else { Some(analyse_scenario(s)?) };
    let exhaustive = if s.exhaustive {
        let r = radical_prime_exhaustive(s.semigroup_model()?, s.window)
            .map_err(|e| IdealError::BadScenario(e.to_string()))?;
        Some(r)
    } else {
        None
    };
    let pass = subset.as_ref().map_or(true, |r| r.pass)
        && exhaustive.as_ref().map_or(true, |r| r.equivalence_holds && r.prime_implies_radical);
    Ok(ScenarioRun { pass, subset, exhaustive })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(window: u64, m: &[u64]) -> WindowSubset {
        WindowSubset::new(SemigroupModel::Nat, window, m.iter().copied()).unwrap()
    }

    #[test]
    fn closures() {
        let t = nat(20, &[2, 5]);
        assert_eq!(t.generated().members().iter().copied().collect::<Vec<_>>(), [2, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20]);
        assert_eq!(t.convex_hull(), WindowSubset::upward(SemigroupModel::Nat, 20, 2));
        assert_eq!(t.wrep_closure(), t.convex_hull());
        assert_eq!(nat(20, &[15]).convex_hull(), WindowSubset::upward(SemigroupModel::Nat, 20, 15));
        assert_eq!(nat(20, &[0]).convex_hull(), nat(20, &[0]));
        assert_eq!(nat(20, &[0]).wrep_closure(), WindowSubset::upward(SemigroupModel::Nat, 20, 0));
        assert_eq!(nat(20, &[1]).wrep_closure(), WindowSubset::upward(SemigroupModel::Nat, 20, 1));
        let w = WindowSubset::upward(SemigroupModel::Nat, 20, 3);
        assert_eq!(w.wrep_closure(), w);
        assert!(nat(20, &[]).wrep_closure().is_empty());
        assert!(matches!(WindowSubset::new(SemigroupModel::Nat, 5, [6]), Err(IdealError::WindowOverflow { .. })));
    }

    #[test]
    fn radical_and_prime() {
        let pos = WindowSubset::upward(SemigroupModel::Nat, 20, 1);
        assert!(pos.is_radical() && pos.is_prime());
        let t = WindowSubset::upward(SemigroupModel::Nat, 20, 4);
        assert_eq!(t.prime_witness(), Some(Witness::Factors { a: "2".into(), b: "2".into(), product: "4".into() }));
        assert_eq!(t.radical_witness(), Some(Witness::Root { x: "4".into(), n: 2, y: "2".into() }));
        let pp = WindowSubset::upward(SemigroupModel::PPower { p: 2 }, 12, 4);
        assert_eq!(pp.prime_witness(), Some(Witness::Factors { a: "4".into(), b: "4".into(), product: "16".into() }));
    }

    #[test]
    fn exhaustive_equivalence() {
        for model in [SemigroupModel::Nat, SemigroupModel::PPower { p: 2 }] {
            let r = radical_prime_exhaustive(model, 12).unwrap();
            assert!(r.equivalence_holds && r.prime_implies_radical, "{r:?}");
            assert_eq!(r.subsets, 1 << 13);
            assert_eq!(r.wrep_subsemigroups, 14);
        }
    }

    #[test]
    fn dvr_correspondence() {
        let d = Dvr::new(3.into(), 60).unwrap();
        assert_eq!(d.s_of_i(3).unwrap(), WindowSubset::upward(SemigroupModel::Nat, 60, 3));
        assert_eq!(d.i_of_t(&nat(60, &[2, 4])).unwrap().k, 2);
        assert_eq!(d.s_of_i(d.i_of_t(&nat(60, &[2, 4])).unwrap().k).unwrap(), nat(60, &[2, 4]).wrep_closure());
        assert_eq!(d.i_of_t(&nat(60, &[])), Err(IdealError::EmptySubsemigroup));
        assert_ne!(d.s_of_i(4).unwrap(), d.s_of_i(5).unwrap());
        let i = ValuationIdeal { p: 3.into(), k: 2 };
        assert!(i.contains(&Rational::new(18.into(), 5.into())) && !i.contains(&Rational::new(6.into(), 1.into())));
        assert!(Dvr::new(4.into(), 5).is_err());
    }

    #[test]
    fn scenarios() {
        let s = Scenario::parse(r#"{"model":"nat","window":20,"subset":[2,5]}"#).unwrap();
        let r = analyse_scenario(&s).unwrap();
        assert!(!r.is_subsemigroup && r.pass);
        assert_eq!(r.wrep_closure.first().map(String::as_str), Some("2"));
        let s = Scenario::parse(r#"{"model":"nonnegrat","den":2,"window":8,"subset":["1/2",1,"3/2",2,"5/2",3,"7/2",4]}"#).unwrap();
        assert!(analyse_scenario(&s).unwrap().is_wrep);
        let s = Scenario::parse(r#"{"model":"ppower","p":3,"window":4,"subset":[9,27,81]}"#).unwrap();
        let r = analyse_scenario(&s).unwrap();
        assert!(r.is_wrep && !r.prime);
        for bad in [
            r#"{"model":"ppower","window":4,"subset":[]}"#,
            r#"{"model":"ppower","p":4,"window":4,"subset":[]}"#,
            r#"{"model":"ppower","p":3,"window":4,"subset":[6]}"#,
            r#"{"model":"nat","window":4,"subset":[9]}"#,
            r#"{"model":"nat","window":4,"subset":[-1]}"#,
            r#"{"model":"ring","window":4,"subset":[]}"#,
            r#"{"model":"nat","subset":[]}"#,
            r#"{"model":"nat","window":4,"subset":[1],"extra":0}"#,
        ] {
            let res = Scenario::parse(bad).and_then(|s| analyse_scenario(&s));
            assert!(res.is_err(), "{bad}");
        }
    }

    #[test]
    fn scenario_runs() {
        let empty = Scenario::parse(r#"{"model":"nat","window":12,"subset":[]}"#).unwrap();
        assert!(matches!(run_scenario(&empty), Err(IdealError::BadScenario(_))));
        let ex = Scenario::parse(r#"{"model":"nat","window":12,"exhaustive":true}"#).unwrap();
        let r = run_scenario(&ex).unwrap();
        assert!(r.pass && r.subset.is_none() && r.exhaustive.is_some());
        let up = Scenario::parse(r#"{"model":"nat","window":12,"subset":[4,5,6,7,8,9,10,11,12]}"#).unwrap();
        let r = run_scenario(&up).unwrap().subset.unwrap();
        assert!(!r.prime);
        assert_eq!(r.prime_witness, Some(Witness::Factors { a: "2".into(), b: "2".into(), product: "4".into() }));
    }
}
