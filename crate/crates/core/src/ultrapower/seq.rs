//! Closed-form integer sequences `(a_i)` and quotients of them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::UltraError;
use crate::arith::{is_prime, vp, Sieve};
use crate::formula::parse::{Parser, RawTerm};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeqExpr {
    Const(BigInt),
    /// The index `i`.
    Index,
    Neg(Box<SeqExpr>),
    Add(Box<SeqExpr>, Box<SeqExpr>),
    Sub(Box<SeqExpr>, Box<SeqExpr>),
    Mul(Box<SeqExpr>, Box<SeqExpr>),
    Pow(Box<SeqExpr>, u32),
    /// `c^i` for a constant `c ≥ 2`.
    Exp(BigInt),
    /// The `i`-th prime, counting from `nthprime(0) = 2`.
    NthPrime,
}

/// The `i`-th prime (0-based).
pub fn nth_prime(i: u64) -> BigInt {
    let primes = Sieve::shared().primes();
    if let Some(p) = primes.get(i as usize) {
        return BigInt::from(*p);
    }
    let mut count = primes.len() as u64 - 1;
    let mut n = BigInt::from(*primes.last().expect("sieve has primes"));
    while count < i {
        n += 2;
        if is_prime(&n).unwrap_or(false) {
            count += 1;
        }
    }
    n
}

impl SeqExpr {
    pub fn constant(c: i64) -> SeqExpr {
        SeqExpr::Const(c.into())
    }

    pub fn eval(&self, i: u64) -> BigInt {
        match self {
            SeqExpr::Const(c) => c.clone(),
            SeqExpr::Index => BigInt::from(i),
            SeqExpr::Neg(a) => -a.eval(i),
            SeqExpr::Add(a, b) => a.eval(i) + b.eval(i),
            SeqExpr::Sub(a, b) => a.eval(i) - b.eval(i),
            SeqExpr::Mul(a, b) => a.eval(i) * b.eval(i),
            SeqExpr::Pow(a, k) => num_traits::pow(a.eval(i), *k as usize),
            SeqExpr::Exp(c) => num_traits::pow(c.clone(), i as usize),
            SeqExpr::NthPrime => nth_prime(i),
        }
    }

    /// Exponential-polynomial normal form; `None` if `nthprime` occurs.
    pub fn normal_form(&self) -> Option<ExpPoly> {
        Some(match self {
            SeqExpr::Const(c) => ExpPoly::term(BigInt::one(), 0, c.clone()),
            SeqExpr::Index => ExpPoly::term(BigInt::one(), 1, BigInt::one()),
            SeqExpr::Neg(a) => a.normal_form()?.neg(),
            SeqExpr::Add(a, b) => a.normal_form()?.add(&b.normal_form()?),
            SeqExpr::Sub(a, b) => a.normal_form()?.add(&b.normal_form()?.neg()),
            SeqExpr::Mul(a, b) => a.normal_form()?.mul(&b.normal_form()?),
            SeqExpr::Pow(a, k) => {
                let base = a.normal_form()?;
                (0..*k).fold(ExpPoly::term(BigInt::one(), 0, BigInt::one()), |acc, _| acc.mul(&base))
            }
            SeqExpr::Exp(c) => ExpPoly::term(c.clone(), 0, BigInt::one()),
            SeqExpr::NthPrime => return None,
        })
    }

    /// Nonzero at every index by construction (products of primes, powers and nonzero constants).
    fn structurally_nonzero(&self) -> bool {
        match self {
            SeqExpr::Const(c) => !c.is_zero(),
            SeqExpr::NthPrime | SeqExpr::Exp(_) => true,
            SeqExpr::Neg(a) | SeqExpr::Pow(a, _) => a.structurally_nonzero(),
            SeqExpr::Mul(a, b) => a.structurally_nonzero() && b.structurally_nonzero(),
            _ => false,
        }
    }

    fn prec(&self) -> u8 {
        match self {
            SeqExpr::Add(..) | SeqExpr::Sub(..) => 1,
            SeqExpr::Mul(..) => 2,
            SeqExpr::Neg(_) => 3,
            SeqExpr::Const(c) if c.is_negative() => 3,
            SeqExpr::Pow(..) | SeqExpr::Exp(_) => 4,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            SeqExpr::Const(c) => write!(f, "{c}"),
            SeqExpr::Index => write!(f, "i"),
            SeqExpr::NthPrime => write!(f, "nthprime(i)"),
            SeqExpr::Exp(c) => write!(f, "{c}^i"),
            SeqExpr::Neg(a) => {
                write!(f, "-")?;
                let min = if matches!(**a, SeqExpr::Const(_)) { 6 } else { 4 };
                a.fmt_at(f, min)
            }
            SeqExpr::Pow(a, k) => {
                a.fmt_at(f, 5)?;
                write!(f, "^{k}")
            }
            SeqExpr::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " + ")?;
                b.fmt_at(f, 2)
            }
            SeqExpr::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " - ")?;
                b.fmt_at(f, 2)
            }
            SeqExpr::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " * ")?;
                b.fmt_at(f, 3)
            }
        }
    }
}

impl fmt::Display for SeqExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

fn from_raw(raw: RawTerm) -> Result<SeqExpr, String> {
    let b = |r: Box<RawTerm>| from_raw(*r).map(Box::new);
    Ok(match raw {
        RawTerm::Var(v) if v == "i" => SeqExpr::Index,
        RawTerm::Var(v) => return Err(format!("unknown symbol '{v}'; sequences are written in the index i")),
        RawTerm::Int(n) => SeqExpr::Const(n),
        RawTerm::Neg(a) => SeqExpr::Neg(b(a)?),
        RawTerm::Add(x, y) => SeqExpr::Add(b(x)?, b(y)?),
        RawTerm::Sub(x, y) => SeqExpr::Sub(b(x)?, b(y)?),
        RawTerm::Mul(x, y) => SeqExpr::Mul(b(x)?, b(y)?),
        RawTerm::Pow(x, e) => match (*x, *e) {
            (RawTerm::Int(c), RawTerm::Var(v)) if v == "i" => {
                if c < BigInt::from(2) {
                    return Err(format!("exponential base must be at least 2, got {c}"));
                }
                SeqExpr::Exp(c)
            }
            (x, RawTerm::Int(k)) => {
                let k: u32 = (&k).try_into().map_err(|_| format!("exponent {k} is out of range"))?;
                SeqExpr::Pow(Box::new(from_raw(x)?), k)
            }
            _ => return Err("exponents are constants, or i over a constant base".into()),
        },
        RawTerm::Call(name, args) if name == "nthprime" && args == [RawTerm::Var("i".into())] => SeqExpr::NthPrime,
        RawTerm::Call(name, _) => return Err(format!("unknown function '{name}'; only nthprime(i) is supported")),
    })
}

impl FromStr for SeqExpr {
    type Err = UltraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s)?;
        let raw = p.raw_term()?;
        p.expect_eof()?;
        from_raw(raw).map_err(|m| UltraError::BadExpression(format!("{s}: {m}")))
    }
}

/// `Σ coef · i^k · c^i`, keyed by `(c, k)`; zero coefficients are absent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly(BTreeMap<(BigInt, u32), BigInt>);

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly(BTreeMap::new())
    }

    pub fn term(base: BigInt, degree: u32, coef: BigInt) -> Self {
        let mut m = BTreeMap::new();
        if !coef.is_zero() {
            m.insert((base, degree), coef);
        }
        ExpPoly(m)
    }

    pub fn terms(&self) -> &BTreeMap<(BigInt, u32), BigInt> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The value if the sequence is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.0.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let ((c, k), a) = self.0.iter().next().expect("one term");
                (c.is_one() && *k == 0).then(|| a.clone())
            }
            _ => None,
        }
    }

    fn neg(&self) -> Self {
        ExpPoly(self.0.iter().map(|(k, v)| (k.clone(), -v)).collect())
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            let slot = out.entry(k.clone()).or_insert_with(BigInt::zero);
            *slot += v;
            if slot.is_zero() {
                out.remove(k);
            }
        }
        ExpPoly(out)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut acc = ExpPoly::zero();
        for ((c1, k1), a1) in &self.0 {
            for ((c2, k2), a2) in &other.0 {
                acc = acc.add(&ExpPoly::term(c1 * c2, k1 + k2, a1 * a2));
            }
        }
        acc
    }

    pub fn eval(&self, i: u64) -> BigInt {
        let bi = BigInt::from(i);
        self.0
            .iter()
            .map(|((c, k), a)| a * num_traits::pow(bi.clone(), *k as usize) * num_traits::pow(c.clone(), i as usize))
            .sum()
    }

    /// Dominant term `(c, k, coef)`: largest base, then largest degree.
    pub fn lead(&self) -> Option<(&BigInt, u32, &BigInt)> {
        self.0.iter().next_back().map(|((c, k), a)| (c, *k, a))
    }

    /// An index from which the sign is constant (that of the leading coefficient).
    ///
    /// Found by doubling: `B` works once every lower-order term is below
    /// `1/(#terms)` of the leading term at `B`, counted jointly, and each ratio
    /// is non-increasing from `B` on.
    pub fn sign_threshold(&self) -> Result<u64, UltraError> {
        let Some((c, k, a)) = self.lead() else {
            return Err(UltraError::UnsupportedTruthSet("the zero sequence has no eventual sign".into()));
        };
        let others: Vec<_> = self.0.iter().rev().skip(1).collect();
        if others.is_empty() {
            return Ok(if k > 0 { 1 } else { 0 });
        }
        let mut b: u64 = 1;
        while b <= SIGN_SEARCH_CAP {
            let bb = BigInt::from(b);
            let b1 = BigInt::from(b + 1);
            let monotone = others.iter().all(|((c2, k2), _)| {
                if c2 == c || *k2 <= k {
                    return true;
                }
                let d = (k2 - k) as usize;
                num_traits::pow(b1.clone(), d) * c2 < num_traits::pow(bb.clone(), d) * c
            });
            if monotone {
                let lead = a.abs() * num_traits::pow(bb.clone(), k as usize) * num_traits::pow(c.clone(), b as usize);
                let rest: BigInt = others
                    .iter()
                    .map(|((c2, k2), a2)| {
                        a2.abs() * num_traits::pow(bb.clone(), *k2 as usize) * num_traits::pow(c2.clone(), b as usize)
                    })
                    .sum();
                if rest < lead {
                    return Ok(b);
                }
            }
            b *= 2;
        }
        Err(UltraError::UnsupportedTruthSet(format!(
            "no sign crossover found below {SIGN_SEARCH_CAP}"
        )))
    }
}

const SIGN_SEARCH_CAP: u64 = 1 << 12;

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", SeqExpr::from(self))
    }
}

impl From<&ExpPoly> for SeqExpr {
    /// Terms in decreasing order of growth, e.g. `3 * 2^i - i^2 + 1`.
    fn from(p: &ExpPoly) -> SeqExpr {
        let mut out: Option<SeqExpr> = None;
        for ((c, k), a) in p.0.iter().rev() {
            let mut factors = Vec::new();
            if *k == 1 {
                factors.push(SeqExpr::Index);
            } else if *k > 1 {
                factors.push(SeqExpr::Pow(Box::new(SeqExpr::Index), *k));
            }
            if !c.is_one() {
                factors.insert(0, SeqExpr::Exp(c.clone()));
            }
            let mag = a.abs();
            let body = if factors.is_empty() {
                SeqExpr::Const(mag.clone())
            } else {
                let prod = factors
                    .into_iter()
                    .reduce(|x, y| SeqExpr::Mul(Box::new(x), Box::new(y)))
                    .expect("nonempty");
                if mag.is_one() {
                    prod
                } else {
                    SeqExpr::Mul(Box::new(SeqExpr::Const(mag.clone())), Box::new(prod))
                }
            };
            out = Some(match out {
                None if a.is_negative() => match body {
                    SeqExpr::Const(m) => SeqExpr::Const(-m),
                    other => SeqExpr::Neg(Box::new(other)),
                },
                None => body,
                Some(acc) if a.is_negative() => SeqExpr::Sub(Box::new(acc), Box::new(body)),
                Some(acc) => SeqExpr::Add(Box::new(acc), Box::new(body)),
            });
        }
        out.unwrap_or_else(|| SeqExpr::constant(0))
    }
}

/// `num/den` with `den` nonzero from some index on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperRational {
    num: SeqExpr,
    den: SeqExpr,
}

impl HyperRational {
    pub fn new(num: SeqExpr, den: SeqExpr) -> Result<Self, UltraError> {
        let vanishing = match den.normal_form() {
            Some(nf) => nf.is_zero(),
            None => !den.structurally_nonzero(),
        };
        if vanishing {
            return Err(UltraError::DivisorVanishesCofinally(den.to_string()));
        }
        Ok(HyperRational { num, den })
    }

    pub fn integer(num: SeqExpr) -> Self {
        HyperRational { num, den: SeqExpr::constant(1) }
    }

    pub fn num(&self) -> &SeqExpr {
        &self.num
    }

    pub fn den(&self) -> &SeqExpr {
        &self.den
    }

    /// The component at `i`; taken to be 0 at the finitely many indices where the denominator vanishes.
    pub fn eval(&self, i: u64) -> Rational {
        let d = self.den.eval(i);
        if d.is_zero() {
            return Rational::zero();
        }
        Rational::new(self.num.eval(i), d)
    }

    /// Normal forms of numerator and denominator, if both exist.
    pub fn normal_forms(&self) -> Option<(ExpPoly, ExpPoly)> {
        Some((self.num.normal_form()?, self.den.normal_form()?))
    }

    fn simplified(num: SeqExpr, den: SeqExpr) -> Result<Self, UltraError> {
        let h = HyperRational::new(num, den)?;
        Ok(match h.normal_forms() {
            Some((n, d)) => {
                let (n, d) = match d.as_constant() {
                    Some(c) if c == BigInt::from(-1) => (n.neg(), ExpPoly::term(BigInt::one(), 0, BigInt::one())),
                    _ => (n, d),
                };
                HyperRational { num: SeqExpr::from(&n), den: SeqExpr::from(&d) }
            }
            None => h,
        })
    }

    /// Equal on a cofinite set of indices.
    pub fn eq_cofinitely(&self, other: &Self) -> Result<bool, UltraError> {
        let ((n1, d1), (n2, d2)) = match (self.normal_forms(), other.normal_forms()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(UltraError::UnsupportedTruthSet("nthprime has no normal form".into())),
        };
        Ok(n1.mul(&d2).add(&n2.mul(&d1).neg()).is_zero())
    }
}

impl fmt::Display for HyperRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == SeqExpr::constant(1) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl FromStr for HyperRational {
    type Err = UltraError;

    /// `expr` or `expr / expr`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('/').collect();
        match parts.as_slice() {
            [n] => Ok(HyperRational::integer(n.parse()?)),
            [n, d] => HyperRational::new(n.parse()?, d.parse()?),
            _ => Err(UltraError::BadExpression(format!("{s}: at most one '/' is allowed"))),
        }
    }
}

fn b(e: &SeqExpr) -> Box<SeqExpr> {
    Box::new(e.clone())
}

pub fn hadd(x: &HyperRational, y: &HyperRational) -> Result<HyperRational, UltraError> {
    let num = SeqExpr::Add(Box::new(SeqExpr::Mul(b(&x.num), b(&y.den))), Box::new(SeqExpr::Mul(b(&y.num), b(&x.den))));
    HyperRational::simplified(num, SeqExpr::Mul(b(&x.den), b(&y.den)))
}

pub fn hsub(x: &HyperRational, y: &HyperRational) -> Result<HyperRational, UltraError> {
    let neg = HyperRational { num: SeqExpr::Neg(b(&y.num)), den: y.den.clone() };
    hadd(x, &neg)
}

pub fn hmul(x: &HyperRational, y: &HyperRational) -> Result<HyperRational, UltraError> {
    HyperRational::simplified(SeqExpr::Mul(b(&x.num), b(&y.num)), SeqExpr::Mul(b(&x.den), b(&y.den)))
}

pub fn hdiv(x: &HyperRational, y: &HyperRational) -> Result<HyperRational, UltraError> {
    HyperRational::simplified(SeqExpr::Mul(b(&x.num), b(&y.den)), SeqExpr::Mul(b(&x.den), b(&y.num)))
}

/// The exponent sequence `i ↦ v_p(h_i)`.
///
/// Supported when numerator and denominator are each a single term
/// `a · c^i`; the result is then `v_p(a) + i·v_p(c)` (difference of the two).
pub fn hyper_dp(p: &BigInt, h: &HyperRational) -> Result<SeqExpr, UltraError> {
    if !is_prime(p).map_err(|e| UltraError::UnsupportedValuation(e.to_string()))? {
        return Err(UltraError::NotPrime(p.clone()));
    }
    let unsupported = |what: &SeqExpr| {
        UltraError::UnsupportedValuation(format!("v_{p} of {what} is outside the closed-form fragment"))
    };
    let exponent = |e: &SeqExpr| -> Result<(BigInt, BigInt), UltraError> {
        let nf = e.normal_form().ok_or_else(|| unsupported(e))?;
        match nf.terms().iter().collect::<Vec<_>>().as_slice() {
            [((c, 0), a)] => {
                let va = vp(p, &Rational::from_integer((*a).clone())).map_err(|_| unsupported(e))?.exp;
                let vc = if c.is_one() { 0 } else { vp(p, &Rational::from_integer(c.clone())).map_err(|_| unsupported(e))?.exp };
                Ok((BigInt::from(va), BigInt::from(vc)))
            }
            [] => Err(UltraError::DivisorVanishesCofinally(e.to_string())),
            _ => Err(unsupported(e)),
        }
    };
    let (a1, c1) = exponent(&h.num)?;
    let (a2, c2) = exponent(&h.den)?;
    let nf = ExpPoly::term(BigInt::one(), 1, c1 - c2).add(&ExpPoly::term(BigInt::one(), 0, a1 - a2));
    Ok(SeqExpr::from(&nf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HyperRational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_print_eval() {
        for (text, at5) in [("i", 5), ("2^i", 32), ("i^2 + 1", 26), ("nthprime(i)", 13), ("-(3 * i) + 2^i", 17)] {
            let e: SeqExpr = text.parse().unwrap();
            assert_eq!(e.eval(5), BigInt::from(at5), "{text}");
            assert_eq!(e.to_string().parse::<SeqExpr>().unwrap(), e, "{text}");
        }
        assert_eq!(nth_prime(0), BigInt::from(2));
        for bad in ["x", "1^i", "i^i", "f(i)", "nthprime(2)", "i +"] {
            assert!(bad.parse::<SeqExpr>().is_err(), "{bad}");
        }
    }

    #[test]
    fn normal_form_printing() {
        let e: SeqExpr = "(i + 1)^2 - 2^i * 3 + 2^i".parse().unwrap();
        assert_eq!(SeqExpr::from(&e.normal_form().unwrap()).to_string(), "-(2 * 2^i) + i^2 + 2 * i + 1");
        let z: SeqExpr = "i - i".parse().unwrap();
        assert_eq!(SeqExpr::from(&z.normal_form().unwrap()).to_string(), "0");
    }

    #[test]
    fn hyper_arith_examples() {
        assert_eq!(hadd(&h("i"), &h("i")).unwrap().to_string(), "2 * i");
        let q = hdiv(&h("i^2"), &h("i")).unwrap();
        assert!(q.eq_cofinitely(&h("i")).unwrap());
        assert!(matches!(hdiv(&h("i"), &h("0")), Err(UltraError::DivisorVanishesCofinally(_))));
        assert!(matches!(hdiv(&h("i"), &h("i - i")), Err(UltraError::DivisorVanishesCofinally(_))));
        assert!(hdiv(&h("1"), &h("nthprime(i)")).is_ok());
        assert_eq!(hsub(&h("2^i"), &h("2^i")).unwrap().to_string(), "0");
        assert_eq!(hmul(&h("1/i"), &h("i")).unwrap().eval(3), Rational::from_integer(1.into()));
        assert_eq!(h("1/i").eval(0), Rational::zero());
    }

    #[test]
    fn valuation_examples() {
        let two = BigInt::from(2);
        assert_eq!(hyper_dp(&two, &h("2^i")).unwrap().to_string(), "i");
        assert_eq!(hyper_dp(&BigInt::from(3), &h("9")).unwrap(), SeqExpr::constant(2));
        assert!(matches!(hyper_dp(&two, &h("i")), Err(UltraError::UnsupportedValuation(_))));
        assert_eq!(hyper_dp(&two, &h("3 * 4^i / 8")).unwrap().to_string(), "2 * i - 3");
        assert!(matches!(hyper_dp(&BigInt::from(4), &h("2^i")), Err(UltraError::NotPrime(_))));
    }

    #[test]
    fn sign_thresholds_are_sound() {
        for text in ["i^2 - 10*i", "2^i - i^3", "3^i - 2^i * 100", "i - 1000", "5 - i^2", "1", "-i"] {
            let e: SeqExpr = text.parse().unwrap();
            let nf = e.normal_form().unwrap();
            let t = nf.sign_threshold().unwrap();
            let s = nf.lead().unwrap().2.signum();
            for i in t..t + 3000 {
                assert_eq!(nf.eval(i).signum(), s, "{text} at {i}");
            }
        }
    }
}
