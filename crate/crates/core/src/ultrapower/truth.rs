use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::seq::{hadd, hmul, hsub, ExpPoly, HyperRational, SeqExpr};
use super::{PeriodicSet, UltraError, UltrafilterOracle};
use crate::formula::{Environment, Evaluator, Formula, Term, TriBool};

/// Values of the free variables.
pub type Args = BTreeMap<String, HyperRational>;

const MAX_PERIOD: u64 = 1_000_000;

/// `(modulus, threshold)`: truth is periodic with this modulus from the threshold on.
type Shape = (u64, u64);

fn join(a: Shape, b: Shape) -> Result<Shape, UltraError> {
    let m = a.0.lcm(&b.0);
    if m > MAX_PERIOD {
        return Err(UltraError::UnsupportedTruthSet(format!("combined period {m} is too large")));
    }
    Ok((m, a.1.max(b.1)))
}

fn unsupported(msg: impl Into<String>) -> UltraError {
    UltraError::UnsupportedTruthSet(msg.into())
}

/// The set of indices `i` at which `f` holds of the `i`-th components.
///
/// Components of a quotient whose denominator vanishes are read as 0.
pub fn truth_set(f: &Formula, args: &Args) -> Result<PeriodicSet, UltraError> {
    if !f.is_quantifier_free() {
        return Err(unsupported("quantified formulas have no componentwise truth set here"));
    }
    if let Some(v) = f.free_vars().into_iter().find(|v| !args.contains_key(v)) {
        return Err(UltraError::UnboundVariable(v));
    }
    let mut shape = (1, 0);
    for h in args.values() {
        shape = join(shape, (1, nonvanishing_from(h.den())?))?;
    }
    shape = join(shape, analyse(f, args)?)?;
    let ev = Evaluator::new(1)?;
    let mut failure = None;
    let set = PeriodicSet::from_fn(shape.0, shape.1, |i| {
        let env: Environment = args.iter().map(|(k, h)| (k.clone(), h.eval(i))).collect();
        match ev.eval(f, &env) {
            Ok(TriBool::True) => true,
            Ok(TriBool::False) => false,
            Ok(TriBool::Unknown) => {
                failure.get_or_insert_with(|| unsupported(format!("atom undecided at index {i}")));
                false
            }
            Err(e) => {
                failure.get_or_insert(e.into());
                false
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(set),
    }
}

/// Łoś: `f` holds in the ultrapower iff its truth set is large.
pub fn los_eval(u: &mut UltrafilterOracle, f: &Formula, args: &Args) -> Result<bool, UltraError> {
    Ok(u.decide(&truth_set(f, args)?))
}

/// Index from which `s` is never zero.
fn nonvanishing_from(s: &SeqExpr) -> Result<u64, UltraError> {
    match s.normal_form() {
        Some(nf) if nf.is_zero() => Err(UltraError::DivisorVanishesCofinally(s.to_string())),
        Some(nf) => nf.sign_threshold(),
        None => Ok(0),
    }
}

fn analyse(f: &Formula, args: &Args) -> Result<Shape, UltraError> {
    match f {
        Formula::Not(a) => analyse(a, args),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            join(analyse(a, args)?, analyse(b, args)?)
        }
        Formula::Eq(s, t) => {
            let d = sequence(&Term::Sub(Box::new(s.clone()), Box::new(t.clone())), args)?;
            sign_shape(&d)
        }
        Formula::Lt(s, t) => {
            let d = sequence(&Term::Sub(Box::new(t.clone()), Box::new(s.clone())), args)?;
            sign_shape(&d)
        }
        Formula::Divides(s, t) => {
            let (s, t) = (sequence(s, args)?, sequence(t, args)?);
            if let Some(shape) = constant_shape(&[&s, &t]) {
                return Ok(shape);
            }
            let c = integer_constant(&s).ok_or_else(|| {
                unsupported(format!("divisibility by the nonconstant sequence {s} is outside the fragment"))
            })?;
            if c.is_zero() {
                return sign_shape(&t);
            }
            residue_shape(&t, &c)
        }
        Formula::Atom(p, terms) => {
            let seqs = terms.iter().map(|t| sequence(t, args)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&HyperRational> = seqs.iter().collect();
            if let Some(shape) = constant_shape(&refs) {
                return Ok(shape);
            }
            match p.name() {
                "Z" => residue_shape(&seqs[0], &BigInt::one()),
                "N" => join(residue_shape(&seqs[0], &BigInt::one())?, sign_shape(&seqs[0])?),
                other => Err(unsupported(format!("{other} of a nonconstant sequence is outside the fragment"))),
            }
        }
        Formula::Exists(..) | Formula::Forall(..) => Err(unsupported("quantifier")),
    }
}

fn sequence(t: &Term, args: &Args) -> Result<HyperRational, UltraError> {
    let rec = |a: &Term| sequence(a, args);
    Ok(match t {
        Term::Var(v) => args.get(v).cloned().ok_or_else(|| UltraError::UnboundVariable(v.clone()))?,
        Term::Const(c) => HyperRational::integer(SeqExpr::Const(c.clone())),
        Term::Neg(a) => hsub(&HyperRational::integer(SeqExpr::constant(0)), &rec(a)?)?,
        Term::Add(a, b) => hadd(&rec(a)?, &rec(b)?)?,
        Term::Sub(a, b) => hsub(&rec(a)?, &rec(b)?)?,
        Term::Mul(a, b) => hmul(&rec(a)?, &rec(b)?)?,
        Term::Pow(a, k) => {
            let base = rec(a)?;
            let mut acc = HyperRational::integer(SeqExpr::constant(1));
            for _ in 0..*k {
                acc = hmul(&acc, &base)?;
            }
            acc
        }
    })
}

fn forms(h: &HyperRational) -> Result<(ExpPoly, ExpPoly), UltraError> {
    h.normal_forms().ok_or_else(|| unsupported(format!("{h} involves nthprime(i)")))
}

/// Every argument constant: the truth value is constant too.
fn constant_shape(hs: &[&HyperRational]) -> Option<Shape> {
    hs.iter()
        .all(|h| h.normal_forms().is_some_and(|(n, d)| n.as_constant().is_some() && d.as_constant().is_some()))
        .then_some((1, 0))
}

fn integer_constant(h: &HyperRational) -> Option<BigInt> {
    let (n, d) = h.normal_forms()?;
    let (n, d) = (n.as_constant()?, d.as_constant()?);
    n.is_multiple_of(&d).then(|| n / d)
}

/// Eventually of constant sign (or identically zero).
fn sign_shape(h: &HyperRational) -> Result<Shape, UltraError> {
    let (n, d) = forms(h)?;
    let tn = if n.is_zero() { 0 } else { n.sign_threshold()? };
    Ok((1, tn.max(d.sign_threshold()?)))
}

/// Shape of `c | h` for a nonzero integer `c`, i.e. of `num ≡ 0 (mod |c·den|)`.
fn residue_shape(h: &HyperRational, c: &BigInt) -> Result<Shape, UltraError> {
    let (n, d) = forms(h)?;
    let d = d.as_constant().ok_or_else(|| {
        unsupported(format!("integrality of {h} with a nonconstant denominator is outside the fragment"))
    })?;
    let k = (c * d).abs();
    if k.is_one() || n.is_zero() {
        return Ok((1, 0));
    }
    residue_period(&n, &k)
}

/// Preperiod and period of `i ↦ n(i) mod k`, from the first repeated state
/// `(i mod k, c^i mod k for each base c)`.
fn residue_period(n: &ExpPoly, k: &BigInt) -> Result<Shape, UltraError> {
    let polynomial = n.terms().keys().any(|(_, deg)| *deg > 0);
    let bases: Vec<BigInt> = n
        .terms()
        .keys()
        .map(|(c, _)| c.clone())
        .filter(|c| !c.is_one())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let ku = k.to_u64();
    let mut seen: BTreeMap<(u64, Vec<BigInt>), u64> = BTreeMap::new();
    let mut powers: Vec<BigInt> = vec![BigInt::one() % k; bases.len()];
    for i in 0..=MAX_PERIOD {
        let idx = match (polynomial, ku) {
            (false, _) => 0,
            (true, Some(ku)) => i % ku,
            (true, None) => i,
        };
        if let Some(start) = seen.insert((idx, powers.clone()), i) {
            return Ok((i - start, start));
        }
        for (p, c) in powers.iter_mut().zip(&bases) {
            *p = (&*p * c).mod_floor(k);
        }
    }
    Err(unsupported(format!("residues modulo {k} do not repeat within {MAX_PERIOD} steps")))
}
