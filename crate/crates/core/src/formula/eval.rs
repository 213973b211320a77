//! Bounded three-valued satisfaction over ℚ.
//!
//! Quantifiers range over rationals of height at most the bound, in height
//! order. A block `∃x₁…xₖ` is searched one variable at a time; before
//! enumerating, the body is partially evaluated (atoms with unbound variables
//! are unknown) so refuted branches are pruned, and variables forced by a
//! linear equation or confined to the divisors of a known integer are solved
//! for instead of enumerated. Both shortcuts only skip candidates that cannot
//! be witnesses, so a `false` from a finite domain is exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{Formula, FormulaError, Pred, Term};
use crate::arith::{is_prime, rationals_up_to_height, Sieve};
use crate::Rational;

pub type Environment = BTreeMap<String, Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TriBool {
    True,
    False,
    Unknown,
}

impl TriBool {
    pub fn from_bool(b: bool) -> TriBool {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            TriBool::True => Some(true),
            TriBool::False => Some(false),
            TriBool::Unknown => None,
        }
    }

    pub fn is_known(self) -> bool {
        self != TriBool::Unknown
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> TriBool {
        match self {
            TriBool::True => TriBool::False,
            TriBool::False => TriBool::True,
            TriBool::Unknown => TriBool::Unknown,
        }
    }

    pub fn and(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::False, _) | (_, TriBool::False) => TriBool::False,
            (TriBool::True, TriBool::True) => TriBool::True,
            _ => TriBool::Unknown,
        }
    }

    pub fn or(self, other: TriBool) -> TriBool {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: TriBool) -> TriBool {
        self.not().or(other)
    }

    pub fn iff(self, other: TriBool) -> TriBool {
        match (self.to_bool(), other.to_bool()) {
            (Some(a), Some(b)) => TriBool::from_bool(a == b),
            _ => TriBool::Unknown,
        }
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriBool::True => "true",
            TriBool::False => "false",
            TriBool::Unknown => "unknown",
        })
    }
}

/// Evaluates `f` under `env` with quantifiers ranging over heights `≤ height_bound`.
pub fn eval(f: &Formula, env: &Environment, height_bound: u64) -> Result<TriBool, FormulaError> {
    Evaluator::new(height_bound)?.eval(f, env)
}

/// Like [`eval`] but reuses an evaluator's precomputed search domain.
pub fn eval_with(ev: &Evaluator, f: &Formula, env: &Environment) -> Result<TriBool, FormulaError> {
    ev.eval(f, env)
}

/// A height bound together with its enumerated search domain.
#[derive(Debug, Clone)]
pub struct Evaluator {
    bound: u64,
    domain: Vec<Rational>,
    integers: Vec<Rational>,
}

enum Constraint<'a> {
    Eq(&'a Term, &'a Term),
    Divides(&'a Term, &'a Term),
    Integer(&'a Term),
    Natural(&'a Term),
}

impl Evaluator {
    pub fn new(height_bound: u64) -> Result<Evaluator, FormulaError> {
        if height_bound == 0 {
            return Err(FormulaError::BadParameter("height bound must be positive".into()));
        }
        let domain = rationals_up_to_height(height_bound);
        let integers = domain.iter().filter(|q| q.is_integer()).cloned().collect();
        Ok(Evaluator { bound: height_bound, domain, integers })
    }

    pub fn height_bound(&self) -> u64 {
        self.bound
    }

    pub fn eval(&self, f: &Formula, env: &Environment) -> Result<TriBool, FormulaError> {
        if let Some(v) = f.free_vars().into_iter().find(|v| !env.contains_key(v)) {
            return Err(FormulaError::UnboundVariable(v));
        }
        Ok(self.partial(f, env))
    }

    fn partial(&self, f: &Formula, env: &Environment) -> TriBool {
        match f {
            Formula::Eq(a, b) => match (value(a, env), value(b, env)) {
                (Some(x), Some(y)) => TriBool::from_bool(x == y),
                _ => TriBool::Unknown,
            },
            Formula::Lt(a, b) => match (value(a, env), value(b, env)) {
                (Some(x), Some(y)) => TriBool::from_bool(x < y),
                _ => TriBool::Unknown,
            },
            Formula::Divides(a, b) => match (value(a, env), value(b, env)) {
                (Some(x), Some(y)) => TriBool::from_bool(divides(&x, &y)),
                _ => TriBool::Unknown,
            },
            Formula::Atom(p, args) => {
                let vals: Option<Vec<Rational>> = args.iter().map(|t| value(t, env)).collect();
                match vals {
                    Some(v) => atom(*p, &v),
                    None => TriBool::Unknown,
                }
            }
            Formula::Not(a) => self.partial(a, env).not(),
            Formula::And(a, b) => match self.partial(a, env) {
                TriBool::False => TriBool::False,
                l => l.and(self.partial(b, env)),
            },
            Formula::Or(a, b) => match self.partial(a, env) {
                TriBool::True => TriBool::True,
                l => l.or(self.partial(b, env)),
            },
            Formula::Implies(a, b) => match self.partial(a, env) {
                TriBool::False => TriBool::True,
                l => l.implies(self.partial(b, env)),
            },
            Formula::Iff(a, b) => self.partial(a, env).iff(self.partial(b, env)),
            Formula::Exists(..) | Formula::Forall(..) => {
                // searching under an incomplete assignment is wasted work
                if f.free_vars().iter().any(|v| !env.contains_key(v)) {
                    return TriBool::Unknown;
                }
                let (universal, vars, body) = block(f);
                let mut inner = env.clone();
                for v in &vars {
                    inner.remove(v);
                }
                if universal {
                    self.search(&vars, body, false, &mut inner).not()
                } else {
                    self.search(&vars, body, true, &mut inner)
                }
            }
        }
    }

    /// Is there an assignment of `vars` making `body` evaluate to `want`?
    fn search(&self, vars: &[String], body: &Formula, want: bool, env: &mut Environment) -> TriBool {
        let now = self.partial(body, env);
        let now = if want { now } else { now.not() };
        if now.is_known() || vars.is_empty() {
            return now;
        }
        let mut cons = Vec::new();
        self.forced(body, want, env, &mut cons);

        for c in &cons {
            if let Constraint::Eq(a, b) = c {
                for (k, v) in vars.iter().enumerate() {
                    match solve_linear(a, b, v, env) {
                        Solved::Value(x) => {
                            let rest = without(vars, k);
                            env.insert(v.clone(), x);
                            let r = self.search(&rest, body, want, env);
                            env.remove(v);
                            return r;
                        }
                        Solved::Contradiction => return TriBool::False,
                        Solved::Nothing => {}
                    }
                }
            }
        }
        for c in &cons {
            if let Constraint::Divides(Term::Var(v), t) = c {
                let Some(k) = vars.iter().position(|x| x == v) else { continue };
                let Some(n) = value(t, env) else { continue };
                if !n.is_integer() || n.is_zero() {
                    continue;
                }
                let Ok(ds) = signed_divisors(&n.to_integer()) else { continue };
                let candidates: Vec<Rational> = ds.into_iter().map(Rational::from_integer).collect();
                return self.enumerate(vars, k, candidates.iter(), true, body, want, env);
            }
        }
        let mut pick = (0, false);
        for c in &cons {
            let (Constraint::Integer(Term::Var(v)) | Constraint::Natural(Term::Var(v))) = c else { continue };
            if let Some(k) = vars.iter().position(|x| x == v) {
                pick = (k, true);
                if matches!(c, Constraint::Natural(_)) {
                    let nats = self.integers.iter().filter(|q| !q.is_negative());
                    return self.enumerate(vars, k, nats, false, body, want, env);
                }
            }
        }
        match pick {
            (k, true) => self.enumerate(vars, k, self.integers.iter(), false, body, want, env),
            _ => self.enumerate(vars, 0, self.domain.iter(), false, body, want, env),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate<'c>(
        &self,
        vars: &[String],
        k: usize,
        candidates: impl Iterator<Item = &'c Rational>,
        exhaustive: bool,
        body: &Formula,
        want: bool,
        env: &mut Environment,
    ) -> TriBool {
        let v = &vars[k];
        let rest = without(vars, k);
        let mut unknown = !exhaustive;
        for x in candidates {
            env.insert(v.clone(), x.clone());
            let r = self.search(&rest, body, want, env);
            env.remove(v);
            match r {
                TriBool::True => return TriBool::True,
                TriBool::Unknown => unknown = true,
                TriBool::False => {}
            }
        }
        if unknown {
            TriBool::Unknown
        } else {
            TriBool::False
        }
    }

    /// Atomic constraints every witness must satisfy for `f` to evaluate to `want`.
    fn forced<'f>(&self, f: &'f Formula, want: bool, env: &Environment, out: &mut Vec<Constraint<'f>>) {
        let is = |g: &Formula, t: TriBool| self.partial(g, env) == t;
        match (f, want) {
            (Formula::Eq(a, b), true) => out.push(Constraint::Eq(a, b)),
            (Formula::Divides(a, b), true) => {
                out.push(Constraint::Divides(a, b));
                out.push(Constraint::Integer(a));
                out.push(Constraint::Integer(b));
            }
            (Formula::Atom(Pred::Z, args), true) => out.push(Constraint::Integer(&args[0])),
            (Formula::Atom(Pred::N | Pred::P, args), true) => out.push(Constraint::Natural(&args[0])),
            (Formula::Atom(Pred::Pw, args), true) => {
                out.push(Constraint::Natural(&args[0]));
                out.push(Constraint::Natural(&args[1]));
            }
            (Formula::Atom(Pred::Dp, args), true) => {
                out.push(Constraint::Divides(&args[2], &args[1]));
                out.push(Constraint::Integer(&args[1]));
                out.push(Constraint::Natural(&args[2]));
            }
            (Formula::Not(a), w) => self.forced(a, !w, env, out),
            (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
                self.forced(a, want, env, out);
                self.forced(b, want, env, out);
            }
            (Formula::Implies(a, b), false) => {
                self.forced(a, true, env, out);
                self.forced(b, false, env, out);
            }
            (Formula::Or(a, b), true) => {
                if is(a, TriBool::False) {
                    self.forced(b, true, env, out);
                } else if is(b, TriBool::False) {
                    self.forced(a, true, env, out);
                }
            }
            (Formula::And(a, b), false) => {
                if is(a, TriBool::True) {
                    self.forced(b, false, env, out);
                } else if is(b, TriBool::True) {
                    self.forced(a, false, env, out);
                }
            }
            (Formula::Implies(a, b), true) => {
                if is(a, TriBool::True) {
                    self.forced(b, true, env, out);
                } else if is(b, TriBool::False) {
                    self.forced(a, false, env, out);
                }
            }
            _ => {}
        }
    }
}

fn block(f: &Formula) -> (bool, Vec<String>, &Formula) {
    let universal = matches!(f, Formula::Forall(..));
    let mut vars = Vec::new();
    let mut cur = f;
    loop {
        match (cur, universal) {
            (Formula::Exists(v, body), false) | (Formula::Forall(v, body), true) => {
                // an inner rebinding of the same name shadows the outer one
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
                cur = body;
            }
            _ => break,
        }
    }
    (universal, vars, cur)
}

fn without(vars: &[String], k: usize) -> Vec<String> {
    let mut rest = vars.to_vec();
    rest.remove(k);
    rest
}

pub(crate) fn value(t: &Term, env: &Environment) -> Option<Rational> {
    Some(match t {
        Term::Var(v) => env.get(v)?.clone(),
        Term::Const(c) => Rational::from_integer(c.clone()),
        Term::Neg(a) => -value(a, env)?,
        Term::Add(a, b) => value(a, env)? + value(b, env)?,
        Term::Sub(a, b) => value(a, env)? - value(b, env)?,
        Term::Mul(a, b) => value(a, env)? * value(b, env)?,
        Term::Pow(a, k) => num_traits::pow(value(a, env)?, *k as usize),
    })
}

/// Coefficients (constant first) of `t` as a polynomial in `v`, if every
/// other variable is bound.
fn poly(t: &Term, v: &str, env: &Environment) -> Option<Vec<Rational>> {
    fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }
    fn add(a: Vec<Rational>, b: Vec<Rational>, sign: i64) -> Vec<Rational> {
        let n = a.len().max(b.len());
        let s = Rational::from_integer(sign.into());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
                let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
                x + y * &s
            })
            .collect();
        trim(out)
    }
    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }
    Some(match t {
        Term::Var(x) if x == v => vec![Rational::zero(), Rational::one()],
        Term::Var(_) | Term::Const(_) => trim(vec![value(t, env)?]),
        Term::Neg(a) => add(Vec::new(), poly(a, v, env)?, -1),
        Term::Add(a, b) => add(poly(a, v, env)?, poly(b, v, env)?, 1),
        Term::Sub(a, b) => add(poly(a, v, env)?, poly(b, v, env)?, -1),
        Term::Mul(a, b) => mul(&poly(a, v, env)?, &poly(b, v, env)?),
        Term::Pow(a, k) => {
            let base = poly(a, v, env)?;
            let mut acc = vec![Rational::one()];
            for _ in 0..*k {
                acc = mul(&acc, &base);
            }
            acc
        }
    })
}

enum Solved {
    Value(Rational),
    Contradiction,
    Nothing,
}

fn solve_linear(a: &Term, b: &Term, v: &str, env: &Environment) -> Solved {
    let diff = Term::Sub(Box::new(a.clone()), Box::new(b.clone()));
    match poly(&diff, v, env).as_deref() {
        Some([]) | None => Solved::Nothing,
        Some([_]) => Solved::Contradiction,
        Some([c0, c1]) => Solved::Value(-c0 / c1),
        Some(_) => Solved::Nothing,
    }
}

fn signed_divisors(n: &BigInt) -> Result<Vec<BigInt>, crate::arith::ArithError> {
    let mut ds = vec![BigInt::one()];
    for (p, e) in Sieve::shared().factor(&n.abs())? {
        let mut next = Vec::new();
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        ds = next;
    }
    ds.sort();
    Ok(ds.iter().flat_map(|d| [d.clone(), -d]).collect())
}

fn divides(a: &Rational, b: &Rational) -> bool {
    if !a.is_integer() || !b.is_integer() {
        return false;
    }
    if a.is_zero() {
        return b.is_zero();
    }
    (b.numer() % a.numer()).is_zero()
}

fn is_nat(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

fn prime(x: &Rational) -> TriBool {
    if !x.is_integer() || x.numer() < &BigInt::from(2) {
        return TriBool::False;
    }
    match is_prime(x.numer()) {
        Ok(b) => TriBool::from_bool(b),
        Err(_) => TriBool::Unknown,
    }
}

// y = 1, or x = 1, or x prime and y a positive power of x
fn pw(x: &Rational, y: &Rational) -> TriBool {
    if !is_nat(x) || !is_nat(y) {
        return TriBool::False;
    }
    if y.is_one() || x.is_one() {
        return TriBool::True;
    }
    let (x, mut y) = (x.numer().clone(), y.numer().clone());
    if y < BigInt::from(2) || x < BigInt::from(2) {
        return TriBool::False;
    }
    while (&y % &x).is_zero() {
        y /= &x;
    }
    if !y.is_one() {
        return TriBool::False;
    }
    prime(&Rational::from_integer(x))
}

fn atom(p: Pred, args: &[Rational]) -> TriBool {
    match p {
        Pred::Z => TriBool::from_bool(args[0].is_integer()),
        Pred::N => TriBool::from_bool(is_nat(&args[0])),
        Pred::P => prime(&args[0]),
        Pred::Pw => pw(&args[0], &args[1]),
        Pred::Dp => {
            let (p, x, y) = (&args[0], &args[1], &args[2]);
            TriBool::from_bool(x.is_integer())
                .and(pw(p, y))
                .and(TriBool::from_bool(divides(y, x)))
                .and(TriBool::from_bool(!divides(&(p * y), x)))
        }
    }
}
