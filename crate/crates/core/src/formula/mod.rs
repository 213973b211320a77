//! First-order formulas in the ring language `{+, −, ×; 0, 1}` with
//! oracle-backed atoms, a parser for their text syntax, a bounded
//! three-valued evaluator over ℚ, and the library of definable predicates.

mod builtin;
mod eval;
pub(crate) mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

pub use builtin::{builtin, builtin_names, builtin_vars};
pub use eval::{eval, eval_with, Environment, Evaluator, TriBool};
pub use parse::parse;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError { line: usize, column: usize, message: String },
    #[error("{name} expects {expected} argument(s), got {got}")]
    ArityError { name: String, expected: usize, got: usize },
    #[error("variable {0} is not bound")]
    UnboundVariable(String),
    #[error("unknown builtin {0}")]
    UnknownBuiltin(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(BigInt),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(v: i64) -> Term {
        Term::Const(v.into())
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Neg(t) | Term::Pow(t, _) => t.vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn substitute(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Neg(t) => Term::Neg(Box::new(t.substitute(map))),
            Term::Pow(t, k) => Term::Pow(Box::new(t.substitute(map)), *k),
            Term::Add(a, b) => Term::Add(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Term::Sub(a, b) => Term::Sub(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Term::Mul(a, b) => Term::Mul(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Term::Add(..) | Term::Sub(..) => 1,
            Term::Mul(..) => 2,
            Term::Neg(_) => 3,
            Term::Const(c) if c.is_negative() => 3,
            Term::Pow(..) => 4,
            Term::Var(_) | Term::Const(_) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Neg(t) => {
                write!(f, "-")?;
                // "-3" would reparse as a constant
                let min = if matches!(**t, Term::Const(_)) { 6 } else { 4 };
                t.fmt_at(f, min)
            }
            Term::Pow(t, k) => {
                t.fmt_at(f, 5)?;
                write!(f, "^{k}")
            }
            Term::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " + ")?;
                b.fmt_at(f, 2)
            }
            Term::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " - ")?;
                b.fmt_at(f, 2)
            }
            Term::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " * ")?;
                b.fmt_at(f, 3)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Oracle-backed predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pred {
    /// `Z(x)`: x is an integer.
    Z,
    /// `N(x)`: x is a nonnegative integer.
    N,
    /// `P(x)`: x is a positive prime.
    P,
    /// `pw(x, y)`: y is 1 or a power of x.
    Pw,
    /// `d_p(p, x, y)`: y is the exact power of p dividing the integer x.
    Dp,
}

impl Pred {
    pub fn name(self) -> &'static str {
        match self {
            Pred::Z => "Z",
            Pred::N => "N",
            Pred::P => "P",
            Pred::Pw => "pw",
            Pred::Dp => "d_p",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Pred::Z | Pred::N | Pred::P => 1,
            Pred::Pw => 2,
            Pred::Dp => 3,
        }
    }

    pub fn from_name(name: &str) -> Option<Pred> {
        Some(match name {
            "Z" => Pred::Z,
            "N" => Pred::N,
            "P" => Pred::P,
            "pw" => Pred::Pw,
            "d_p" => Pred::Dp,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Lt(Term, Term),
    /// `a | b` over the integers: both integral and `b = c·a` for an integer `c`.
    Divides(Term, Term),
    Atom(Pred, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    pub fn exists_many(vars: &[String], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::Exists(v.clone(), Box::new(acc)))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        let terms = |ts: &[&Term], out: &mut BTreeSet<String>| {
            let mut vs = BTreeSet::new();
            for t in ts {
                t.vars(&mut vs);
            }
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::Eq(a, b) | Formula::Lt(a, b) | Formula::Divides(a, b) => terms(&[a, b], out),
            Formula::Atom(_, args) => terms(&args.iter().collect::<Vec<_>>(), out),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let fresh = bound.insert(v.clone());
                body.collect_free(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            _ => true,
        }
    }

    /// Capture-avoiding substitution of terms for free variables.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Formula {
        let bin = |a: &Formula, b: &Formula| (Box::new(a.substitute(map)), Box::new(b.substitute(map)));
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.substitute(map), b.substitute(map)),
            Formula::Lt(a, b) => Formula::Lt(a.substitute(map), b.substitute(map)),
            Formula::Divides(a, b) => Formula::Divides(a.substitute(map), b.substitute(map)),
            Formula::Atom(p, args) => Formula::Atom(*p, args.iter().map(|t| t.substitute(map)).collect()),
            Formula::Not(a) => Formula::not(a.substitute(map)),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b);
                Formula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Iff(a, b)
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut inner = map.clone();
                inner.remove(v);
                let mut incoming = BTreeSet::new();
                for t in inner.values() {
                    t.vars(&mut incoming);
                }
                let (v2, body2) = if incoming.contains(v) {
                    let mut taken = body.free_vars();
                    taken.extend(incoming);
                    let fresh = fresh_name(v, &taken);
                    inner.insert(v.clone(), Term::Var(fresh.clone()));
                    (fresh, body.substitute(&inner))
                } else {
                    (v.clone(), body.substitute(&inner))
                };
                match self {
                    Formula::Exists(..) => Formula::Exists(v2, Box::new(body2)),
                    _ => Formula::Forall(v2, Box::new(body2)),
                }
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) => 5,
            _ => 6,
        }
    }

    // Quantifier bodies extend to the right as far as possible, so a
    // quantifier under any connective is parenthesized.
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min || (p == 0 && min > 0) {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        let bin = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8| {
            a.fmt_at(f, lmin)?;
            write!(f, " {op} ")?;
            b.fmt_at(f, rmin)
        };
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Lt(a, b) => write!(f, "{a} < {b}"),
            Formula::Divides(a, b) => write!(f, "{a} | {b}"),
            Formula::Atom(p, args) => {
                write!(f, "{}(", p.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Formula::Not(a) => {
                write!(f, "!")?;
                a.fmt_at(f, 5)
            }
            Formula::And(a, b) => bin(f, a, "&", b, 4, 5),
            Formula::Or(a, b) => bin(f, a, "or", b, 3, 4),
            Formula::Implies(a, b) => bin(f, a, "->", b, 3, 2),
            Formula::Iff(a, b) => bin(f, a, "<->", b, 1, 2),
            Formula::Exists(v, body) => {
                write!(f, "exists {v}. ")?;
                body.fmt_at(f, 0)
            }
            Formula::Forall(v, body) => {
                write!(f, "forall {v}. ")?;
                body.fmt_at(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !taken.contains(c))
        .expect("unbounded supply of names")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_vars_respect_binders() {
        let f = parse("exists y. y*y = x & P(z)").unwrap();
        assert_eq!(f.free_vars(), BTreeSet::from(["x".to_string(), "z".to_string()]));
        let g = parse("P(y) & exists y. y = 1").unwrap();
        assert_eq!(g.free_vars(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = parse("exists y. x = y + 1").unwrap();
        let g = f.substitute(&BTreeMap::from([("x".to_string(), Term::var("y"))]));
        assert_eq!(g.free_vars(), BTreeSet::from(["y".to_string()]));
        assert_eq!(g.to_string(), "exists y_1. y = y_1 + 1");
    }

    #[test]
    fn printer_parenthesizes_minimally_but_safely() {
        for text in [
            "a & b & c",
            "a & (b & c)",
            "a -> b -> c",
            "(a -> b) -> c",
            "(exists x. x = 1) & y = 2",
            "!(x = 1) or x | y",
            "x - (y - z) = -3 * x^2",
            "(-3)^2 = -(x * y)",
            "x - -3 = 0",
            "-(-3) = 3",
            "a <-> b <-> c",
        ] {
            let text = text.replace('a', "a = 0").replace('b', "b = 0").replace('c', "c = 0");
            let f = parse(&text).unwrap();
            let printed = f.to_string();
            assert_eq!(parse(&printed).unwrap(), f, "{text} printed as {printed}");
        }
    }
}
