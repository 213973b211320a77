//! The library of definable predicates, written in the formula syntax and
//! parsed on demand.
//!
//! Free variables per builtin are listed by [`builtin_vars`]. Points of a
//! curve are projective triples `(x0, x1, x2)` with `x2 ∈ {0, 1}`.

use std::collections::BTreeMap;

use super::{parse, Formula, FormulaError, Term};

const STATIC: &[(&str, &str, &[&str])] = &[
    ("Z", "Z(x)", &["x"]),
    ("N", "N(x)", &["x"]),
    (
        "N'",
        "exists w1 w2 w3 w4. Z(w1) & Z(w2) & Z(w3) & Z(w4) & x = w1^2 + w2^2 + w3^2 + w4^2",
        &["x"],
    ),
    ("divides", "Z(x) & Z(y) & exists w. Z(w) & w != 0 & y = w * x", &["x", "y"]),
    ("P", "N(x) & x != 1 & forall w. w | x -> w = 1 or w = -1 or w = x or w = -x", &["x"]),
    ("pw", "N(x) & N(y) & (y = 1 or forall w. N(w) & w != 1 & w | y -> x | w)", &["x", "y"]),
    ("pw'", "pw(x, y) or exists w. pw(x, w) & w * y = 1", &["x", "y"]),
    ("d_p", "Z(x) & pw(p, y) & y | x & !(p * y | x)", &["p", "x", "y"]),
    (
        "d_p'",
        "x != 0 & exists u1 u2 v1 v2. u2 * x = u1 & d_p(p, u1, v1) & d_p(p, u2, v2) & v2 * y = v1",
        &["p", "x", "y"],
    ),
    (
        "lt",
        "exists u1 u2 v1 v2. Z(u1) & N(u2) & u2 != 0 & Z(v1) & N(v2) & v2 != 0 \
         & x * u2 = u1 & y * v2 = v1 & N(v1 * u2 - u1 * v2) & v1 * u2 - u1 * v2 != 0",
        &["x", "y"],
    ),
    (
        "E",
        "(y^2 = x^3 + a * x + b & z = 1 or x = 0 & y = 1 & z = 0) & 4 * a^3 + 27 * b^2 != 0",
        &["a", "b", "x", "y", "z"],
    ),
];

const POINT_VARS: [&str; 11] = ["a", "b", "x0", "x1", "x2", "y0", "y1", "y2", "z0", "z1", "z2"];

// Case split for X + Y = Z. Slopes are cleared of denominators; each case is
// guarded so exactly one applies to a pair of points.
const ADD_CASES: &str = "\
    (x2 = 0 -> z0 = y0 & z1 = y1 & z2 = y2) \
  & (y2 = 0 -> z0 = x0 & z1 = x1 & z2 = x2) \
  & (x2 = 1 & y2 = 1 & x0 = y0 & x1 != y1 -> z0 = 0 & z1 = 1 & z2 = 0) \
  & (x2 = 1 & y2 = 1 & x0 = y0 & x1 = y1 & x1 = 0 -> z0 = 0 & z1 = 1 & z2 = 0) \
  & (x2 = 1 & y2 = 1 & x0 = y0 & x1 = y1 & x1 != 0 -> \
        z0 * (2 * x1)^2 = (3 * x0^2 + a)^2 - (x0 + y0) * (2 * x1)^2 \
      & z1 * (2 * x1) = -(3 * x0^2 + a) * (z0 - x0) - x1 * (2 * x1) \
      & z2 = 1) \
  & (x2 = 1 & y2 = 1 & x0 != y0 -> \
        z0 * (y0 - x0)^2 = (y1 - x1)^2 - (x0 + y0) * (y0 - x0)^2 \
      & z1 * (y0 - x0) = -(y1 - x1) * (z0 - x0) - x1 * (y0 - x0) \
      & z2 = 1)";

// The printed slope terms: y0 in the tangent denominator, -x0-x1 in both
// x-coordinates and the chord y-coordinate with its printed sign. The
// printed clauses are joined by "or"; they are read here as a guarded case
// split, since the disjunction is satisfied by any triple.
const ADD_CASES_VERBATIM: &str = "\
    (x2 = 0 -> z0 = y0 & z1 = y1 & z2 = y2) \
  & (y2 = 0 -> z0 = x0 & z1 = x1 & z2 = x2) \
  & (x2 = 1 & y2 = 1 & x0 = y0 & x1 != y1 -> z0 = 0 & z1 = 1 & z2 = 0) \
  & (x2 = 1 & y2 = 1 & x0 = y0 & x1 = y1 & y0 = 0 -> z0 = 0 & z1 = 1 & z2 = 0) \
  & (x2 = 1 & y2 = 1 & x0 = y0 & x1 = y1 & y0 != 0 -> \
        z0 * (2 * y0)^2 = (3 * x0^2 + a)^2 - (x0 + x1) * (2 * y0)^2 \
      & z1 * (2 * y0) = -(3 * x0^2 + a) * z0 - (x1 * (2 * y0) - (3 * x0^2 + a) * x0) \
      & z2 = 1) \
  & (x2 = 1 & y2 = 1 & x0 != y0 -> \
        z0 * (y0 - x0)^2 = (y1 - x1)^2 - (x0 + x1) * (y0 - x0)^2 \
      & z1 * (y0 - x0) = (y1 - x1) * z0 - (y0 * x1 - y1 * x0) \
      & z2 = 1)";

/// Names accepted by [`builtin`]; `nE(k)` and `simEn(k)` take any `k ≥ 2`.
pub fn builtin_names() -> Vec<&'static str> {
    let mut names: Vec<&str> = STATIC.iter().map(|s| s.0).collect();
    names.extend(["addE", "addE_verbatim", "nE(k)", "simEn(k)"]);
    names
}

/// Free variables of a builtin, in the order they are conventionally bound.
pub fn builtin_vars(name: &str) -> Result<Vec<&'static str>, FormulaError> {
    if let Some(s) = STATIC.iter().find(|s| s.0 == name) {
        return Ok(s.2.to_vec());
    }
    match parse_call(name)? {
        ("addE" | "addE_verbatim", None) => Ok(POINT_VARS.to_vec()),
        ("nE", Some(_)) => Ok(POINT_VARS[..5].to_vec()),
        ("simEn", Some(_)) => Ok(POINT_VARS[..8].to_vec()),
        _ => Err(FormulaError::UnknownBuiltin(name.to_string())),
    }
}

fn parse_call(name: &str) -> Result<(&str, Option<u32>), FormulaError> {
    let Some(open) = name.find('(') else { return Ok((name, None)) };
    let head = &name[..open];
    let arg = name[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| FormulaError::UnknownBuiltin(name.to_string()))?;
    let k: i64 = arg
        .trim()
        .parse()
        .map_err(|_| FormulaError::BadParameter(format!("{head}: '{arg}' is not an integer")))?;
    if !matches!(head, "nE" | "simEn") {
        return Err(FormulaError::UnknownBuiltin(name.to_string()));
    }
    if k < 2 {
        return Err(FormulaError::BadParameter(format!("{head} needs k >= 2, got {k}")));
    }
    let k = u32::try_from(k).map_err(|_| FormulaError::BadParameter(format!("{head}: k = {k} is too large")))?;
    Ok((head, Some(k)))
}

/// The formula named `name`, e.g. `"P"`, `"addE"` or `"nE(3)"`.
pub fn builtin(name: &str) -> Result<Formula, FormulaError> {
    if let Some(s) = STATIC.iter().find(|s| s.0 == name) {
        return Ok(parse(s.1).expect("builtin formulas parse"));
    }
    match parse_call(name)? {
        ("addE", None) => Ok(add_formula(ADD_CASES)),
        ("addE_verbatim", None) => Ok(add_formula(ADD_CASES_VERBATIM)),
        ("nE", Some(k)) => Ok(multiple(k)),
        ("simEn", Some(k)) => Ok(equivalent_mod(k)),
        _ => Err(FormulaError::UnknownBuiltin(name.to_string())),
    }
}

fn point(prefix: &str) -> [String; 3] {
    [0, 1, 2].map(|i| format!("{prefix}{i}"))
}

fn curve_at(p: &[String; 3]) -> Formula {
    let e = builtin("E").expect("E is static");
    let map = BTreeMap::from([
        ("x".to_string(), Term::Var(p[0].clone())),
        ("y".to_string(), Term::Var(p[1].clone())),
        ("z".to_string(), Term::Var(p[2].clone())),
    ]);
    e.substitute(&map)
}

fn add_formula(cases: &str) -> Formula {
    let cases = parse(cases).expect("addition cases parse");
    let on_curve = ["x", "y", "z"].map(|p| curve_at(&point(p)));
    let [ex, ey, ez] = on_curve;
    Formula::and(Formula::and(Formula::and(ex, ey), ez), cases)
}

/// `addE` with its three points renamed.
fn add_at(x: &[String; 3], y: &[String; 3], z: &[String; 3]) -> Formula {
    let mut map = BTreeMap::new();
    for (prefix, p) in [("x", x), ("y", y), ("z", z)] {
        for (i, v) in point(prefix).into_iter().enumerate() {
            map.insert(v, Term::Var(p[i].clone()));
        }
    }
    add_formula(ADD_CASES).substitute(&map)
}

// E(x) ∧ ∃ q1..qk. q1 + q1 = q2 ∧ q2 + q1 = q3 ∧ … ∧ qk = x
fn multiple(k: u32) -> Formula {
    let x = point("x");
    let qs: Vec<[String; 3]> = (1..=k).map(|i| point(&format!("q{i}_"))).collect();
    let mut parts = Vec::new();
    for i in 0..(k as usize - 1) {
        parts.push(add_at(&qs[i], &qs[0], &qs[i + 1]));
    }
    let last = &qs[k as usize - 1];
    for c in 0..3 {
        parts.push(Formula::Eq(Term::Var(last[c].clone()), Term::Var(x[c].clone())));
    }
    let bound: Vec<String> = qs.iter().flat_map(|q| q.iter().cloned()).collect();
    let body = Formula::and_all(parts).expect("k >= 2");
    Formula::and(curve_at(&x), Formula::exists_many(&bound, body))
}

// x ∼ y  ⇔  ∃w. nE(w) ∧ x + w = y
fn equivalent_mod(k: u32) -> Formula {
    let w = point("w");
    let mut map = BTreeMap::new();
    for (i, v) in point("x").into_iter().enumerate() {
        map.insert(v, Term::Var(w[i].clone()));
    }
    let w_multiple = multiple(k).substitute(&map);
    let body = Formula::and(w_multiple, add_at(&point("x"), &w, &point("y")));
    Formula::exists_many(&w, body)
}
