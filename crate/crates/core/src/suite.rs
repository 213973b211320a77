//! The acceptance battery: twelve deterministic property checks across every
//! module, each with a fixed seed and an independent oracle where one exists.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{factor_embed, factor_reconstruct, is_prime, vp, PrimeSet};
use crate::elliptic::{parse_dataset, weak_mw_quotient, CurvePoint, DEFAULT_DATASET};
use crate::formula::{builtin, eval, parse, Environment, Evaluator, Formula, TriBool};
use crate::ideals::{
    galois_checks, radical_prime_exhaustive, Dvr, FGIdeal, FilterDesc, PrTable, SemigroupModel, WindowSubset,
};
use crate::ultrapower::{
    hyper_dp, los_eval, quotient_bound_check, truth_set, Args, PeriodicSet, SeqExpr, UltraError, UltrafilterOracle,
};
use crate::{Curve, Point, Rational};

/// At most this many counterexamples are kept per check.
const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
    pub notes: Vec<String>,
    pub limit_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub status: Status,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// `(id, name, time limit in ms)`.
pub const CHECKS: [(u8, &str, u64); 12] = [
    (1, "factorization round trip", 5_000),
    (2, "valuation axioms", 5_000),
    (3, "elliptic group axioms and addition formula", 60_000),
    (4, "weak Mordell-Weil sandwich", 30_000),
    (5, "module quotient bound", 30_000),
    (6, "Los equivalence for principal oracles", 10_000),
    (7, "ultrafilter laws and replay", 10_000),
    (8, "unbounded 2-adic valuation", 1_000),
    (9, "Galois connection of ideals and filters", 10_000),
    (10, "radical iff prime, exhaustively", 30_000),
    (11, "valuation ideal correspondence", 5_000),
    (12, "determinism", 300_000),
];

#[derive(Default)]
struct Tally {
    cases: u64,
    failures: u64,
    counterexamples: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(what);
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

/// Runs one check by id.
///
/// # Panics
/// If `id` is not in `1..=12`.
pub fn run_check(id: u8) -> CheckResult {
    let &(_, name, limit_ms) = CHECKS.iter().find(|c| c.0 == id).expect("check id in 1..=12");
    let mut t = Tally::default();
    match id {
        1 => factorization(&mut t),
        2 => valuations(&mut t),
        3 => group_law(&mut t),
        4 => weak_mw(&mut t),
        5 => module_quotients(&mut t),
        6 => los(&mut t),
        7 => ultrafilter_laws(&mut t),
        8 => two_adic(&mut t),
        9 => galois(&mut t),
        10 => radical_prime(&mut t),
        11 => correspondence(&mut t),
        _ => determinism(&mut t),
    }
    CheckResult {
        id,
        name: name.to_string(),
        passed: t.failures == 0,
        cases: t.cases,
        failures: t.failures,
        counterexamples: t.counterexamples,
        notes: t.notes,
        limit_ms,
        elapsed_ms: None,
    }
}

/// Runs the given checks in order; with `timings` the report carries wall-clock times.
pub fn run_suite(ids: &[u8], timings: bool) -> RunReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    for &id in ids {
        let t0 = Instant::now();
        let mut r = run_check(id);
        if timings {
            r.elapsed_ms = Some(t0.elapsed().as_millis() as u64);
        }
        checks.push(r);
    }
    let status = if checks.iter().all(|c| c.passed) { Status::Pass } else { Status::Fail };
    RunReport { status, checks, elapsed_ms: timings.then(|| start.elapsed().as_millis() as u64) }
}

/// Every check id.
pub fn all_ids() -> Vec<u8> {
    CHECKS.iter().map(|c| c.0).collect()
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn random_sign(rng: &mut ChaCha8Rng) -> i64 {
    if rng.gen_bool(0.5) {
        1
    } else {
        -1
    }
}

/// A positive integer `≤ bound`: uniform half the time, smooth otherwise.
fn random_positive(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    if rng.gen_bool(0.5) {
        return rng.gen_range(1..=bound);
    }
    let mut n = 1i64;
    for _ in 0..rng.gen_range(0..12) {
        let p = *[2i64, 3, 5, 7, 11, 13, 101, 9973].choose(rng).unwrap();
        if n * p > bound {
            break;
        }
        n *= p;
    }
    n
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let num = random_sign(rng) * random_positive(rng, bound);
    Rational::new(num.into(), random_positive(rng, bound).into())
}

/// Trial-division valuation, written out independently of the library.
fn naive_v(p: i64, x: &Rational) -> i64 {
    let strip = |mut n: BigInt| {
        let mut e = 0i64;
        while (&n % p).is_zero() {
            n /= p;
            e += 1;
        }
        e
    };
    strip(x.numer().abs()) - strip(x.denom().clone())
}

fn factorization(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f1);
    let bound = 1_000_000_000;
    for _ in 0..1000 {
        let x = random_rational(&mut rng, bound);
        let f = match factor_embed(&x) {
            Ok(f) => f,
            Err(e) => {
                t.fail(format!("embed {x}: {e}"));
                continue;
            }
        };
        t.check(factor_reconstruct(&f).as_ref() == Ok(&x), || format!("reconstruct(embed({x})) != {x}"));
        // independent product of the prime powers, with each base certified prime
        let mut prod = q(f.sign.as_i8() as i64);
        let mut primes_ok = true;
        for (p, e) in &f.exps {
            primes_ok &= *e != 0 && is_prime(p).unwrap_or(false);
            let pe = Rational::from_integer(num_traits::pow(p.clone(), e.unsigned_abs() as usize));
            prod = if *e > 0 { prod * pe } else { prod / pe };
        }
        t.check(primes_ok && prod == x, || format!("exponent vector of {x} is wrong: {f:?}"));

        // separation: equal sign and valuations exactly when equal
        let y = match rng.gen_range(0..4) {
            0 => {
                let k = BigInt::from(rng.gen_range(2..1000));
                Rational::new(x.numer() * &k, x.denom() * &k)
            }
            1 => -x.clone(),
            2 => &x * Rational::new(2.into(), 3.into()),
            _ => random_rational(&mut rng, bound),
        };
        let fy = factor_embed(&y).expect("nonzero");
        t.check((f == fy) == (x == y), || format!("separation fails for {x} and {y}"));
    }
}

fn valuations(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f2);
    let primes = [2i64, 3, 5, 7, 11];
    for _ in 0..1000 {
        let p = *primes.choose(&mut rng).unwrap();
        let pp = Rational::from_integer(p.into());
        let a = random_rational(&mut rng, 1_000_000) * num_traits::pow(pp.clone(), rng.gen_range(0..6));
        let b = match rng.gen_range(0..3) {
            // same valuation, so that cancellation can raise it
            0 => &a * q(rng.gen_range(-5..=5)),
            1 => -a.clone() + q(1),
            _ => random_rational(&mut rng, 1_000_000),
        };
        if b.is_zero() {
            continue;
        }
        for &p in &primes {
            let pb = BigInt::from(p);
            let (va, vb) = (vp(&pb, &a).unwrap().exp, vp(&pb, &b).unwrap().exp);
            t.check(va == naive_v(p, &a) && vb == naive_v(p, &b), || format!("v_{p} of {a} or {b}"));
            let vab = vp(&pb, &(&a * &b)).unwrap().exp;
            t.check(vab == va + vb, || format!("v_{p}({a} * {b}) = {vab} != {va} + {vb}"));
            let s = &a + &b;
            if !s.is_zero() {
                let vs = vp(&pb, &s).unwrap().exp;
                t.check(vs >= va.min(vb), || format!("v_{p}({a} + {b}) = {vs} < min({va}, {vb})"));
                if va != vb {
                    t.check(vs == va.min(vb), || format!("v_{p}({a} + {b}) = {vs} with {va} != {vb}"));
                }
            }
        }
    }
}

fn point_env(curve: &Curve, pts: &[(&str, &Point)]) -> Environment {
    let mut env: Environment = [("a".to_string(), curve.a().clone()), ("b".to_string(), curve.b().clone())].into();
    for (prefix, p) in pts {
        for (i, c) in p.to_triple().into_iter().enumerate() {
            env.insert(format!("{prefix}{i}"), c);
        }
    }
    env
}

fn random_point(curve: &Curve, gens: &[Point], torsion: &[Point], rng: &mut ChaCha8Rng) -> Point {
    let mut p = torsion.choose(rng).cloned().unwrap_or(CurvePoint::Infinity);
    for g in gens {
        let k = rng.gen_range(-2i64..=2);
        p = curve.add_unchecked(&p, &curve.smul_unchecked(k, g));
    }
    p
}

fn group_law(t: &mut Tally) {
    let add = builtin("addE").expect("builtin");
    let ev = Evaluator::new(1).expect("bound");
    let records = parse_dataset(DEFAULT_DATASET).expect("bundled dataset");
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f3);
    for rec in records.iter().take(10) {
        let (e, d) = (&rec.data.curve, &rec.data);
        for _ in 0..200 {
            let [p, r, s] = [(); 3].map(|_| random_point(e, &d.generators, &d.torsion, &mut rng));
            let on = [&p, &r, &s].iter().all(|x| e.contains(x));
            t.check(on, || format!("{e:?}: sampled point off the curve"));
            let pr = e.add(&p, &r).unwrap();
            let lhs = e.add(&pr, &s).unwrap();
            let rhs = e.add(&p, &e.add(&r, &s).unwrap()).unwrap();
            t.check(lhs == rhs, || format!("({p} + {r}) + {s} != {p} + ({r} + {s})"));
            t.check(pr == e.add(&r, &p).unwrap(), || format!("{p} + {r} != {r} + {p}"));
            let inv = e.add(&p, &e.neg(&p).unwrap()).unwrap();
            t.check(inv.is_infinity(), || format!("{p} + (-{p}) = {inv}"));
            t.check(e.add(&p, &CurvePoint::Infinity).unwrap() == p, || format!("{p} + O != {p}"));

            let env = point_env(e, &[("x", &p), ("y", &r), ("z", &pr)]);
            let v = ev.eval(&add, &env);
            t.check(v == Ok(TriBool::True), || format!("addE({p}, {r}, {pr}) = {v:?}"));
            // a point on the curve other than the sum is rejected
            let wrong = e.add(&pr, &s).unwrap();
            if wrong != pr {
                let env = point_env(e, &[("x", &p), ("y", &r), ("z", &wrong)]);
                let v = ev.eval(&add, &env);
                t.check(v == Ok(TriBool::False), || format!("addE({p}, {r}, {wrong}) = {v:?}"));
            }
        }
    }
}

fn weak_mw(t: &mut Tally) {
    let records = parse_dataset(DEFAULT_DATASET).expect("bundled dataset");
    let mut saw_rank0_22 = false;
    for rec in &records {
        let d = &rec.data;
        let e = &d.curve;
        for n in [2u32, 3, 4] {
            let w = match weak_mw_quotient(d, n) {
                Ok(w) => w,
                Err(err) => {
                    t.fail(format!("record {} n={n}: {err}", rec.index));
                    continue;
                }
            };
            // |T/nT| = |T| / |nT|, with n·t by repeated addition
            let n_t: BTreeSet<Point> = d
                .torsion
                .iter()
                .map(|p| (1..n).fold(p.clone(), |acc, _| e.add(&acc, p).unwrap()))
                .collect();
            let tq = (d.torsion.len() / n_t.len()) as u64;
            let nr = (n as u64).pow(d.generators.len() as u32);
            let label = rec.label.clone().unwrap_or_else(|| rec.index.to_string());
            t.check(w.cardinality == nr * tq, || format!("{label} n={n}: |E/nE| = {} != {nr}*{tq}", w.cardinality));
            t.check(nr <= w.cardinality && w.cardinality <= nr + (n * n) as u64, || {
                format!("{label} n={n}: {} outside [{nr}, {}]", w.cardinality, nr + (n * n) as u64)
            });
            let distinct: BTreeSet<&Point> = w.representatives.iter().collect();
            t.check(distinct.len() as u64 == w.cardinality, || format!("{label} n={n}: repeated representatives"));
            if *e.a() == q(-1) && e.b().is_zero() && n == 2 {
                saw_rank0_22 = true;
                t.check(w.cardinality == 4 && w.upper == 5, || format!("y^2=x^3-x: |E/2E| = {}", w.cardinality));
                t.note(format!("y^2=x^3-x, n=2: |E/2E| = {} <= {}", w.cardinality, w.upper));
            }
        }
    }
    t.check(saw_rank0_22, || "dataset lacks y^2=x^3-x".to_string());
    t.note(format!("{} records, n in {{2,3,4}}", records.len()));
}

fn random_seq_poly(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => format!("{}", rng.gen_range(1..=60)),
        1 => format!("{} * i + {}", rng.gen_range(1..=6), rng.gen_range(1..=30)),
        2 => format!("i^2 + {}", rng.gen_range(1..=20)),
        _ => format!("{}^i", rng.gen_range(2..=3)),
    }
}

fn module_quotients(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f5);
    let trunc = 1000;
    for _ in 0..50 {
        let moduli: SeqExpr = random_seq_poly(&mut rng).parse().expect("sequence");
        let mut gens: Vec<SeqExpr> = vec![match rng.gen_range(0..3) {
            0 => "1".parse().unwrap(),
            1 => "-1".parse().unwrap(),
            // m + 1 is a unit modulo m
            _ => SeqExpr::Add(Box::new(moduli.clone()), Box::new("1".parse().unwrap())),
        }];
        for _ in 0..rng.gen_range(0..=2) {
            gens.push(random_seq_poly(&mut rng).parse().unwrap());
        }
        gens.shuffle(&mut rng);
        let k = rng.gen_range(2..=4u64);
        match quotient_bound_check(&moduli, &gens, k, trunc) {
            Ok(r) => {
                let bound = k.pow(gens.len() as u32);
                t.check(r.holds && r.max_observed <= bound, || format!("{moduli} k={k}: max {} > {bound}", r.max_observed));
                // |ℤ/m / k(ℤ/m)| = gcd(k, m)
                for i in (0..=trunc).step_by(97) {
                    let m = moduli.eval(i);
                    let expect = m.gcd(&BigInt::from(k)).to_u64().unwrap();
                    t.check(r.sizes[i as usize] == expect, || format!("{moduli} k={k} at {i}: {} != {expect}", r.sizes[i as usize]));
                }
            }
            Err(e) => t.fail(format!("{moduli} k={k}: {e}")),
        }
    }
}

fn random_seq(rng: &mut ChaCha8Rng) -> String {
    let a = rng.gen_range(-3..=3);
    let b = rng.gen_range(-5..=5);
    let c = rng.gen_range(-8..=8);
    let mut s = format!("{a} * i^2 + {b} * i + {c}");
    if rng.gen_bool(0.3) {
        s = format!("{s} + {} * {}^i", rng.gen_range(-2..=2), rng.gen_range(2..=3));
    }
    match rng.gen_range(0..4) {
        0 => format!("({s}) / {}", rng.gen_range(2..=3)),
        _ => s,
    }
}

fn random_atom(rng: &mut ChaCha8Rng) -> String {
    let terms = ["x", "y", "x + y", "x * y", "x - 3", "2 * y + 1", "x * x - y"];
    let s = terms.choose(rng).unwrap();
    let u = terms.choose(rng).unwrap();
    match rng.gen_range(0..6) {
        0 => format!("{s} = {u}"),
        1 => format!("{s} < {u}"),
        2 => format!("{s} != {u}"),
        3 => format!("{} | {s}", rng.gen_range(2..=6)),
        4 => format!("Z({s})"),
        _ => format!("N({s})"),
    }
}

fn random_qf_formula(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..5) {
        0 => random_atom(rng),
        1 => format!("!({})", random_atom(rng)),
        2 => format!("{} & {}", random_atom(rng), random_atom(rng)),
        3 => format!("{} <-> {}", random_atom(rng), random_atom(rng)),
        _ => format!("{} or ({} -> {})", random_atom(rng), random_atom(rng), random_atom(rng)),
    }
}

fn random_args(rng: &mut ChaCha8Rng) -> Args {
    [("x", random_seq(rng)), ("y", random_seq(rng))]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.parse().expect("sequence")))
        .collect()
}

/// The formula at the `i`-th components, evaluated in ℚ.
fn componentwise(f: &Formula, args: &Args, i: u64) -> bool {
    let env: Environment = args.iter().map(|(k, h)| (k.clone(), h.eval(i))).collect();
    eval(f, &env, 1) == Ok(TriBool::True)
}

fn los(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f6);
    let mut skipped = 0u64;
    while t.cases < 500 {
        let f = parse(&random_qf_formula(&mut rng)).expect("generated formula parses");
        let args = random_args(&mut rng);
        let i0 = if rng.gen_bool(0.5) { rng.gen_range(0..50) } else { rng.gen_range(0..3000) };
        let mut u = UltrafilterOracle::principal(i0);
        match los_eval(&mut u, &f, &args) {
            Ok(v) => {
                let truth = componentwise(&f, &args, i0);
                t.check(v == truth, || format!("{f} at {i0}: los {v}, componentwise {truth}"));
            }
            Err(UltraError::UnsupportedTruthSet(_)) => skipped += 1,
            Err(e) => t.fail(format!("{f}: {e}")),
        }
    }
    t.note(format!("{skipped} unsupported instances skipped"));
}

fn random_pset(rng: &mut ChaCha8Rng) -> PeriodicSet {
    let m = rng.gen_range(1..=12u64);
    let residues: Vec<u64> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
    let ins: Vec<u64> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..20)).collect();
    let rem: Vec<u64> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(20..40)).collect();
    PeriodicSet::new(m, residues, ins, rem).expect("valid set")
}

/// A query stream that pushes the oracle toward contradictions: complements,
/// intersections and shrinkings of what it has already accepted.
fn adversarial_queries(rng: &mut ChaCha8Rng, len: usize) -> Vec<PeriodicSet> {
    let mut out: Vec<PeriodicSet> = Vec::with_capacity(len);
    for _ in 0..len {
        let s = match (rng.gen_range(0..6), out.len()) {
            (_, 0) | (0, _) => random_pset(rng),
            (1, n) => out[rng.gen_range(0..n)].complement(),
            (2, n) => out[rng.gen_range(0..n)].intersect(&out[rng.gen_range(0..n)]),
            (3, n) => out[rng.gen_range(0..n)].intersect(&random_pset(rng)),
            (4, _) => PeriodicSet::finite((0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..100))),
            (_, _) => PeriodicSet::cofinite_from(rng.gen_range(0..100)),
        };
        out.push(s);
    }
    out
}

fn parity_pair(u: &mut UltrafilterOracle) -> Result<(bool, bool), UltraError> {
    let f = parse("2 | x")?;
    let even: Args = [("x".to_string(), "i".parse()?)].into();
    let odd: Args = [("x".to_string(), "i + 1".parse()?)].into();
    Ok((los_eval(u, &f, &even)?, los_eval(u, &f, &odd)?))
}

fn ultrafilter_laws(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f7);
    for seq in 0..1000 {
        let queries = adversarial_queries(&mut rng, 16);
        let parity_at = rng.gen_range(0..queries.len());
        let mut u = UltrafilterOracle::lazy();
        let mut accepted = Vec::new();
        for (j, s) in queries.iter().enumerate() {
            if j == parity_at {
                match parity_pair(&mut u) {
                    Ok((a, b)) => t.check(a != b, || format!("sequence {seq}: 2|w is {a}, 2|w+1 is {b}")),
                    Err(e) => t.fail(format!("sequence {seq}: {e}")),
                }
            }
            let yes = u.decide(s);
            // exactly one of S and its complement
            t.check(yes != u.decide(&s.complement()), || format!("sequence {seq}: {s} and its complement agree"));
            // nonprincipal: cofinite in, finite out
            if s.is_cofinite() || s.is_finite() {
                t.check(yes == s.is_cofinite(), || format!("sequence {seq}: decided {s} as {yes}"));
            }
            if yes {
                accepted.push(s.clone());
            }
        }
        t.check(u.decide(&PeriodicSet::all()) && !u.decide(&PeriodicSet::empty()), || format!("sequence {seq}: trivial sets"));
        for (j, a) in accepted.iter().enumerate() {
            let b = &accepted[(j + 1) % accepted.len()];
            t.check(u.decide(&a.intersect(b)), || format!("sequence {seq}: {a} and {b} in, meet out"));
            let up = a.union(&random_pset(&mut rng));
            t.check(u.decide(&up), || format!("sequence {seq}: {a} in, superset {up} out"));
        }

        // replay: the logged queries on a fresh oracle, and the log restored
        let log = u.log_json().expect("lazy oracles log");
        let mut fresh = UltrafilterOracle::lazy();
        for (s, _) in u.decisions() {
            fresh.decide(s);
        }
        t.check(fresh.log_json().as_ref() == Some(&log), || format!("sequence {seq}: replay diverged"));
        let restored = UltrafilterOracle::from_json(&log).map(|r| r.log_json());
        t.check(restored == Ok(Some(log.clone())), || format!("sequence {seq}: log does not round-trip"));
    }
}

fn two_adic(t: &mut Tally) {
    let two = BigInt::from(2);
    match hyper_dp(&two, &"2^i".parse().expect("sequence")) {
        Ok(d) => {
            t.check(d.to_string() == "i", || format!("dp_2(2^i) = {d}"));
            t.note(format!("dp_2(2^i) = {d}"));
        }
        Err(e) => t.fail(format!("dp_2(2^i): {e}")),
    }
    let args: Args = [("x".to_string(), "2^i".parse().expect("sequence"))].into();
    for k in 0..=64u32 {
        let f = match parse(&format!("{} | x", num_traits::pow(two.clone(), k as usize))) {
            Ok(f) => f,
            Err(e) => {
                t.fail(e.to_string());
                continue;
            }
        };
        match truth_set(&f, &args) {
            Ok(s) => {
                t.check(s.is_cofinite() && s == PeriodicSet::cofinite_from(k as u64), || format!("2^{k} | 2^i holds on {s}"));
                // 2^k | 2^i exactly when i ≥ k
                let scan = (0..k as u64 + 20).all(|i| s.member(i) == (i >= k as u64));
                t.check(scan, || format!("2^{k} | 2^i: membership scan disagrees"));
            }
            Err(e) => t.fail(format!("2^{k} | 2^i: {e}")),
        }
    }
}

const SMALL_PRIMES: [u64; 11] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

fn random_primes(rng: &mut ChaCha8Rng) -> BTreeSet<u64> {
    let mut s: BTreeSet<u64> = SMALL_PRIMES.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
    if s.is_empty() {
        s.insert(*SMALL_PRIMES.choose(rng).unwrap());
    }
    s
}

fn prime_set(s: &BTreeSet<u64>) -> PrimeSet {
    PrimeSet::new(s.iter().map(|p| BigInt::from(*p))).expect("primes")
}

fn galois(t: &mut Tally) {
    let table = PrTable::new(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f9);
    for _ in 0..200 {
        let g1: i64 = loop {
            let g = rng.gen_range(0..=120);
            if g != 1 {
                break g;
            }
        };
        let g2: i64 = if g1 != 0 && rng.gen_bool(0.7) {
            let divisors: Vec<i64> = (2..=g1).filter(|d| g1 % d == 0).collect();
            *divisors.choose(&mut rng).unwrap()
        } else {
            rng.gen_range(2..=60)
        };
        let core = random_primes(&mut rng);
        let sub: BTreeSet<u64> = core.iter().copied().take(rng.gen_range(1..=core.len())).collect();
        let (f1, f2) = (FilterDesc::new([prime_set(&core)]), FilterDesc::new([prime_set(&sub)]));
        let (Ok(f1), Ok(f2)) = (f1, f2) else {
            t.fail(format!("filters on {core:?}"));
            continue;
        };
        match galois_checks(&table, (&FGIdeal::new(g1.into()), &FGIdeal::new(g2.into())), (&f1, &f2)) {
            Ok(r) => {
                let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.law.as_str()).collect();
                t.check(r.passed, || format!("({g1}), ({g2}), {f1}, {f2}: {failed:?}"));
                // I(F(I)) is the radical, strictly larger exactly off squarefree generators
                let squarefree = g1 != 0 && (2..=g1).all(|d| g1 % (d * d) != 0);
                t.check(r.strictness_witness.is_none() == (g1 == 0 || squarefree), || format!("({g1}): witness {:?}", r.strictness_witness));
            }
            Err(e) => t.fail(format!("({g1}), ({g2}): {e}")),
        }
    }
    let two = FilterDesc::new([prime_set(&[2].into())]).expect("filter");
    match galois_checks(&table, (&FGIdeal::new(4.into()), &FGIdeal::new(2.into())), (&two, &two)) {
        Ok(r) => {
            let w = r.strictness_witness.clone();
            t.check(r.passed && w == Some(BigInt::from(2)), || format!("(4): witness {w:?}"));
            if let Some(w) = w {
                t.note(format!("(4) is strictly inside I(F((4))) = (2): witness {w}"));
            }
        }
        Err(e) => t.fail(format!("(4): {e}")),
    }
}

fn radical_prime(t: &mut Tally) {
    for model in [SemigroupModel::Nat, SemigroupModel::PPower { p: 2 }] {
        match radical_prime_exhaustive(model, 12) {
            Ok(r) => {
                t.check(r.equivalence_holds && r.prime_implies_radical, || format!("{model}: {:?}", r.counterexample));
                t.note(format!(
                    "{model}: {} subsets, {} subsemigroups, {} w.r.e.p.",
                    r.subsets, r.subsemigroups, r.wrep_subsemigroups
                ));
            }
            Err(e) => t.fail(format!("{model}: {e}")),
        }
    }
}

/// `r ∈ I(T)` read off the valuation of `r` in `ℤ_(p)`.
fn in_i_of_t(p: i64, members: &BTreeSet<u64>, r: &Rational) -> bool {
    r.is_zero() || members.iter().any(|n| naive_v(p, r) >= *n as i64)
}

fn unit_mod(rng: &mut ChaCha8Rng, p: i64) -> i64 {
    loop {
        let u = rng.gen_range(1..40i64);
        if u % p != 0 {
            return u;
        }
    }
}

fn correspondence(t: &mut Tally) {
    let window = 60;
    for p in [2i64, 3, 5] {
        let dvr = match Dvr::new(p.into(), window) {
            Ok(d) => d,
            Err(e) => {
                t.fail(e.to_string());
                continue;
            }
        };
        for k in 0..=50 {
            let ok = dvr
                .s_of_i(k)
                .and_then(|s| Ok((dvr.i_of_t(&s)?.k, s.is_wrep() && s.is_subsemigroup())))
                .map_or(false, |(back, wrep)| back == k && wrep);
            t.check(ok, || format!("p={p}: I(S(p^{k})) != p^{k}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x0fb + p as u64);
        for _ in 0..100 {
            let members: Vec<u64> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(1..=50)).collect();
            let Ok(tt) = WindowSubset::new(SemigroupModel::Nat, window, members.clone()) else {
                t.fail(format!("window subset {members:?}"));
                continue;
            };
            let Ok(i) = dvr.i_of_t(&tt) else {
                t.fail(format!("I({members:?})"));
                continue;
            };
            let back = dvr.s_of_i(i.k);
            t.check(back.as_ref() == Ok(&tt.wrep_closure()), || format!("p={p}: S(I({members:?})) is not the closure"));
            for _ in 0..20 {
                let e = rng.gen_range(0..55usize);
                let r = Rational::new(num_traits::pow(BigInt::from(p), e) * unit_mod(&mut rng, p), unit_mod(&mut rng, p).into());
                t.check(i.contains(&r) == in_i_of_t(p, tt.members(), &r), || format!("p={p}: {r} in I({members:?})"));
            }
        }
    }
}

/// Runs every other check twice and compares the serialized results.
fn determinism(t: &mut Tally) {
    for id in 1..=11u8 {
        let a = serde_json::to_string(&run_check(id)).expect("serializes");
        let b = serde_json::to_string(&run_check(id)).expect("serializes");
        t.check(a == b, || format!("check {id} differs between runs"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass() {
        for id in [2u8, 8, 11] {
            let r = run_check(id);
            assert!(r.passed, "{r:?}");
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn tally_caps_counterexamples() {
        let mut t = Tally::default();
        for i in 0..10 {
            t.check(false, || i.to_string());
        }
        assert_eq!((t.cases, t.failures, t.counterexamples.len()), (10, 10, MAX_COUNTEREXAMPLES));
    }
}
