use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use hyperarith_core::arith::{factor_embed_with, parse_rational, ArithError, Sieve, DEFAULT_SIEVE_BOUND};
use hyperarith_core::elliptic::{
    load_dataset, naive_point_search, parse_dataset, torsion_points, torsion_structure, weak_mw_quotient,
    CurvePoint, DatasetRecord, EllipticError, DEFAULT_DATASET,
};
use hyperarith_core::formula::{builtin, eval, parse, Environment, FormulaError, TriBool};
use hyperarith_core::ideals::{run_scenario, IdealError, Scenario};
use hyperarith_core::suite::{all_ids, run_suite, CHECKS};
use hyperarith_core::ultrapower::{
    hyper_dp, los_eval, truth_set, Args, HyperRational, PeriodicSet, UltraError, UltrafilterOracle,
};
use hyperarith_core::{Curve, Point, Rational};

use crate::config::Config;
use crate::{Cmd, CurveCmd, Failure, HyperCmd, Output, EXIT_DATASET, EXIT_SCENARIO, EXIT_UNSUPPORTED, EXIT_ZERO};

impl From<ArithError> for Failure {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::ZeroArgument => Failure::new(EXIT_ZERO, e.to_string()),
            e => Failure::input(e.to_string()),
        }
    }
}

impl From<FormulaError> for Failure {
    fn from(e: FormulaError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<EllipticError> for Failure {
    fn from(e: EllipticError) -> Self {
        match e {
            EllipticError::Dataset { .. } | EllipticError::SandwichViolation { .. } => {
                Failure::new(EXIT_DATASET, e.to_string())
            }
            EllipticError::Arith(a) => a.into(),
            e => Failure::input(e.to_string()),
        }
    }
}

impl From<UltraError> for Failure {
    fn from(e: UltraError) -> Self {
        match e {
            UltraError::UnsupportedTruthSet(_) | UltraError::UnsupportedValuation(_) => {
                Failure::new(EXIT_UNSUPPORTED, e.to_string())
            }
            e => Failure::input(e.to_string()),
        }
    }
}

impl From<IdealError> for Failure {
    fn from(e: IdealError) -> Self {
        Failure::new(EXIT_SCENARIO, e.to_string())
    }
}

pub fn dispatch(cmd: Cmd, cfg: &Config, timings: bool) -> Result<Output, Failure> {
    match cmd {
        Cmd::Factor { x } => factor(&x, cfg),
        Cmd::Eval { builtin, args } => eval_cmd(builtin.as_deref(), &args, cfg),
        Cmd::Curve { op } => curve(op, cfg),
        Cmd::Hyper { op } => hyper(op, cfg),
        Cmd::Semigroup { scenario } => semigroup(&scenario, cfg),
        Cmd::DatasetValidate { path } => dataset_validate(path.as_deref()),
        Cmd::Suite { only } => suite(only, timings),
    }
}

fn ok(json: Value, summary: String) -> Result<Output, Failure> {
    Ok(Output { json, summary, code: 0 })
}

/// `name=value` pairs, each name at most once.
fn bindings(args: &[String]) -> Result<BTreeMap<String, String>, Failure> {
    let mut out = BTreeMap::new();
    for a in args {
        let (k, v) = a
            .split_once('=')
            .ok_or_else(|| Failure::input(format!("expected name=value, got '{a}'")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Failure::input(format!("'{k}' is given twice")));
        }
    }
    Ok(out)
}

fn only_keys(kv: &BTreeMap<String, String>, allowed: &[&str]) -> Result<(), Failure> {
    match kv.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Failure::input(format!("unexpected argument '{k}' (expected {})", allowed.join(", ")))),
        None => Ok(()),
    }
}

fn required<'a>(kv: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str, Failure> {
    kv.get(key).map(String::as_str).ok_or_else(|| Failure::input(format!("missing {key}=")))
}

fn rational(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).ok_or_else(|| Failure::input(format!("'{s}' is not a rational")))
}

/// Integral values as JSON numbers when they fit, anything else as "p/q".
fn rat_json(r: &Rational) -> Value {
    match r.is_integer().then(|| r.to_integer().to_i64()).flatten() {
        Some(n) => n.into(),
        None => r.to_string().into(),
    }
}

fn point_json(p: &Point) -> Value {
    match p {
        CurvePoint::Infinity => "O".into(),
        CurvePoint::Affine { x, y } => json!([rat_json(x), rat_json(y)]),
    }
}

fn point_text(p: &Point) -> String {
    match p {
        CurvePoint::Infinity => "O".into(),
        CurvePoint::Affine { x, y } => format!("({x}, {y})"),
    }
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    if s == "O" {
        return Ok(CurvePoint::Infinity);
    }
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Failure::input(format!("point '{s}' should be x,y or O")))?;
    Ok(CurvePoint::affine(rational(x)?, rational(y)?))
}

fn factor(x: &str, cfg: &Config) -> Result<Output, Failure> {
    let x = rational(x)?;
    let owned;
    let sieve = if cfg.sieve_bound == DEFAULT_SIEVE_BOUND {
        Sieve::shared()
    } else {
        owned = Sieve::new(cfg.sieve_bound);
        &owned
    };
    let f = factor_embed_with(sieve, &x)?;
    let exps: Map<String, Value> = f.exps.iter().map(|(p, e)| (p.to_string(), (*e).into())).collect();
    let summary = std::iter::once(if f.sign.as_i8() < 0 { "-1".to_string() } else { "1".to_string() })
        .chain(f.exps.iter().map(|(p, e)| format!("{p}^{e}")))
        .collect::<Vec<_>>()
        .join(" * ");
    ok(json!({"sign": f.sign.as_i8(), "exps": exps}), format!("{x} = {summary}"))
}

fn eval_cmd(name: Option<&str>, args: &[String], cfg: &Config) -> Result<Output, Failure> {
    let (formula, rest) = match name {
        Some(n) => (builtin(n)?, args),
        None => {
            let (text, rest) = args.split_first().ok_or_else(|| Failure::input("missing formula"))?;
            (parse(text)?, rest)
        }
    };
    let env: Environment = bindings(rest)?
        .into_iter()
        .map(|(k, v)| Ok((k, rational(&v)?)))
        .collect::<Result<_, Failure>>()?;
    let v = eval(&formula, &env, cfg.search_bound)?;
    let (word, code) = match v {
        TriBool::True => ("true", 0),
        TriBool::False => ("false", 1),
        TriBool::Unknown => ("unknown", 4),
    };
    Ok(Output {
        json: json!({"value": word, "bound": cfg.search_bound}),
        summary: format!("{word} (height bound {})", cfg.search_bound),
        code,
    })
}

fn curve_of(kv: &BTreeMap<String, String>) -> Result<Curve, Failure> {
    Ok(Curve::new(rational(required(kv, "A")?)?, rational(required(kv, "B")?)?)?)
}

fn on_curve(e: &Curve, p: Point) -> Result<Point, Failure> {
    if e.contains(&p) {
        Ok(p)
    } else {
        Err(Failure::input(format!("{} is not on the curve", point_text(&p))))
    }
}

fn dataset(path: Option<&Path>) -> Result<Vec<DatasetRecord>, Failure> {
    Ok(match path {
        Some(p) => load_dataset(p)?,
        None => parse_dataset(DEFAULT_DATASET)?,
    })
}

fn curve(op: CurveCmd, cfg: &Config) -> Result<Output, Failure> {
    match op {
        CurveCmd::Add { args } => {
            let kv = bindings(&args)?;
            only_keys(&kv, &["A", "B", "P", "Q"])?;
            let e = curve_of(&kv)?;
            let p = on_curve(&e, parse_point(required(&kv, "P")?)?)?;
            let q = on_curve(&e, parse_point(required(&kv, "Q")?)?)?;
            let s = e.add(&p, &q)?;
            ok(point_json(&s), format!("{} + {} = {}", point_text(&p), point_text(&q), point_text(&s)))
        }
        CurveCmd::Mul { args } => {
            let kv = bindings(&args)?;
            only_keys(&kv, &["A", "B", "P", "n"])?;
            let e = curve_of(&kv)?;
            let p = on_curve(&e, parse_point(required(&kv, "P")?)?)?;
            let n: i64 = required(&kv, "n")?.parse().map_err(|_| Failure::input("n must be an integer"))?;
            let s = e.smul(n, &p)?;
            ok(point_json(&s), format!("{n} * {} = {}", point_text(&p), point_text(&s)))
        }
        CurveCmd::Torsion { args } => {
            let kv = bindings(&args)?;
            only_keys(&kv, &["A", "B"])?;
            let e = curve_of(&kv)?;
            let pts = torsion_points(&e)?;
            let (n1, n2) = torsion_structure(&e, &pts);
            let list: Vec<Value> = pts.iter().map(point_json).collect();
            let summary = format!(
                "{} torsion points, Z/{n1} x Z/{n2}: {}",
                pts.len(),
                pts.iter().map(point_text).collect::<Vec<_>>().join(" ")
            );
            ok(json!({"count": pts.len(), "structure": [n1, n2], "points": list}), summary)
        }
        CurveCmd::Search { args } => {
            let kv = bindings(&args)?;
            only_keys(&kv, &["A", "B"])?;
            let e = curve_of(&kv)?;
            let pts = naive_point_search(&e, cfg.search_bound)?;
            let list: Vec<Value> = pts.iter().map(point_json).collect();
            let summary = format!("{} points with x of height <= {}", pts.len(), cfg.search_bound);
            ok(json!({"bound": cfg.search_bound, "points": list}), summary)
        }
        CurveCmd::Weakmw { dataset: path, args } => {
            let kv = bindings(&args)?;
            only_keys(&kv, &["n", "record", "label"])?;
            let n: u32 = required(&kv, "n")?.parse().map_err(|_| Failure::input("n must be a positive integer"))?;
            let records = dataset(path.as_deref())?;
            let rec = match (kv.get("record"), kv.get("label")) {
                (Some(i), None) => {
                    let i: usize = i.parse().map_err(|_| Failure::input("record must be an index"))?;
                    records.get(i).ok_or_else(|| Failure::input(format!("no record {i}")))?
                }
                (None, Some(l)) => records
                    .iter()
                    .find(|r| r.label.as_deref() == Some(l.as_str()))
                    .ok_or_else(|| Failure::input(format!("no record labelled '{l}'")))?,
                _ => return Err(Failure::input("give exactly one of record= and label=")),
            };
            let w = weak_mw_quotient(&rec.data, n).map_err(|e| match e {
                EllipticError::SandwichViolation { .. } => {
                    Failure::new(EXIT_DATASET, format!("dataset record {}: {e}", rec.index))
                }
                e => e.into(),
            })?;
            let verdict = format!("{} <= {} <= {}", w.lower, w.cardinality, w.upper);
            let json = json!({
                "record": rec.index,
                "label": rec.label,
                "n": w.n,
                "rank": w.rank,
                "torsion_quotient": w.torsion_quotient,
                "cardinality": w.cardinality,
                "lower": w.lower,
                "upper": w.upper,
                "classical_upper": w.classical_upper,
                "sandwich": verdict,
                "pass": true,
                "representatives": w.representatives.iter().map(point_json).collect::<Vec<_>>(),
            });
            let summary = format!(
                "record {} ({}): |E/{n}E| = {}, n^r <= |E/nE| <= n^r + n^2 holds: {verdict}",
                rec.index,
                rec.label.as_deref().unwrap_or("unlabelled"),
                w.cardinality
            );
            ok(json, summary)
        }
    }
}

fn hyper_args(list: &[String]) -> Result<Args, Failure> {
    bindings(list)?
        .into_iter()
        .map(|(k, v)| Ok((k, v.parse::<HyperRational>()?)))
        .collect()
}

fn oracle_of(spec: &str, log: Option<&Path>) -> Result<UltrafilterOracle, Failure> {
    if let Some(i0) = spec.strip_prefix("principal:") {
        if log.is_some() {
            return Err(Failure::input("--log applies to the lazy oracle only"));
        }
        let i0 = i0.parse().map_err(|_| Failure::input(format!("bad principal index '{i0}'")))?;
        return Ok(UltrafilterOracle::principal(i0));
    }
    if spec != "lazy" {
        return Err(Failure::input(format!("oracle must be principal:N or lazy, got '{spec}'")));
    }
    match log {
        Some(p) => Ok(UltrafilterOracle::from_json(&read(p)?)?),
        None => Ok(UltrafilterOracle::lazy()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn log_value(u: &UltrafilterOracle) -> Option<Value> {
    u.log_json().map(|s| serde_json::from_str(&s).expect("log is JSON"))
}

fn hyper(op: HyperCmd, cfg: &Config) -> Result<Output, Failure> {
    match op {
        HyperCmd::Eval { oracle, log, formula, bindings } => {
            let mut u = oracle_of(&oracle, log.as_deref())?;
            let f = parse(&formula)?;
            let args = hyper_args(&bindings)?;
            let value = los_eval(&mut u, &f, &args)?;
            let set = truth_set(&f, &args)?;
            let components: Map<String, Value> = args
                .iter()
                .map(|(k, h)| {
                    let vals: Vec<Value> = (0..cfg.scan_bound).map(|i| rat_json(&h.eval(i))).collect();
                    (k.clone(), vals.into())
                })
                .collect();
            let mut json = json!({
                "value": value,
                "oracle": oracle,
                "truth_set": set.to_string(),
                "components": components,
            });
            if let Some(l) = log_value(&u) {
                json["log"] = l;
            }
            Ok(Output { json, summary: format!("{value}: holds on {set}"), code: if value { 0 } else { 1 } })
        }
        HyperCmd::Dp { p, expr } => {
            let p: BigInt = p.parse().map_err(|_| Failure::input(format!("'{p}' is not an integer")))?;
            let h: HyperRational = expr.parse()?;
            let d = hyper_dp(&p, &h)?.to_string();
            ok(Value::String(d.clone()), format!("d_{p}({h}) = {p}^({d})"))
        }
        HyperCmd::OracleReplay { log, queries } => {
            let text = read(&log)?;
            let restored = UltrafilterOracle::from_json(&text)?;
            let mut fresh = UltrafilterOracle::lazy();
            for (s, _) in restored.decisions() {
                fresh.decide(s);
            }
            let identical = fresh.log_json() == restored.log_json();
            let logged = restored.decisions().len();
            let mut u = restored;
            let mut answers = Vec::new();
            for q in &queries {
                let s: PeriodicSet = q.parse()?;
                answers.push(json!({"set": s.to_string(), "decision": u.decide(&s)}));
            }
            let (a, m) = u.commitment().expect("lazy");
            let summary = format!(
                "{} logged decisions, replay {}, commitment {a} mod {m}",
                logged,
                if identical { "identical" } else { "diverged" }
            );
            let json = json!({
                "consistent": true,
                "replay_identical": identical,
                "queries": answers,
                "log": log_value(&u),
            });
            Ok(Output { json, summary, code: if identical { 0 } else { 1 } })
        }
    }
}

fn semigroup(path: &Path, cfg: &Config) -> Result<Output, Failure> {
    let s = Scenario::parse(&read(path).map_err(|f| Failure::new(EXIT_SCENARIO, f.message))?)?;
    if s.window > cfg.window {
        return Err(Failure::new(EXIT_SCENARIO, format!("window {} exceeds the configured {}", s.window, cfg.window)));
    }
    let run = run_scenario(&s)?;
    let mut summary = format!("{}\n", if run.pass { "pass" } else { "fail" });
    if let Some(r) = &run.subset {
        let _ = writeln!(
            summary,
            "subset: subsemigroup {}, w.r.e.p. {}, radical {}, prime {}",
            r.is_subsemigroup, r.is_wrep, r.radical, r.prime
        );
        let _ = writeln!(summary, "w.r.e.p. closure from {}", r.wrep_closure.first().map_or("-", String::as_str));
    }
    if let Some(r) = &run.exhaustive {
        let _ = writeln!(
            summary,
            "{} window {}: {} w.r.e.p. subsemigroups, radical <=> prime {}",
            r.model, r.window, r.wrep_subsemigroups, r.equivalence_holds
        );
    }
    let json = serde_json::to_value(&run).expect("report serializes");
    Ok(Output { json, summary, code: if run.pass { 0 } else { 1 } })
}

fn dataset_validate(path: Option<&Path>) -> Result<Output, Failure> {
    let records = dataset(path)?;
    // the sandwich at n = 2 is part of what a record promises
    for r in &records {
        weak_mw_quotient(&r.data, 2).map_err(|e| Failure::new(EXIT_DATASET, format!("dataset record {}: {e}", r.index)))?;
    }
    let list: Vec<Value> = records
        .iter()
        .map(|r| json!({"index": r.index, "label": r.label, "rank": r.data.generators.len(), "torsion": r.data.torsion.len()}))
        .collect();
    let summary = format!("{} records valid", records.len());
    ok(json!({"valid": true, "records": list}), summary)
}

fn suite(only: Vec<u8>, timings: bool) -> Result<Output, Failure> {
    let ids = if only.is_empty() { all_ids() } else { only };
    if let Some(bad) = ids.iter().find(|i| !CHECKS.iter().any(|c| c.0 == **i)) {
        return Err(Failure::input(format!("no check {bad}")));
    }
    let report = run_suite(&ids, timings);
    let mut summary = String::new();
    for c in &report.checks {
        let _ = write!(summary, "{:>2} {} {} ({} cases)", c.id, if c.passed { "PASS" } else { "FAIL" }, c.name, c.cases);
        if let Some(ms) = c.elapsed_ms {
            let _ = write!(summary, " {ms} ms");
        }
        summary.push('\n');
        for x in &c.counterexamples {
            let _ = writeln!(summary, "     {x}");
        }
    }
    let passed = report.checks.iter().all(|c| c.passed);
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(Output { json, summary, code: if passed { 0 } else { 1 } })
}
