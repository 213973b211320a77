use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperarith"));
    cmd.args(args).env_remove("HYPERARITH_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Exit code and exact stdout.
fn golden(args: &[&str], code: i32, expected: &str) {
    let o = run(args);
    assert_eq!(o.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), expected, "{args:?}");
}

/// Exit code, with nothing on stdout.
fn fails(args: &[&str], code: i32) {
    let o = run(args);
    assert_eq!(o.status.code(), Some(code), "{args:?}");
    assert!(o.stdout.is_empty(), "{args:?} printed {}", stdout(&o));
    assert!(!o.stderr.is_empty(), "{args:?} gave no message");
}

#[test]
fn factor() {
    golden(&["factor", "-12/5"], 0, r#"{"sign":-1,"exps":{"2":2,"3":1,"5":-1}}"#);
    golden(&["factor", "1"], 0, r#"{"sign":1,"exps":{}}"#);
    golden(&["factor", "1024/3125"], 0, r#"{"sign":1,"exps":{"2":10,"5":-5}}"#);
    // keys keep numeric order
    golden(&["factor", "22/3"], 0, r#"{"sign":1,"exps":{"2":1,"3":-1,"11":1}}"#);
    golden(&["--pretty", "factor", "-12/5"], 0, "-12/5 = -1 * 2^2 * 3^1 * 5^-1");
    fails(&["factor", "0"], 3);
    fails(&["factor", "0/7"], 3);
    fails(&["factor", "1/0"], 2);
    fails(&["factor", "twelve"], 2);
}

#[test]
fn eval() {
    golden(&["eval", "P(x)", "x=7"], 0, r#"{"value":"true","bound":20}"#);
    golden(&["eval", "P(x)", "x=8"], 1, r#"{"value":"false","bound":20}"#);
    golden(&["eval", "--builtin", "E", "a=0", "b=0", "x=0", "y=0", "z=1"], 1, r#"{"value":"false","bound":20}"#);
    golden(&["eval", "--builtin", "E", "a=0", "b=1", "x=2", "y=3", "z=1"], 0, r#"{"value":"true","bound":20}"#);
    golden(&["eval", "exists y. y*y=x", "x=2", "--bound", "50"], 4, r#"{"value":"unknown","bound":50}"#);
    golden(&["eval", "exists y. y*y=x", "x=9/4"], 0, r#"{"value":"true","bound":20}"#);
    golden(&["eval", "x > y", "x=-1/2", "y=-1"], 0, r#"{"value":"true","bound":20}"#);
    fails(&["eval", "x = "], 2);
    fails(&["eval", "P(x)"], 2);
    fails(&["eval", "P(x)", "x=abc"], 2);
    fails(&["eval", "P(x)", "x"], 2);
    fails(&["eval", "--builtin", "nope"], 2);
}

#[test]
fn curve() {
    golden(&["curve", "add", "A=0", "B=1", "P=2,3", "Q=2,3"], 0, "[0,1]");
    golden(&["curve", "add", "A=0", "B=1", "P=2,3", "Q=2,-3"], 0, r#""O""#);
    golden(&["curve", "add", "A=0", "B=17", "P=-2,3", "Q=-1,4"], 0, "[4,-9]");
    golden(&["curve", "mul", "A=0", "B=1", "n=6", "P=2,3"], 0, r#""O""#);
    golden(&["curve", "mul", "A=0", "B=-2", "n=2", "P=3,5"], 0, r#"["129/100","-383/1000"]"#);
    golden(
        &["curve", "torsion", "A=-1", "B=0"],
        0,
        r#"{"count":4,"structure":[2,2],"points":["O",[-1,0],[0,0],[1,0]]}"#,
    );
    golden(&["--pretty", "curve", "add", "A=0", "B=1", "P=2,3", "Q=O"], 0, "(2, 3) + O = (2, 3)");
    fails(&["curve", "add", "A=0", "B=0", "P=1,1", "Q=1,1"], 2);
    fails(&["curve", "add", "A=0", "B=1", "P=1,1", "Q=2,3"], 2);
    fails(&["curve", "add", "A=0", "B=1", "P=2,3"], 2);
    fails(&["curve", "torsion", "A=0", "B=1", "C=2"], 2);
}

#[test]
fn curve_search_uses_the_bound() {
    let o = run(&["curve", "search", "A=0", "B=-2", "--search-bound", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["bound"], 5);
    assert!(v["points"].as_array().unwrap().contains(&serde_json::json!([3, 5])));
}

#[test]
fn weak_mordell_weil() {
    let o = run(&["curve", "weakmw", "n=2", "label=y^2=x^3-x"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["cardinality"], 4);
    assert_eq!(v["sandwich"], "1 <= 4 <= 5");
    assert_eq!(v["pass"], true);
    assert_eq!(v["representatives"].as_array().unwrap().len(), 4);
    let v = json(&run(&["curve", "weakmw", "n=3", "record=4"]));
    assert_eq!((v["rank"].as_u64(), v["cardinality"].as_u64()), (Some(2), Some(9)));
    fails(&["curve", "weakmw", "n=2", "record=99"], 2);
    fails(&["curve", "weakmw", "n=2", "record=0", "--dataset", &fixture("bad_generator.jsonl")], 5);
}

#[test]
fn dataset_validation() {
    let v = json(&run(&["dataset-validate"]));
    assert_eq!(v["valid"], true);
    assert_eq!(v["records"].as_array().unwrap().len(), 12);
    let o = run(&["dataset-validate", &fixture("bad_generator.jsonl")]);
    assert_eq!(o.status.code(), Some(5));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("record 1"));
    fails(&["dataset-validate", "/nonexistent/curves.jsonl"], 5);
}

#[test]
fn hyper() {
    golden(&["hyper", "dp", "2", "2^i"], 0, r#""i""#);
    golden(&["hyper", "dp", "3", "9^i * 5"], 0, r#""2 * i""#);
    golden(
        &["hyper", "eval", "--oracle", "principal:4", "2 | x", "x=i"],
        0,
        r#"{"value":true,"oracle":"principal:4","truth_set":"[0] mod 2","components":{"x":[0,1,2,3,4,5,6,7]}}"#,
    );
    golden(
        &["hyper", "eval", "--oracle", "principal:3", "2 | x", "x=i"],
        1,
        r#"{"value":false,"oracle":"principal:3","truth_set":"[0] mod 2","components":{"x":[0,1,2,3,4,5,6,7]}}"#,
    );
    fails(&["hyper", "eval", "--oracle", "lazy", "x | y", "x=i", "y=i*i+1"], 6);
    fails(&["hyper", "dp", "2", "i + 1"], 6);
    fails(&["hyper", "dp", "4", "2^i"], 2);
    fails(&["hyper", "eval", "--oracle", "sometimes", "2 | x", "x=i"], 2);
    fails(&["hyper", "eval", "exists y. x = y", "x=i"], 6);
}

#[test]
fn lazy_oracle_logs_round_trip() {
    let o = run(&["hyper", "eval", "2 | x", "x=i + 1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["log"]["commitment"], serde_json::json!([1, 2]));
    let path = std::env::temp_dir().join(format!("hyperarith-log-{}.json", std::process::id()));
    std::fs::write(&path, v["log"].to_string()).unwrap();
    let p = path.display().to_string();
    // the complementary parity is now rejected
    assert_eq!(run(&["hyper", "eval", "--log", &p, "2 | x", "x=i"]).status.code(), Some(1));
    let r = json(&run(&["hyper", "oracle-replay", &p, "--query", "[1] mod 4", "--query", "[3] mod 4"]));
    assert_eq!(r["replay_identical"], true);
    let decided: Vec<bool> = r["queries"].as_array().unwrap().iter().map(|q| q["decision"].as_bool().unwrap()).collect();
    assert_eq!(decided.iter().filter(|d| **d).count(), 1);
    std::fs::write(&path, r#"{"commitment":[0,2],"decisions":[["[1] mod 2",true]]}"#).unwrap();
    fails(&["hyper", "oracle-replay", &p], 2);
    std::fs::remove_file(&path).ok();
}

#[test]
fn semigroup() {
    let v = json(&run(&["semigroup", &fixture("nat_exhaustive.json")]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["exhaustive"]["equivalence_holds"], true);
    let v = json(&run(&["semigroup", &fixture("ppower_exhaustive.json")]));
    assert_eq!(v["pass"], true);
    let v = json(&run(&["semigroup", &fixture("upward4.json")]));
    assert_eq!(v["subset"]["prime"], false);
    assert_eq!(v["subset"]["prime_witness"], serde_json::json!({"kind": "factors", "a": "2", "b": "2", "product": "4"}));
    fails(&["semigroup", &fixture("empty_subset.json")], 7);
    fails(&["semigroup", &fixture("unknown_field.json")], 7);
    fails(&["semigroup", "/nonexistent/scenario.json"], 7);
    fails(&["semigroup", &fixture("upward4.json"), "--window", "10"], 7);
}

#[test]
fn config_file_and_flags() {
    let cfg = fixture("config.toml");
    let o = run_env(&["eval", "exists y. y*y=x", "x=2"], &[("HYPERARITH_CONFIG", &cfg)]);
    assert_eq!(stdout(&o), r#"{"value":"unknown","bound":50}"#);
    let o = run_env(&["eval", "exists y. y*y=x", "x=2", "--bound", "7"], &[("HYPERARITH_CONFIG", &cfg)]);
    assert_eq!(stdout(&o), r#"{"value":"unknown","bound":7}"#);
    let o = run(&["--config", &cfg, "hyper", "eval", "--oracle", "principal:0", "x = 0", "x=i"]);
    assert_eq!(json(&o)["components"]["x"], serde_json::json!([0, 1, 2]));
    let o = run_env(&["factor", "6"], &[("HYPERARITH_CONFIG", &fixture("bad_config.toml"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    // a cofactor beyond the sieve cannot be certified
    fails(&["factor", "1000036000099", "--sieve-bound", "100"], 2);
}

#[test]
fn usage_errors() {
    fails(&[], 2);
    fails(&["frobnicate"], 2);
    fails(&["suite", "--only", "13"], 2);
}

#[test]
fn timings_only_when_asked() {
    let v = json(&run(&["suite", "--only", "8"]));
    assert!(v.get("elapsed_ms").is_none() && v["checks"][0].get("elapsed_ms").is_none());
    let v = json(&run(&["suite", "--only", "8", "--timings"]));
    assert!(v["elapsed_ms"].is_u64() && v["checks"][0]["elapsed_ms"].is_u64());
    assert_eq!(v["status"], "pass");
}
