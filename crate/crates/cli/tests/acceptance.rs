//! The acceptance battery, one line per criterion, with the time limits enforced.
//!
//! Criteria 1 to 11 run in process; criterion 12 runs `hyperarith suite`
//! twice and compares the two reports byte for byte.

use std::process::Command;
use std::time::{Duration, Instant};

use hyperarith_core::suite::{run_check, CHECKS};

struct Line {
    id: u8,
    name: String,
    passed: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

impl Line {
    fn ok(&self) -> bool {
        self.passed && self.elapsed < self.limit
    }

    fn print(&self) {
        println!(
            "criterion {:>2} {} {} ({}; {} ms, limit {} ms)",
            self.id,
            if self.ok() { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_millis(),
            self.limit.as_millis()
        );
    }
}

fn in_process(id: u8) -> Line {
    let start = Instant::now();
    let r = run_check(id);
    let elapsed = start.elapsed();
    let mut detail = format!("{} cases, {} failures", r.cases, r.failures);
    for c in &r.counterexamples {
        detail.push_str(&format!("; {c}"));
    }
    Line { id, name: r.name, passed: r.passed, detail, elapsed, limit: Duration::from_millis(r.limit_ms) }
}

fn suite_twice() -> Line {
    let &(id, name, limit) = CHECKS.iter().find(|c| c.0 == 12).unwrap();
    let start = Instant::now();
    let mut outputs = Vec::new();
    let mut detail = String::new();
    for _ in 0..2 {
        let t0 = Instant::now();
        let o = Command::new(env!("CARGO_BIN_EXE_hyperarith"))
            .arg("suite")
            .env_remove("HYPERARITH_CONFIG")
            .output()
            .expect("binary runs");
        if !detail.is_empty() {
            detail.push_str(", ");
        }
        detail.push_str(&format!("run exit {:?} in {} ms", o.status.code(), t0.elapsed().as_millis()));
        outputs.push(o);
    }
    let elapsed = start.elapsed();
    let identical = outputs[0].stdout == outputs[1].stdout;
    let report: serde_json::Value = serde_json::from_slice(&outputs[0].stdout).unwrap_or_default();
    let all_pass = outputs.iter().all(|o| o.status.success())
        && report["status"] == "pass"
        && report["checks"].as_array().map_or(0, Vec::len) == CHECKS.len();
    detail.push_str(if identical { ", byte-identical" } else { ", reports differ" });
    Line {
        id,
        name: format!("{name} of `hyperarith suite`"),
        passed: identical && all_pass,
        detail,
        // each run has the full budget
        elapsed: elapsed / 2,
        limit: Duration::from_millis(limit),
    }
}

fn main() {
    let mut failed = Vec::new();
    for id in 1..=12u8 {
        let line = if id == 12 { suite_twice() } else { in_process(id) };
        line.print();
        if !line.ok() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    println!("all {} criteria pass", CHECKS.len());
}
