//! Bounds read from a TOML file named by `--config` or `HYPERARITH_CONFIG`.
//! Flags override the file, the file overrides the defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    sieve_bound: Option<u64>,
    search_bound: Option<u64>,
    window: Option<u64>,
    scan_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Trial-division bound for factoring.
    pub sieve_bound: u64,
    /// Height bound for quantifier search in `eval`, and for `curve search`.
    pub search_bound: u64,
    /// Largest window a semigroup scenario may ask for.
    pub window: u64,
    /// Leading components printed for hyperrationals.
    pub scan_bound: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config { sieve_bound: 1_000_000, search_bound: 20, window: 10_000, scan_bound: 8 }
    }
}

pub struct Overrides {
    pub path: Option<PathBuf>,
    pub sieve_bound: Option<u64>,
    pub search_bound: Option<u64>,
    pub window: Option<u64>,
    pub scan_bound: Option<u64>,
}

fn read(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::input(format!("config {}: {e}", path.display())))
}

impl Config {
    pub fn load(o: &Overrides) -> Result<Config, Failure> {
        let path = o.path.clone().or_else(|| std::env::var_os("HYPERARITH_CONFIG").map(PathBuf::from));
        let file = match path {
            Some(p) => read(&p)?,
            None => FileConfig::default(),
        };
        let d = Config::default();
        let c = Config {
            sieve_bound: o.sieve_bound.or(file.sieve_bound).unwrap_or(d.sieve_bound),
            search_bound: o.search_bound.or(file.search_bound).unwrap_or(d.search_bound),
            window: o.window.or(file.window).unwrap_or(d.window),
            scan_bound: o.scan_bound.or(file.scan_bound).unwrap_or(d.scan_bound),
        };
        if c.sieve_bound < 2 || c.search_bound < 1 {
            return Err(Failure::input("sieve_bound must be at least 2 and search_bound at least 1"));
        }
        Ok(c)
    }
}
