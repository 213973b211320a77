use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{PeriodicSet, UltraError};

/// Decides membership of eventually periodic sets in an ultrafilter on ℕ.
///
/// `LazyGeneric` is nonprincipal: it keeps a residue class `a mod m` and
/// accepts exactly the sets that eventually contain that class. A query the
/// class does not settle refines it, taking the smallest residue that makes
/// the answer yes when one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UltrafilterOracle {
    Principal(u64),
    LazyGeneric { residue: u64, modulus: u64, decisions: Vec<(PeriodicSet, bool)> },
}

/// JSON form of a lazy oracle's state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLog {
    pub commitment: (u64, u64),
    pub decisions: Vec<(PeriodicSet, bool)>,
}

impl UltrafilterOracle {
    pub fn principal(i0: u64) -> Self {
        UltrafilterOracle::Principal(i0)
    }

    pub fn lazy() -> Self {
        UltrafilterOracle::LazyGeneric { residue: 0, modulus: 1, decisions: Vec::new() }
    }

    /// The current residue class `(a, m)`; `None` for a principal oracle.
    pub fn commitment(&self) -> Option<(u64, u64)> {
        match self {
            UltrafilterOracle::Principal(_) => None,
            UltrafilterOracle::LazyGeneric { residue, modulus, .. } => Some((*residue, *modulus)),
        }
    }

    pub fn decisions(&self) -> &[(PeriodicSet, bool)] {
        match self {
            UltrafilterOracle::Principal(_) => &[],
            UltrafilterOracle::LazyGeneric { decisions, .. } => decisions,
        }
    }

    pub fn decide(&mut self, s: &PeriodicSet) -> bool {
        match self {
            UltrafilterOracle::Principal(i0) => s.member(*i0),
            UltrafilterOracle::LazyGeneric { residue, modulus, decisions } => {
                let answer = if s.is_finite() {
                    false
                } else if s.is_cofinite() {
                    true
                } else {
                    let l = modulus.lcm(&s.modulus());
                    let mut candidates = (0..l / *modulus).map(|k| *residue + k * *modulus);
                    let inside = |a: &u64| s.residues().contains(&(a % s.modulus()));
                    let all_in = candidates.clone().all(|a| inside(&a));
                    let none_in = !candidates.clone().any(|a| inside(&a));
                    if all_in || none_in {
                        all_in
                    } else {
                        *residue = candidates.find(inside).expect("some class lies inside");
                        *modulus = l;
                        true
                    }
                };
                decisions.push((s.clone(), answer));
                answer
            }
        }
    }

    pub fn to_log(&self) -> Option<OracleLog> {
        self.commitment().map(|commitment| OracleLog { commitment, decisions: self.decisions().to_vec() })
    }

    /// Rebuilds a lazy oracle, checking that every logged answer agrees with the commitment.
    pub fn from_log(log: &OracleLog) -> Result<Self, UltraError> {
        let (a, m) = log.commitment;
        if m == 0 || a >= m {
            return Err(UltraError::InconsistentLog(format!("commitment {a} mod {m} is not a residue class")));
        }
        for (s, answer) in &log.decisions {
            if settles(a, m, s) != Some(*answer) {
                return Err(UltraError::InconsistentLog(format!("answer {answer} for {s} disagrees with {a} mod {m}")));
            }
        }
        Ok(UltrafilterOracle::LazyGeneric { residue: a, modulus: m, decisions: log.decisions.clone() })
    }

    pub fn log_json(&self) -> Option<String> {
        self.to_log().map(|l| serde_json::to_string(&l).expect("log serializes"))
    }

    pub fn from_json(text: &str) -> Result<Self, UltraError> {
        let log: OracleLog = serde_json::from_str(text).map_err(|e| UltraError::InconsistentLog(e.to_string()))?;
        Self::from_log(&log)
    }
}

/// Whether the class `a mod m` eventually lies inside `s` (`Some(true)`), inside its complement, or neither.
fn settles(a: u64, m: u64, s: &PeriodicSet) -> Option<bool> {
    let l = m.lcm(&s.modulus());
    let mut hits = (0..l / m).map(|k| s.residues().contains(&((a + k * m) % s.modulus())));
    let first = hits.next().expect("at least one class");
    hits.all(|h| h == first).then_some(first)
}
