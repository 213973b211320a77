//! Finite-evidence model of the ultrapower of ℚ over the index set ℕ.
//!
//! Elements are closed-form sequences, index sets are eventually periodic,
//! and an [`UltrafilterOracle`] decides which index sets are large.

mod module;
mod oracle;
mod pset;
mod seq;
mod truth;

use num_bigint::BigInt;
use thiserror::Error;

use crate::formula::FormulaError;

pub use module::{module_action, quotient_bound_check, CyclicModuleSeq, ModuleElement, QuotientReport};
pub use oracle::{OracleLog, UltrafilterOracle};
pub use pset::PeriodicSet;
pub use seq::{hadd, hdiv, hmul, hsub, hyper_dp, nth_prime, ExpPoly, HyperRational, SeqExpr};
pub use truth::{los_eval, truth_set, Args};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UltraError {
    #[error("unsupported truth set: {0}")]
    UnsupportedTruthSet(String),
    #[error("unsupported valuation: {0}")]
    UnsupportedValuation(String),
    #[error("divisor vanishes on a cofinite set: {0}")]
    DivisorVanishesCofinally(String),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("generators do not generate the component at index {index}")]
    NotGenerating { index: u64 },
    #[error("modulus at index {index} is {value}, expected at least 1")]
    BadModulus { index: u64, value: BigInt },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("no value for variable '{0}'")]
    UnboundVariable(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("inconsistent oracle log: {0}")]
    InconsistentLog(String),
    #[error("bad periodic set: {0}")]
    BadSet(String),
    #[error("bad sequence expression: {0}")]
    BadExpression(String),
}
