//! Prime-factor filters and ideals of ℤ, and ordered-semigroup desk models.

mod filters;
mod semigroup;

use num_bigint::BigInt;
use thiserror::Error;

pub use filters::{
    filter_of_ideal, galois_checks, ideal_of_filter, is_maximal_principal_filter, CheckOutcome, FGIdeal, FilterDesc,
    GaloisReport, PrTable,
};
pub use semigroup::{
    analyse_scenario, radical_prime_exhaustive, run_scenario, Dvr, ExhaustiveReport, Scenario, ScenarioReport,
    ScenarioRun, SemigroupModel, ValuationIdeal, WindowSubset, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("the unit ideal has the empty set as a prime factor set")]
    UnitIdeal,
    #[error("a filter needs at least one base set")]
    EmptyBase,
    #[error("the base sets intersect in the empty set")]
    EmptyCore,
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("{value} lies outside the window 0..={window}")]
    WindowOverflow { value: String, window: u64 },
    #[error("the empty subsemigroup has no ideal")]
    EmptySubsemigroup,
    #[error("bad scenario: {0}")]
    BadScenario(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}
