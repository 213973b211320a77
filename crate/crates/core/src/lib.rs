//! Exact, desk-scale machinery for definable arithmetic over ℚ: valuations
//! and factorization, first-order ring formulas, elliptic-curve weak
//! Mordell–Weil quotients, a finite-evidence ultrapower simulator, and
//! prime-factor filters with ordered-semigroup correspondences.

pub mod arith;
pub mod elliptic;
pub mod formula;
pub mod ideals;
pub mod scalar;
pub mod suite;
pub mod ultrapower;

pub use arith::{Integer, Rational};
pub use scalar::ExactField;

/// Curves over arbitrary-precision rationals.
pub type Curve = elliptic::EllipticCurve<Rational>;
/// Points over arbitrary-precision rationals.
pub type Point = elliptic::CurvePoint<Rational>;
/// Curves over machine-word rationals; overflows panic.
pub type Curve64 = elliptic::EllipticCurve<num_rational::Ratio<i64>>;
pub type Point64 = elliptic::CurvePoint<num_rational::Ratio<i64>>;
