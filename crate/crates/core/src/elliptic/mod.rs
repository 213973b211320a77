//! Elliptic curves `y² = x³ + Ax + B` over an exact field: the chord-tangent
//! group law, torsion enumeration, and weak Mordell–Weil quotients.

mod dataset;
mod torsion;
mod weak;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith::ArithError;
use crate::scalar::ExactField;

pub use dataset::{load_dataset, parse_dataset, DatasetRecord, DEFAULT_DATASET};
pub use torsion::{integral_model, naive_point_search, torsion_points, torsion_structure};
pub use weak::{rank_bound_fragment, weak_mw_quotient, MWData, RankBoundReport, WeakMWQuotient};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("curve is singular: 4A³ + 27B² = 0")]
    Singular,
    #[error("point {0} is not on the curve")]
    PointNotOnCurve(String),
    #[error("invalid Mordell–Weil data: {0}")]
    InvalidMWData(String),
    #[error("sandwich violated: {lower} <= {cardinality} <= {upper} fails (n = {n}, rank = {rank})")]
    SandwichViolation { n: u32, rank: usize, cardinality: u64, lower: u64, upper: u64 },
    #[error("dataset record {index}: {reason}")]
    Dataset { index: usize, reason: String },
    #[error("height bound must be at least 1")]
    InvalidBound,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The projective triple encoding: affine `(x, y, 1)`, identity `(0, 1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F: ExactField> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn to_triple(&self) -> [F; 3] {
        match self {
            CurvePoint::Infinity => [F::zero(), F::one(), F::zero()],
            CurvePoint::Affine { x, y } => [x.clone(), y.clone(), F::one()],
        }
    }

    /// Inverse of [`to_triple`](Self::to_triple); `None` for triples outside the encoding.
    pub fn from_triple(t: &[F; 3]) -> Option<Self> {
        if t[2].is_one() {
            Some(CurvePoint::affine(t[0].clone(), t[1].clone()))
        } else if t[2].is_zero() && t[0].is_zero() && t[1].is_one() {
            Some(CurvePoint::Infinity)
        } else {
            None
        }
    }
}

impl<F: fmt::Display> fmt::Display for CurvePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "(0,1,0)"),
            CurvePoint::Affine { x, y } => write!(f, "({x},{y})"),
        }
    }
}

impl<F: fmt::Display> Serialize for CurvePoint<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let triple = match self {
            CurvePoint::Infinity => ["0".to_string(), "1".to_string(), "0".to_string()],
            CurvePoint::Affine { x, y } => [x.to_string(), y.to_string(), "1".to_string()],
        };
        triple.serialize(s)
    }
}

/// A nonsingular short Weierstrass curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EllipticCurve<F> {
    a: F,
    b: F,
}

impl<F: ExactField> EllipticCurve<F> {
    pub fn new(a: F, b: F) -> Result<Self, EllipticError> {
        let c = EllipticCurve { a, b };
        if c.discriminant_term().is_zero() {
            return Err(EllipticError::Singular);
        }
        Ok(c)
    }

    pub fn a(&self) -> &F {
        &self.a
    }

    pub fn b(&self) -> &F {
        &self.b
    }

    /// `4A³ + 27B²`.
    pub fn discriminant_term(&self) -> F {
        let a3 = self.a.clone() * self.a.clone() * self.a.clone();
        F::from_i64(4) * a3 + F::from_i64(27) * self.b.clone() * self.b.clone()
    }

    /// Right-hand side `x³ + Ax + B`.
    pub fn rhs(&self, x: &F) -> F {
        x.clone() * x.clone() * x.clone() + self.a.clone() * x.clone() + self.b.clone()
    }

    pub fn contains(&self, p: &CurvePoint<F>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y.clone() * y.clone() == self.rhs(x),
        }
    }

    fn check(&self, p: &CurvePoint<F>) -> Result<(), EllipticError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(EllipticError::PointNotOnCurve(p.to_string()))
        }
    }

    pub fn neg(&self, p: &CurvePoint<F>) -> Result<CurvePoint<F>, EllipticError> {
        self.check(p)?;
        Ok(neg_unchecked(p))
    }

    pub fn add(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> Result<CurvePoint<F>, EllipticError> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let slope = if x1 == x2 {
            if y1.clone() + y2.clone() == F::zero() {
                // vertical chord, or vertical tangent at a 2-torsion point
                return CurvePoint::Infinity;
            }
            (F::from_i64(3) * x1.clone() * x1.clone() + self.a.clone()) / (F::from_i64(2) * y1.clone())
        } else {
            (y2.clone() - y1.clone()) / (x2.clone() - x1.clone())
        };
        let x3 = slope.clone() * slope.clone() - x1.clone() - x2.clone();
        let y3 = slope * (x1.clone() - x3.clone()) - y1.clone();
        CurvePoint::affine(x3, y3)
    }

    /// `n·P` by double-and-add; negative `n` multiplies `-P`.
    pub fn smul(&self, n: i64, p: &CurvePoint<F>) -> Result<CurvePoint<F>, EllipticError> {
        self.check(p)?;
        Ok(self.smul_unchecked(n, p))
    }

    pub(crate) fn smul_unchecked(&self, n: i64, p: &CurvePoint<F>) -> CurvePoint<F> {
        let mut base = if n < 0 { neg_unchecked(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    /// Order of `p` if it is at most `limit`, else `None`.
    pub fn order_up_to(&self, p: &CurvePoint<F>, limit: u32) -> Option<u32> {
        let mut q = p.clone();
        for k in 1..=limit {
            if q.is_infinity() {
                return Some(k);
            }
            q = self.add_unchecked(&q, p);
        }
        None
    }
}

fn neg_unchecked<F: ExactField>(p: &CurvePoint<F>) -> CurvePoint<F> {
    match p {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), -y.clone()),
    }
}

impl<F: fmt::Display> fmt::Display for EllipticCurve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x + ({})", self.a, self.b)
    }
}

/// Mazur's bound on the order of a rational torsion point.
pub const MAZUR_MAX_ORDER: u32 = 12;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Curve, Point, Rational};
    use num_rational::Ratio;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn pt(x: i64, y: i64) -> Point {
        CurvePoint::affine(q(x), q(y))
    }

    #[test]
    fn curve_new_examples() {
        assert!(Curve::new(q(-1), q(0)).is_ok());
        assert_eq!(Curve::new(q(0), q(0)), Err(EllipticError::Singular));
        assert!(Curve::new(q(0), q(1)).is_ok());
        // -3, 2: 4·(-27) + 27·4 = 0
        assert_eq!(Curve::new(q(-3), q(2)), Err(EllipticError::Singular));
    }

    #[test]
    fn add_examples() {
        let e = Curve::new(q(0), q(1)).unwrap();
        // λ = 3·4 / 6 = 2, x3 = 4 - 4 = 0, y3 = 2(2 - 0) - 3 = 1
        assert_eq!(e.add(&pt(2, 3), &pt(2, 3)).unwrap(), pt(0, 1));
        assert!(e.contains(&pt(0, 1)));

        let e2 = Curve::new(q(-1), q(0)).unwrap();
        assert_eq!(e2.add(&pt(0, 0), &pt(0, 0)).unwrap(), CurvePoint::Infinity);
        assert_eq!(e.add(&pt(2, 3), &CurvePoint::Infinity).unwrap(), pt(2, 3));
        assert_eq!(e.add(&CurvePoint::Infinity, &pt(2, 3)).unwrap(), pt(2, 3));
        assert_eq!(e.add(&pt(2, 3), &pt(2, -3)).unwrap(), CurvePoint::Infinity);
        assert!(matches!(e.add(&pt(1, 1), &pt(2, 3)), Err(EllipticError::PointNotOnCurve(_))));
    }

    // repeated addition, independent of double-and-add
    fn order_by_repeated_addition(e: &Curve, p: &Point) -> u32 {
        let mut acc = p.clone();
        let mut k = 1;
        while !acc.is_infinity() {
            acc = e.add(&acc, p).unwrap();
            k += 1;
            assert!(k <= 100);
        }
        k
    }

    #[test]
    fn smul_examples() {
        let e = Curve::new(q(0), q(1)).unwrap();
        assert_eq!(order_by_repeated_addition(&e, &pt(2, 3)), 6);
        assert_eq!(e.smul(6, &pt(2, 3)).unwrap(), CurvePoint::Infinity);
        assert_eq!(e.smul(1, &pt(2, 3)).unwrap(), pt(2, 3));
        assert_eq!(e.smul(0, &pt(2, 3)).unwrap(), CurvePoint::Infinity);
        assert_eq!(e.smul(-1, &pt(2, 3)).unwrap(), pt(2, -3));
        let e2 = Curve::new(q(-1), q(0)).unwrap();
        assert_eq!(e2.smul(2, &pt(0, 0)).unwrap(), CurvePoint::Infinity);
    }

    #[test]
    fn smul_matches_repeated_addition_on_nontorsion_point() {
        let e = Curve::new(q(0), q(-2)).unwrap();
        let g = pt(3, 5);
        let mut acc = CurvePoint::Infinity;
        for n in 0..8 {
            assert_eq!(e.smul(n, &g).unwrap(), acc);
            assert_eq!(e.smul(-n, &g).unwrap(), e.neg(&acc).unwrap());
            acc = e.add(&acc, &g).unwrap();
        }
    }

    #[test]
    fn triple_encoding() {
        let inf: Point = CurvePoint::Infinity;
        assert_eq!(inf.to_triple(), [q(0), q(1), q(0)]);
        assert_eq!(Point::from_triple(&[q(0), q(1), q(0)]), Some(inf));
        assert_eq!(Point::from_triple(&[q(2), q(3), q(1)]), Some(pt(2, 3)));
        assert_eq!(Point::from_triple(&[q(2), q(3), q(2)]), None);
        assert_eq!(serde_json::to_string(&pt(2, -3)).unwrap(), r#"["2","-3","1"]"#);
    }

    #[test]
    fn machine_rationals_run_the_same_law() {
        let e = EllipticCurve::<Ratio<i64>>::new(Ratio::from(0), Ratio::from(1)).unwrap();
        let p = CurvePoint::affine(Ratio::from(2), Ratio::from(3));
        assert_eq!(e.smul(2, &p).unwrap(), CurvePoint::affine(Ratio::from(0), Ratio::from(1)));
        assert_eq!(e.order_up_to(&p, MAZUR_MAX_ORDER), Some(6));
    }
}
