use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{CurvePoint, EllipticError, MAZUR_MAX_ORDER};
use crate::arith::{rationals_up_to_height, Sieve};
use crate::{Curve, Point, Rational};

/// Scaling `u` with `A·u⁴, B·u⁶ ∈ ℤ`, together with the integral coefficients.
pub fn integral_model(curve: &Curve) -> Result<(BigInt, BigInt, BigInt), EllipticError> {
    let sieve = Sieve::shared();
    let mut need: BTreeMap<BigInt, u64> = BTreeMap::new();
    for (den, weight) in [(curve.a().denom(), 4u64), (curve.b().denom(), 6u64)] {
        for (p, e) in sieve.factor(den)? {
            let k = e.div_ceil(weight);
            let slot = need.entry(p).or_insert(0);
            *slot = (*slot).max(k);
        }
    }
    let u: BigInt = need.iter().map(|(p, k)| p.pow(*k as u32)).product();
    let u4 = Rational::from_integer(u.pow(4));
    let u6 = Rational::from_integer(u.pow(6));
    let a = curve.a() * &u4;
    let b = curve.b() * &u6;
    debug_assert!(a.is_integer() && b.is_integer());
    Ok((u, a.to_integer(), b.to_integer()))
}

fn divisors(sieve: &Sieve, n: &BigInt) -> Result<Vec<BigInt>, EllipticError> {
    let mut out = vec![BigInt::one()];
    for (p, e) in sieve.factor(&n.abs())? {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// `y ≥ 0` with `y = 0` or `y² | d`.
fn lutz_nagell_ys(sieve: &Sieve, d: &BigInt) -> Result<Vec<BigInt>, EllipticError> {
    let mut out = vec![BigInt::one()];
    for (p, e) in sieve.factor(&d.abs())? {
        let half = e / 2;
        let mut next = Vec::new();
        for y in &out {
            let mut pk = BigInt::one();
            for _ in 0..=half {
                next.push(y * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out.push(BigInt::zero());
    out.sort();
    Ok(out)
}

fn integer_roots_of_cubic(sieve: &Sieve, a: &BigInt, c: &BigInt) -> Result<Vec<BigInt>, EllipticError> {
    // x³ + a x + c
    let f = |x: &BigInt| x * x * x + a * x + c;
    let mut roots = Vec::new();
    if c.is_zero() {
        roots.push(BigInt::zero());
        // x² + a = 0
        if !a.is_positive() {
            let s = (-a).sqrt();
            if &s * &s == -a && !s.is_zero() {
                roots.push(s.clone());
                roots.push(-s);
            }
        }
    } else {
        for d in divisors(sieve, c)? {
            for x in [d.clone(), -d] {
                if f(&x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

/// All rational torsion points, identity first, then affine points in coordinate order.
///
/// Works on the integral model: Lutz–Nagell restricts torsion points to
/// integer coordinates with `y = 0` or `y² | 4A³ + 27B²`; each candidate is
/// kept if its order is at most 12.
pub fn torsion_points(curve: &Curve) -> Result<Vec<Point>, EllipticError> {
    let sieve = Sieve::shared();
    let (u, a, b) = integral_model(curve)?;
    let model = Curve::new(Rational::from_integer(a.clone()), Rational::from_integer(b.clone()))?;
    let disc = model.discriminant_term().to_integer();

    let u2 = Rational::from_integer(u.pow(2));
    let u3 = Rational::from_integer(u.pow(3));
    let mut out = vec![CurvePoint::Infinity];
    for y in lutz_nagell_ys(sieve, &disc)? {
        let c = &b - &y * &y;
        for x in integer_roots_of_cubic(sieve, &a, &c)? {
            let ys = if y.is_zero() { vec![y.clone()] } else { vec![-y.clone(), y.clone()] };
            for yy in ys {
                let p = CurvePoint::affine(Rational::from_integer(x.clone()), Rational::from_integer(yy));
                if is_torsion_integral(&model, &p) {
                    if let CurvePoint::Affine { x, y } = p {
                        out.push(CurvePoint::affine(x / &u2, y / &u3));
                    }
                }
            }
        }
    }
    out[1..].sort();
    Ok(out)
}

// Multiples of a torsion point on an integral model stay integral.
fn is_torsion_integral(model: &Curve, p: &Point) -> bool {
    let mut q = p.clone();
    for _ in 1..=MAZUR_MAX_ORDER {
        match &q {
            CurvePoint::Infinity => return true,
            CurvePoint::Affine { x, y } if !x.is_integer() || !y.is_integer() => return false,
            _ => {}
        }
        q = model.add_unchecked(&q, p);
    }
    false
}

/// Invariant factors `(n1, n2)` with `n1 | n2` of a finite group given by its elements.
pub fn torsion_structure(curve: &Curve, points: &[Point]) -> (u32, u32) {
    let size = points.len() as u32;
    let max_order = points
        .iter()
        .filter_map(|p| curve.order_up_to(p, MAZUR_MAX_ORDER))
        .max()
        .unwrap_or(1);
    (size / max_order, max_order)
}

/// Affine points whose x-coordinate has height at most `bound`, ordered by x then y.
pub fn naive_point_search(curve: &Curve, bound: u64) -> Result<Vec<Point>, EllipticError> {
    if bound == 0 {
        return Err(EllipticError::InvalidBound);
    }
    let mut out = Vec::new();
    let mut xs = rationals_up_to_height(bound);
    xs.sort();
    for x in xs {
        let r = curve.rhs(&x);
        if let Some(y) = rational_sqrt(&r) {
            if y.is_zero() {
                out.push(CurvePoint::affine(x, y));
            } else {
                out.push(CurvePoint::affine(x.clone(), -y.clone()));
                out.push(CurvePoint::affine(x, y));
            }
        }
    }
    Ok(out)
}

pub(crate) fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &n * &n == *r.numer() && &d * &d == *r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}
