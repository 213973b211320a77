use serde::Serialize;

use super::{torsion_points, CurvePoint, EllipticError, MAZUR_MAX_ORDER};
use crate::{Curve, Point};

/// Claimed Mordell–Weil data for one curve.
///
/// Everything checkable is checked by [`MWData::new`]; the rank itself is
/// taken on trust.
#[derive(Debug, Clone, PartialEq)]
pub struct MWData {
    pub curve: Curve,
    pub generators: Vec<Point>,
    pub torsion: Vec<Point>,
    pub claimed_rank: usize,
}

impl MWData {
    pub fn new(curve: Curve, generators: Vec<Point>, torsion: Vec<Point>, claimed_rank: usize) -> Result<Self, EllipticError> {
        let d = MWData { curve, generators, torsion, claimed_rank };
        d.validate()?;
        Ok(d)
    }

    /// Builds the record with the torsion subgroup computed from the curve.
    pub fn with_computed_torsion(curve: Curve, generators: Vec<Point>) -> Result<Self, EllipticError> {
        let torsion = torsion_points(&curve)?;
        let rank = generators.len();
        Self::new(curve, generators, torsion, rank)
    }

    pub fn validate(&self) -> Result<(), EllipticError> {
        let bad = |m: String| Err(EllipticError::InvalidMWData(m));
        if self.claimed_rank != self.generators.len() {
            return bad(format!(
                "claimed rank {} but {} generators",
                self.claimed_rank,
                self.generators.len()
            ));
        }
        for g in &self.generators {
            if !self.curve.contains(g) {
                return bad(format!("generator {g} is not on the curve"));
            }
            if self.curve.order_up_to(g, MAZUR_MAX_ORDER).is_some() {
                return bad(format!("generator {g} is a torsion point"));
            }
        }
        if !self.torsion.contains(&CurvePoint::Infinity) {
            return bad("torsion list lacks the identity".into());
        }
        for t in &self.torsion {
            if !self.curve.contains(t) {
                return bad(format!("torsion point {t} is not on the curve"));
            }
            if !self.torsion.contains(&self.curve.neg(t)?) {
                return bad(format!("torsion list not closed under negation at {t}"));
            }
            for s in &self.torsion {
                if !self.torsion.contains(&self.curve.add_unchecked(t, s)) {
                    return bad(format!("torsion list not closed under addition at {t} + {s}"));
                }
            }
        }
        let mut listed = self.torsion.clone();
        listed.sort();
        let mut computed = torsion_points(&self.curve)?;
        computed.sort();
        if listed != computed {
            return bad(format!(
                "torsion list has {} points, the curve has {}",
                listed.len(),
                computed.len()
            ));
        }
        Ok(())
    }
}

/// `E(ℚ)/nE(ℚ)` with explicit coset representatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakMWQuotient {
    pub n: u32,
    pub rank: usize,
    pub torsion_quotient: u64,
    pub representatives: Vec<Point>,
    pub cardinality: u64,
    pub lower: u64,
    pub upper: u64,
    /// `n^r · |E[n](ℚ)|`.
    pub classical_upper: u64,
}

/// Coset representatives of `T/nT`, first member of each coset in list order.
fn torsion_coset_reps(curve: &Curve, torsion: &[Point], n: u32) -> Vec<Point> {
    let n_t: Vec<Point> = torsion
        .iter()
        .map(|t| curve.smul_unchecked(n as i64, t))
        .collect();
    let mut covered = vec![false; torsion.len()];
    let mut reps = Vec::new();
    for (i, t) in torsion.iter().enumerate() {
        if covered[i] {
            continue;
        }
        reps.push(t.clone());
        for s in &n_t {
            let member = curve.add_unchecked(t, s);
            if let Some(j) = torsion.iter().position(|x| *x == member) {
                covered[j] = true;
            }
        }
    }
    reps
}

/// Representatives `Σ aᵢGᵢ + T` (`0 ≤ aᵢ < n`, `T` over `T/nT`) and the
/// check `n^r ≤ |E/nE| ≤ n^r + n²`.
pub fn weak_mw_quotient(data: &MWData, n: u32) -> Result<WeakMWQuotient, EllipticError> {
    if n < 2 {
        return Err(EllipticError::InvalidMWData(format!("n must be at least 2, got {n}")));
    }
    data.validate()?;
    let curve = &data.curve;
    let mut torsion = data.torsion.clone();
    torsion.sort();
    let t_reps = torsion_coset_reps(curve, &torsion, n);
    let n_torsion = torsion
        .iter()
        .filter(|t| curve.smul_unchecked(n as i64, t).is_infinity())
        .count() as u64;

    let r = data.generators.len();
    let nr = (n as u64).pow(r as u32);
    let mut representatives = Vec::new();
    // coefficient vectors in lexicographic order: base-n digits of idx
    for idx in 0..nr {
        let mut base = CurvePoint::Infinity;
        let mut rest = idx;
        for (k, g) in data.generators.iter().enumerate() {
            let place = (n as u64).pow((r - 1 - k) as u32);
            let a = rest / place;
            rest %= place;
            base = curve.add_unchecked(&base, &curve.smul_unchecked(a as i64, g));
        }
        for t in &t_reps {
            representatives.push(curve.add_unchecked(&base, t));
        }
    }

    let cardinality = representatives.len() as u64;
    let lower = nr;
    let upper = nr + (n as u64) * (n as u64);
    if cardinality < lower || cardinality > upper {
        return Err(EllipticError::SandwichViolation { n, rank: r, cardinality, lower, upper });
    }
    Ok(WeakMWQuotient {
        n,
        rank: r,
        torsion_quotient: t_reps.len() as u64,
        representatives,
        cardinality,
        lower,
        upper,
        classical_upper: nr * n_torsion,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankBoundReport {
    pub max_rank: usize,
    pub max_weak2: u64,
    /// every `|E/2E| ≤ 2^{r_max}·4`
    pub weak_bounded_by_rank: bool,
    /// every `r ≤ log₂ max|E/2E|`
    pub rank_bounded_by_weak: bool,
    pub pass: bool,
}

/// Dataset-scale arithmetic behind "ranks bounded ⇔ weak 2-quotients bounded".
pub fn rank_bound_fragment(records: &[MWData]) -> Result<RankBoundReport, EllipticError> {
    let mut max_rank = 0;
    let mut weak = Vec::with_capacity(records.len());
    for d in records {
        max_rank = max_rank.max(d.claimed_rank);
        weak.push((d.claimed_rank, weak_mw_quotient(d, 2)?.cardinality));
    }
    let max_weak2 = weak.iter().map(|w| w.1).max().unwrap_or(1);
    let cap = 4u64 << max_rank;
    let weak_bounded_by_rank = weak.iter().all(|&(_, c)| c <= cap);
    let log2 = 63 - max_weak2.leading_zeros() as usize;
    let rank_bounded_by_weak = weak.iter().all(|&(r, _)| r <= log2);
    Ok(RankBoundReport {
        max_rank,
        max_weak2,
        weak_bounded_by_rank,
        rank_bounded_by_weak,
        pass: weak_bounded_by_rank && rank_bounded_by_weak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn pt(x: i64, y: i64) -> Point {
        CurvePoint::affine(q(x), q(y))
    }

    // |T/nT| by enumerating the subgroup nT and counting its cosets
    fn brute_quotient_size(curve: &Curve, torsion: &[Point], n: i64) -> usize {
        let mut n_t: Vec<Point> = Vec::new();
        for t in torsion {
            let mut acc = CurvePoint::Infinity;
            for _ in 0..n {
                acc = curve.add(&acc, t).unwrap();
            }
            if !n_t.contains(&acc) {
                n_t.push(acc);
            }
        }
        torsion.len() / n_t.len()
    }

    #[test]
    fn rank_zero_full_two_torsion() {
        let e = Curve::new(q(-1), q(0)).unwrap();
        let d = MWData::with_computed_torsion(e.clone(), vec![]).unwrap();
        assert_eq!(brute_quotient_size(&e, &d.torsion, 2), 4);
        let w = weak_mw_quotient(&d, 2).unwrap();
        assert_eq!(w.cardinality, 4);
        assert_eq!((w.lower, w.upper), (1, 5));
    }

    #[test]
    fn rank_one_trivial_torsion() {
        let e = Curve::new(q(0), q(-2)).unwrap();
        let d = MWData::with_computed_torsion(e, vec![pt(3, 5)]).unwrap();
        let w = weak_mw_quotient(&d, 2).unwrap();
        assert_eq!(w.cardinality, 2);
        assert_eq!((w.lower, w.upper), (2, 6));
        assert_eq!(w.representatives, vec![CurvePoint::Infinity, pt(3, 5)]);
    }

    #[test]
    fn trivial_group_n3() {
        let e = Curve::new(q(0), q(-2)).unwrap();
        let d = MWData::with_computed_torsion(e, vec![]).unwrap();
        let w = weak_mw_quotient(&d, 3).unwrap();
        assert_eq!((w.cardinality, w.lower, w.upper), (1, 1, 10));
    }

    #[test]
    fn quotient_matches_brute_force_on_z6() {
        let e = Curve::new(q(0), q(1)).unwrap();
        let d = MWData::with_computed_torsion(e.clone(), vec![]).unwrap();
        for n in 2..=6 {
            let w = weak_mw_quotient(&d, n).unwrap();
            assert_eq!(w.cardinality as usize, brute_quotient_size(&e, &d.torsion, n as i64), "n={n}");
            assert_eq!(w.cardinality, w.classical_upper);
        }
    }

    #[test]
    fn naive_upper_bound_can_fail() {
        // rank 1 with full 2-torsion: |E/2E| = 2·4 = 8 > 2 + 4
        let e = Curve::new(q(-25), q(0)).unwrap();
        let d = MWData::with_computed_torsion(e, vec![pt(-4, 6)]).unwrap();
        assert!(matches!(
            weak_mw_quotient(&d, 2),
            Err(EllipticError::SandwichViolation { cardinality: 8, upper: 6, .. })
        ));
        assert_eq!(weak_mw_quotient(&d, 3).unwrap().cardinality, 3);
    }

    #[test]
    fn validation_rejects_bad_data() {
        let e = Curve::new(q(0), q(1)).unwrap();
        assert!(MWData::with_computed_torsion(e.clone(), vec![pt(2, 3)]).is_err());
        let t = torsion_points(&e).unwrap();
        assert!(MWData::new(e.clone(), vec![], t[..3].to_vec(), 0).is_err());
        assert!(MWData::new(e.clone(), vec![], t.clone(), 1).is_err());
        assert!(MWData::new(e, vec![pt(1, 1)], t, 1).is_err());
    }

    #[test]
    fn rank_fragment() {
        let a = MWData::with_computed_torsion(Curve::new(q(-1), q(0)).unwrap(), vec![]).unwrap();
        let b = MWData::with_computed_torsion(Curve::new(q(0), q(-2)).unwrap(), vec![pt(3, 5)]).unwrap();
        let rep = rank_bound_fragment(&[a, b]).unwrap();
        assert_eq!(rep.max_rank, 1);
        assert_eq!(rep.max_weak2, 4);
        assert!(rep.pass);
    }
}
