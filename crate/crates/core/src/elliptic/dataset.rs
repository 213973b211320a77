//! Curated curve records, one JSON object per line:
//!
//! ```text
//! {"A": "p/q", "B": "p/q", "rank": r, "generators": [["x","y"], ...], "torsion_order": t}
//! ```
//!
//! An optional `"label"` string is carried through. Coordinates may also be
//! plain JSON integers.

use serde::Deserialize;

use super::{CurvePoint, EllipticError, MWData};
use crate::arith::parse_rational;
use crate::{Curve, Point, Rational};

/// The bundled dataset.
pub const DEFAULT_DATASET: &str = include_str!("../../data/curves.jsonl");

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub index: usize,
    pub label: Option<String>,
    pub data: MWData,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatField {
    Str(String),
    Int(i64),
}

impl RatField {
    fn to_rational(&self) -> Option<Rational> {
        match self {
            RatField::Str(s) => parse_rational(s),
            RatField::Int(n) => Some(Rational::from_integer((*n).into())),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    #[serde(rename = "A")]
    a: RatField,
    #[serde(rename = "B")]
    b: RatField,
    rank: usize,
    generators: Vec<[RatField; 2]>,
    torsion_order: usize,
    #[serde(default)]
    label: Option<String>,
}

fn record(index: usize, line: &str) -> Result<DatasetRecord, EllipticError> {
    let fail = |reason: String| EllipticError::Dataset { index, reason };
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| fail(e.to_string()))?;
    let rat = |f: &RatField, what: &str| {
        f.to_rational().ok_or_else(|| fail(format!("{what} is not a rational")))
    };
    let curve = Curve::new(rat(&raw.a, "A")?, rat(&raw.b, "B")?).map_err(|e| fail(e.to_string()))?;
    let mut generators: Vec<Point> = Vec::new();
    for [x, y] in &raw.generators {
        generators.push(CurvePoint::affine(rat(x, "generator x")?, rat(y, "generator y")?));
    }
    if raw.rank != generators.len() {
        return Err(fail(format!("rank {} but {} generators", raw.rank, generators.len())));
    }
    let data = MWData::with_computed_torsion(curve, generators).map_err(|e| fail(e.to_string()))?;
    if data.torsion.len() != raw.torsion_order {
        return Err(fail(format!(
            "torsion_order {} but the curve has {} torsion points",
            raw.torsion_order,
            data.torsion.len()
        )));
    }
    Ok(DatasetRecord { index, label: raw.label, data })
}

/// Parses and validates every record; the first violation rejects the whole input.
///
/// Blank lines are skipped; record indices count non-blank lines from 0.
pub fn parse_dataset(text: &str) -> Result<Vec<DatasetRecord>, EllipticError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| record(i, l))
        .collect()
}

pub fn load_dataset(path: &std::path::Path) -> Result<Vec<DatasetRecord>, EllipticError> {
    let text = std::fs::read_to_string(path).map_err(|e| EllipticError::Dataset {
        index: 0,
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_dataset(&text)
}
