//! Published reference values: closed-form densities, maximal parameters,
//! piece volumes and edge-intersection rows per simplex, plus the
//! dimension-wise optimum and simplicial upper bound table.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::{self, ExactExpr, Scalar};

const BUNDLED: &str = include_str!("../data/reference.json");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    simplices: Vec<SimplexRecord>,
    bounds: Vec<BoundRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplexRecord {
    witt: String,
    density: String,
    density_decimal: String,
    max_parameters: BTreeMap<String, String>,
    pieces: Vec<PieceRecord>,
    intersections: Vec<Vec<String>>,
    #[serde(default)]
    weights: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceRecord {
    cusp: usize,
    s: String,
    volume: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundRecord {
    n: usize,
    closed_form: Option<String>,
    value: String,
    upper: String,
    gap: String,
}

#[derive(Clone, Debug)]
pub struct PieceReference {
    pub cusp: usize,
    pub s: ExactExpr,
    pub volume: ExactExpr,
}

#[derive(Clone, Debug)]
pub struct SimplexReference {
    pub witt_symbol: String,
    pub density: ExactExpr,
    /// Density as printed, truncated or rounded to a few decimals.
    pub density_decimal: String,
    pub max_parameters: Vec<(usize, ExactExpr)>,
    pub pieces: Vec<PieceReference>,
    /// Where the horosphere of type 0 at `A0` meets the edges `A0 Ai`,
    /// `i = 1..=n`, with first coordinate 1.
    pub intersections: Vec<Vec<ExactExpr>>,
    pub weights: Option<Vec<ExactExpr>>,
}

/// A row of the per-dimension table. `closed_form = None` marks the
/// three-dimensional row, whose value is the simplicial density series.
#[derive(Clone, Debug)]
pub struct BoundReference {
    pub n: usize,
    pub closed_form: Option<ExactExpr>,
    pub printed_value: String,
    /// Literature constant for the simplicial density upper bound.
    pub upper: String,
    pub printed_gap: String,
}

impl BoundReference {
    pub fn evaluate(&self, prec: u32) -> Result<Scalar> {
        match &self.closed_form {
            Some(e) => e.eval(prec),
            None => Ok(scalar::d3_infinity_series(prec)),
        }
    }

    pub fn upper_bound(&self, prec: u32) -> Result<Scalar> {
        parse_decimal(&self.upper, prec)
    }
}

#[derive(Clone, Debug)]
pub struct ReferenceData {
    pub simplices: Vec<SimplexReference>,
    pub bounds: Vec<BoundReference>,
}

fn expr(text: &str, at: &str) -> Result<ExactExpr> {
    text.parse().map_err(|e: Error| Error::Schema { path: at.to_string(), message: e.to_string() })
}

/// Exact value of a plain decimal literal such as `0.0315`.
pub fn parse_decimal(text: &str, prec: u32) -> Result<Scalar> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits = format!("{int}{frac}");
    let numerator: i64 = digits.parse().map_err(|_| Error::domain(format!("not a decimal literal: {text}")))?;
    let denominator =
        10i64.checked_pow(frac.len() as u32).ok_or_else(|| Error::domain(format!("too many decimals: {text}")))?;
    Ok(Scalar::from_ratio(numerator, denominator, prec))
}

/// Number of digits after the decimal point.
pub fn decimal_places(text: &str) -> usize {
    text.split_once('.').map_or(0, |(_, f)| f.len())
}

/// Whether `value` is within one unit of the last digit of `printed`.
pub fn matches_printed(value: &Scalar, printed: &str) -> Result<bool> {
    let prec = value.precision();
    let p = parse_decimal(printed, prec)?;
    let unit = Scalar::from_ratio(1, 10i64.pow(decimal_places(printed) as u32), prec);
    Ok((value - &p).abs() < unit)
}

impl ReferenceData {
    pub fn bundled() -> ReferenceData {
        Self::parse(BUNDLED).expect("bundled reference data is valid")
    }

    pub fn parse(source: &str) -> Result<ReferenceData> {
        let de = &mut serde_json::Deserializer::from_str(source);
        let doc: Document = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })?;
        let simplices = doc
            .simplices
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                let at = |f: &str| format!("simplices[{k}].{f}");
                let max_parameters = r
                    .max_parameters
                    .iter()
                    .map(|(c, s)| {
                        let cusp = c.parse().map_err(|_| Error::Schema {
                            path: at("max_parameters"),
                            message: format!("bad cusp index {c}"),
                        })?;
                        Ok((cusp, expr(s, &at("max_parameters"))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let pieces = r
                    .pieces
                    .iter()
                    .map(|p| {
                        Ok(PieceReference {
                            cusp: p.cusp,
                            s: expr(&p.s, &at("pieces"))?,
                            volume: expr(&p.volume, &at("pieces"))?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let intersections = r
                    .intersections
                    .iter()
                    .map(|row| row.iter().map(|c| expr(c, &at("intersections"))).collect())
                    .collect::<Result<Vec<_>>>()?;
                let weights = r
                    .weights
                    .as_ref()
                    .map(|w| w.iter().map(|x| expr(x, &at("weights"))).collect::<Result<Vec<_>>>())
                    .transpose()?;
                Ok(SimplexReference {
                    density: expr(&r.density, &at("density"))?,
                    witt_symbol: r.witt,
                    density_decimal: r.density_decimal,
                    max_parameters,
                    pieces,
                    intersections,
                    weights,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let bounds = doc
            .bounds
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                for (field, text) in [("value", &r.value), ("upper", &r.upper), ("gap", &r.gap)] {
                    parse_decimal(text, 64)
                        .map_err(|e| Error::Schema { path: format!("bounds[{k}].{field}"), message: e.to_string() })?;
                }
                Ok(BoundReference {
                    n: r.n,
                    closed_form: r
                        .closed_form
                        .as_deref()
                        .map(|c| expr(c, &format!("bounds[{k}].closed_form")))
                        .transpose()?,
                    printed_value: r.value,
                    upper: r.upper,
                    printed_gap: r.gap,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReferenceData { simplices, bounds })
    }

    pub fn simplex(&self, witt: &str) -> Option<&SimplexReference> {
        self.simplices.iter().find(|s| s.witt_symbol == witt)
    }

    pub fn bound(&self, n: usize) -> Option<&BoundReference> {
        self.bounds.iter().find(|b| b.n == n)
    }
}
