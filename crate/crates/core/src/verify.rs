//! Verification suites comparing computed geometry with the reference data.
//!
//! Each suite returns a list of [`Check`] rows carrying the expected and the
//! actual value as text, so callers can print failures without knowing what
//! was compared.

use crate::catalog::{self, Catalog, SimplexGeometry};
use crate::density::{self, DensityReport};
use crate::error::Result;
use crate::lorentz::ProjectivePoint;
use crate::mc_oracle;
use crate::reference::{self, ReferenceData, SimplexReference};
use crate::scalar::{ExactExpr, Scalar};

/// Significant digits used when rendering scalars in check rows.
const DIGITS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub subject: String,
    pub item: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    fn new(subject: &str, item: impl Into<String>, expected: String, actual: String, pass: bool) -> Self {
        Check { subject: subject.to_string(), item: item.into(), expected, actual, pass }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Suite {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Tolerances for the suites. `gram` is absolute; `value` is relative for
/// volumes and densities and absolute for coordinates and parameters.
#[derive(Clone, Debug)]
pub struct Tolerances {
    pub gram: Scalar,
    pub value: Scalar,
}

impl Tolerances {
    /// Tolerances that scale with the working precision.
    pub fn for_precision(prec: u32) -> Self {
        Tolerances { gram: Scalar::epsilon(prec, 48), value: Scalar::epsilon(prec, 40) }
    }

    /// Decimal tolerances `10^-gram_digits` and `10^-value_digits`.
    pub fn decimal(prec: u32, gram_digits: u32, value_digits: u32) -> Self {
        let ten = |k: u32| Scalar::from_int(10, prec).powi(-(k as i32));
        Tolerances { gram: ten(gram_digits), value: ten(value_digits) }
    }
}

fn show(x: &Scalar) -> String {
    x.to_digits(DIGITS)
}

fn bound(tol: &Scalar) -> String {
    format!("<= {}", tol.to_digits(3))
}

pub fn gram_suite(geoms: &[SimplexGeometry], tol: &Tolerances) -> Suite {
    let mut checks = Vec::new();
    for g in geoms {
        let report = catalog::verify_gram(g, &tol.gram);
        let dev = report.max_deviation().unwrap_or_else(|| Scalar::zero(g.precision));
        let mut actual = format!("max deviation {}", dev.to_digits(3));
        if let Some(f) = report.failures().next() {
            actual.push_str(&format!("; <u{},u{}> = {} vs {}", f.i, f.j, show(&f.computed), show(&f.expected)));
        }
        checks.push(Check::new(&g.witt_symbol, "gram matrix", bound(&tol.gram), actual, report.passed()));
    }
    Suite { name: "gram".into(), checks }
}

pub fn incidence_suite(geoms: &[SimplexGeometry], tol: &Tolerances) -> Suite {
    let mut checks = Vec::new();
    for g in geoms {
        let report = catalog::verify_incidence(g, &tol.gram);
        let actual = match (report.failures().next(), report.misclassified.first()) {
            (Some(f), _) => format!("A{}.u{} = {}", f.vertex, f.form, show(&f.value)),
            (None, Some(v)) => format!("vertex {v} misclassified"),
            (None, None) => "ok".into(),
        };
        checks.push(Check::new(
            &g.witt_symbol,
            "vertex-facet incidence",
            "A_i.u_j = 0 iff i != j".into(),
            actual,
            report.passed(),
        ));
    }
    Suite { name: "incidence".into(), checks }
}

fn cusp_parameter(r: &SimplexReference, cusp: usize, prec: u32) -> Result<Scalar> {
    match r.max_parameters.iter().find(|(c, _)| *c == cusp) {
        Some((_, s)) => s.eval(prec),
        None => Ok(Scalar::zero(prec)),
    }
}

fn intersection_checks(g: &SimplexGeometry, r: &SimplexReference, tol: &Tolerances) -> Result<Vec<Check>> {
    let prec = g.precision;
    let cusp = 0;
    let s = cusp_parameter(r, cusp, prec)?;
    let computed = density::horospherical_simplex(g, cusp, &s)?;
    let mut checks = Vec::new();
    if computed.len() != r.intersections.len() {
        checks.push(Check::new(
            &g.witt_symbol,
            "intersection rows",
            r.intersections.len().to_string(),
            computed.len().to_string(),
            false,
        ));
        return Ok(checks);
    }
    for (k, (h, row)) in computed.iter().zip(&r.intersections).enumerate() {
        let h = h.affine()?;
        let expected = row.iter().map(|e| e.eval(prec)).collect::<Result<Vec<_>>>()?;
        let expected = ProjectivePoint::new(expected)?.affine()?;
        let dev = h
            .coords()
            .iter()
            .zip(expected.coords())
            .map(|(a, b)| (a - b).abs())
            .reduce(Scalar::max)
            .expect("non-empty row");
        let pass = h.dimension() == expected.dimension() && dev <= tol.value;
        checks.push(Check::new(
            &g.witt_symbol,
            format!("H{}", k + 1),
            bound(&tol.value),
            format!("max deviation {}", dev.to_digits(3)),
            pass,
        ));
    }
    Ok(checks)
}

pub fn intersection_suite(geoms: &[SimplexGeometry], refs: &ReferenceData, tol: &Tolerances) -> Suite {
    let mut checks = Vec::new();
    for g in geoms {
        let Some(r) = refs.simplex(&g.witt_symbol) else { continue };
        match intersection_checks(g, r, tol) {
            Ok(c) => checks.extend(c),
            Err(e) => checks.push(Check::new(&g.witt_symbol, "intersections", "computed".into(), e.to_string(), false)),
        }
    }
    Suite { name: "intersections".into(), checks }
}

fn relative_check(subject: &str, item: String, expected: &Scalar, actual: &Scalar, tol: &Scalar) -> Check {
    let pass = actual.rel_diff(expected) <= *tol;
    Check::new(subject, item, show(expected), show(actual), pass)
}

fn absolute_check(subject: &str, item: String, expected: &Scalar, actual: &Scalar, tol: &Scalar) -> Check {
    let pass = (actual - expected).is_zero_within(tol);
    Check::new(subject, item, show(expected), show(actual), pass)
}

/// Checks for one density report: closed form, maximal parameters, pieces,
/// weights, transition endpoints and the piece/volume consistency.
pub fn density_checks(
    g: &SimplexGeometry,
    report: &DensityReport,
    r: Option<&SimplexReference>,
    tol: &Tolerances,
) -> Result<Vec<Check>> {
    let prec = g.precision;
    let w = g.witt_symbol.as_str();
    let mut checks = Vec::new();

    let total = report.total_piece_volume();
    checks.push(relative_check(
        w,
        "density * volume = pieces".to_string(),
        &total,
        &(&report.density * &report.simplex_volume),
        &tol.value,
    ));
    let weight_sum = crate::scalar::sum(&report.weights, prec);
    checks.push(absolute_check(w, "weights sum".to_string(), &Scalar::one(prec), &weight_sum, &tol.value));
    for t in &report.transitions {
        let (a, b) = t.endpoints()?;
        let mid = t.density_at(&(&t.x_max / 2))?;
        let pass = t.is_convex_on_grid(16)? && mid < a.clone().max(b.clone());
        checks.push(Check::new(
            w,
            format!("transition A{}/A{} convex", t.shrinking, t.growing),
            format!("midpoint < max({}, {})", a.to_digits(12), b.to_digits(12)),
            mid.to_digits(12),
            pass,
        ));
    }

    let Some(r) = r else { return Ok(checks) };
    checks.push(relative_check(
        w,
        format!("density = {}", r.density),
        &r.density.eval(prec)?,
        &report.density,
        &tol.value,
    ));
    for (cusp, s) in &r.max_parameters {
        let computed = density::max_horoball_parameter(g, *cusp)?;
        checks.push(absolute_check(w, format!("max s{cusp}"), &s.eval(prec)?, &computed, &tol.value));
    }
    for p in &r.pieces {
        let s = p.s.eval(prec)?;
        let computed = density::cusp_piece_volume(g, p.cusp, &s)?;
        checks.push(relative_check(
            w,
            format!("piece A{} at s = {}", p.cusp, p.s),
            &p.volume.eval(prec)?,
            &computed,
            &tol.value,
        ));
    }
    if let Some(weights) = &r.weights {
        // Reference weights are compared as a multiset: the published order
        // does not always follow the cusp order.
        let mut expected = weights.iter().map(|e| e.eval(prec)).collect::<Result<Vec<_>>>()?;
        let mut actual = report.weights.clone();
        expected.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        actual.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let pass = expected.len() == actual.len()
            && expected.iter().zip(&actual).all(|(e, a)| (e - a).is_zero_within(&tol.value));
        let list = |v: &[Scalar]| v.iter().map(|x| x.to_digits(12)).collect::<Vec<_>>().join(", ");
        checks.push(Check::new(w, "weights", list(&expected), list(&actual), pass));
    }
    if !report.transitions.is_empty() {
        let target = r.density.eval(prec)?;
        for t in &report.transitions {
            let (a, b) = t.endpoints()?;
            checks.push(relative_check(
                w,
                format!("transition A{}/A{} at 0", t.shrinking, t.growing),
                &target,
                &a,
                &tol.value,
            ));
            checks.push(relative_check(
                w,
                format!("transition A{}/A{} at x_max", t.shrinking, t.growing),
                &target,
                &b,
                &tol.value,
            ));
        }
    }
    Ok(checks)
}

pub fn density_suite(
    geoms: &[SimplexGeometry],
    reports: &[Result<DensityReport>],
    refs: &ReferenceData,
    tol: &Tolerances,
) -> Suite {
    let mut checks = Vec::new();
    for (g, report) in geoms.iter().zip(reports) {
        let result = report
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|rep| density_checks(g, rep, refs.simplex(&g.witt_symbol), tol));
        match result {
            Ok(c) => checks.extend(c),
            Err(e) => checks.push(Check::new(&g.witt_symbol, "density", "computed".into(), e.to_string(), false)),
        }
    }
    Suite { name: "density".into(), checks }
}

pub fn commensurability_suite(catalog: &Catalog, prec: u32, tol: &Tolerances) -> Suite {
    let report = catalog::commensurability_check(catalog, prec, &tol.value);
    let checks = report
        .entries
        .iter()
        .map(|e| {
            let actual = match (&e.ratio, &e.note) {
                (Some(r), _) => show(r),
                (None, Some(n)) => n.clone(),
                (None, None) => "missing".into(),
            };
            Check::new(&e.child, format!("vol / vol({})", e.parent), e.index.to_string(), actual, e.pass)
        })
        .collect();
    Suite { name: "commensurability".into(), checks }
}

/// Statistical volume check; passes when `|z| < z_limit`.
pub fn monte_carlo_suite(geoms: &[SimplexGeometry], samples: u64, seed: u64, z_limit: f64) -> Suite {
    let mut checks = Vec::new();
    for g in geoms {
        let volume = g.volume.to_f64();
        let check = match mc_oracle::estimate_volume(g, samples, seed) {
            Ok(e) => {
                let z = e.z_score(volume);
                Check::new(
                    &g.witt_symbol,
                    format!("monte carlo volume ({samples} samples, seed {seed})"),
                    format!("{volume:.6e}"),
                    format!(
                        "{:.6e} +- {:.2e} (z = {z:.2}, max integrand {:.1})",
                        e.mean, e.standard_error, e.max_integrand
                    ),
                    z.abs() < z_limit,
                )
            }
            Err(err) => {
                Check::new(&g.witt_symbol, "monte carlo volume", format!("{volume:.6e}"), err.to_string(), false)
            }
        };
        checks.push(check);
    }
    Suite { name: "monte carlo".into(), checks }
}

/// Evaluates every catalog entry at `prec`; entries that fail to evaluate
/// are reported as a failed suite.
pub fn evaluate_all(catalog: &Catalog, prec: u32) -> (Vec<SimplexGeometry>, Suite) {
    let mut geoms = Vec::new();
    let mut checks = Vec::new();
    for def in catalog.iter() {
        match def.evaluate(prec) {
            Ok(g) => geoms.push(g),
            Err(e) => {
                checks.push(Check::new(&def.witt_symbol, "evaluate", "valid geometry".into(), e.to_string(), false))
            }
        }
    }
    (geoms, Suite { name: "evaluation".into(), checks })
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub precision: u32,
    pub tolerances: Tolerances,
    pub mc_samples: u64,
    pub seed: u64,
    /// Simplices for the Monte Carlo suite; all when empty.
    pub mc_subjects: Vec<String>,
}

impl VerifyOptions {
    pub fn new(precision: u32) -> Self {
        VerifyOptions {
            precision,
            tolerances: Tolerances::for_precision(precision),
            mc_samples: 0,
            seed: 42,
            mc_subjects: Vec::new(),
        }
    }
}

/// Runs every suite. Density reports are computed in parallel.
pub fn run_all(catalog: &Catalog, refs: &ReferenceData, opts: &VerifyOptions) -> Vec<Suite> {
    use rayon::prelude::*;
    let (geoms, evaluation) = evaluate_all(catalog, opts.precision);
    let tol = &opts.tolerances;
    let reports: Vec<Result<DensityReport>> = geoms.par_iter().map(density::density_report).collect();
    let mut suites = Vec::new();
    if !evaluation.checks.is_empty() {
        suites.push(evaluation);
    }
    suites.extend([
        gram_suite(&geoms, tol),
        incidence_suite(&geoms, tol),
        intersection_suite(&geoms, refs, tol),
        density_suite(&geoms, &reports, refs, tol),
        commensurability_suite(catalog, opts.precision, tol),
    ]);
    if opts.mc_samples > 0 {
        let chosen: Vec<SimplexGeometry> = geoms
            .iter()
            .filter(|g| opts.mc_subjects.is_empty() || opts.mc_subjects.contains(&g.witt_symbol))
            .cloned()
            .collect();
        suites.push(monte_carlo_suite(&chosen, opts.mc_samples, opts.seed, 3.0));
    }
    suites
}

/// One row of the per-dimension table: best density, the simplicial upper
/// bound (a literature constant) and their gap.
#[derive(Clone, Debug)]
pub struct BoundRow {
    pub n: usize,
    pub closed_form: Option<ExactExpr>,
    pub value: Scalar,
    /// Simplices attaining `value`, or empty when it comes from the closed
    /// form alone.
    pub attained_by: Vec<String>,
    pub upper: Scalar,
    pub gap: Scalar,
    pub printed_value: String,
    pub printed_upper: String,
    pub printed_gap: String,
}

impl BoundRow {
    pub fn value_matches_printed(&self) -> Result<bool> {
        reference::matches_printed(&self.value, &self.printed_value)
    }

    pub fn gap_matches_printed(&self) -> Result<bool> {
        reference::matches_printed(&self.gap, &self.printed_gap)
    }
}

/// Rows of the per-dimension table. Dimensions covered by the catalog take
/// the best computed density; the others evaluate the stored closed form.
pub fn bound_table(catalog: &Catalog, refs: &ReferenceData, prec: u32) -> Result<Vec<BoundRow>> {
    use rayon::prelude::*;
    let geoms = catalog.iter().map(|d| d.evaluate(prec)).collect::<Result<Vec<_>>>()?;
    let densities =
        geoms.par_iter().map(|g| density::density_report(g).map(|r| r.density)).collect::<Result<Vec<_>>>()?;
    let tol = Scalar::epsilon(prec, prec as i32 / 2);
    let mut rows = Vec::new();
    for b in &refs.bounds {
        let mut best: Option<Scalar> = None;
        for (g, d) in geoms.iter().zip(&densities) {
            if g.dimension == b.n && best.as_ref().is_none_or(|x| d > x) {
                best = Some(d.clone());
            }
        }
        let (value, attained_by) = match best {
            Some(v) => {
                let who = geoms
                    .iter()
                    .zip(&densities)
                    .filter(|(g, d)| g.dimension == b.n && d.rel_diff(&v) <= tol)
                    .map(|(g, _)| g.witt_symbol.clone())
                    .collect();
                (v, who)
            }
            None => (b.evaluate(prec)?, Vec::new()),
        };
        let upper = b.upper_bound(prec)?;
        let gap = &upper - &value;
        rows.push(BoundRow {
            n: b.n,
            closed_form: b.closed_form.clone(),
            value,
            attained_by,
            upper,
            gap,
            printed_value: b.printed_value.clone(),
            printed_upper: b.upper.clone(),
            printed_gap: b.printed_gap.clone(),
        });
    }
    Ok(rows)
}
