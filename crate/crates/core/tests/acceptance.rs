//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use horopack::catalog::SimplexGeometry;
use horopack::density::{self, DensityReport};
use horopack::reference::{self, ReferenceData};
use horopack::verify::{self, Suite, Tolerances};
use horopack::{mc_oracle, scalar, Catalog, ExactExpr, Scalar};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

const P: u32 = 256;

type Criterion = fn(&Fixture) -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ten(k: i32) -> Scalar {
    Scalar::from_int(10, P).powi(-k)
}

fn int(v: i64) -> Scalar {
    Scalar::from_int(v, P)
}

fn sqrt(v: i64) -> Scalar {
    int(v).sqrt().unwrap()
}

fn expr(text: &str) -> Scalar {
    text.parse::<ExactExpr>().unwrap().eval(P).unwrap()
}

struct Fixture {
    catalog: Catalog,
    refs: ReferenceData,
    geoms: Vec<SimplexGeometry>,
    reports: Vec<DensityReport>,
    report_time: Duration,
}

impl Fixture {
    fn load() -> Self {
        let catalog = Catalog::bundled();
        let refs = ReferenceData::bundled();
        let start = Instant::now();
        let geoms: Vec<SimplexGeometry> = catalog.iter().map(|d| d.evaluate(P).unwrap()).collect();
        let reports = geoms.iter().map(|g| density::density_report(g).unwrap()).collect();
        let report_time = start.elapsed();
        Fixture { catalog, refs, geoms, reports, report_time }
    }

    fn geometry(&self, witt: &str) -> &SimplexGeometry {
        self.geoms.iter().find(|g| g.witt_symbol == witt).unwrap()
    }

    fn report(&self, witt: &str) -> &DensityReport {
        self.reports.iter().find(|r| r.witt_symbol == witt).unwrap()
    }
}

/// Closed forms built from the special functions directly, independent of
/// the expression parser and the bundled reference file.
fn closed_form(witt: &str) -> Scalar {
    let pi = Scalar::pi(P);
    let pi3 = pi.powi(3);
    let pi4 = pi.powi(4);
    let zeta5 = scalar::zeta(5, P).unwrap();
    match witt {
        "S6bar" | "Q6bar" => int(81) / (int(4) * sqrt(2) * pi3),
        "P6bar" => int(189) * sqrt(3) / (int(26) * pi3),
        "T7bar" => int(28) / (int(81) * scalar::dirichlet_l(4, 3, P).unwrap()),
        "S7bar" | "Q7bar" => int(21) / (int(64) * scalar::dirichlet_beta(4, P).unwrap()),
        "P7bar" => int(96) / (int(343) * scalar::dirichlet_l(4, 7, P).unwrap()),
        "T8bar" | "P8bar" => int(225) / (int(8) * pi4),
        "S8bar" | "Q8bar" => int(2025) / (int(68) * sqrt(2) * pi4),
        "T9bar" | "Q9bar" => (int(4) * zeta5).recip().unwrap(),
        "S9bar" => int(151) / (int(1054) * zeta5),
        other => panic!("no closed form for {other}"),
    }
}

fn density_replication(f: &Fixture) -> Outcome {
    let tol = ten(25);
    let mut worst = Scalar::zero(P);
    let mut bad = Vec::new();
    for r in &f.reports {
        let rel = r.density.rel_diff(&closed_form(&r.witt_symbol));
        if rel > tol {
            bad.push(r.witt_symbol.clone());
        }
        worst = worst.max(rel);
    }
    let fast = f.report_time < Duration::from_secs(10);
    Outcome {
        pass: bad.is_empty() && f.reports.len() == 14 && fast,
        detail: format!(
            "{}/14 within 1e-25 (max rel {}), {:.2} s{}",
            14 - bad.len(),
            worst.to_digits(2),
            f.report_time.as_secs_f64(),
            if bad.is_empty() { String::new() } else { format!("; off: {}", bad.join(", ")) }
        ),
    }
}

const PRINTED_PIECES: [&str; 14] = [
    "1/(38400*sqrt(2))",
    "1/(19200*sqrt(2))",
    "1/(4800*sqrt(3))",
    "1/1105920",
    "1/552960",
    "1/(829440*sqrt(3))",
    "1/(34560*sqrt(7))",
    "1/(18063360*sqrt(2))",
    "1/(9031680*sqrt(2))",
    "1/162570240",
    "1/1128960",
    "1/89181388800",
    "1/5573836800",
    "1/348364800",
];

fn piece_replication(f: &Fixture) -> Outcome {
    let tol = ten(25);
    let mut bad = Vec::new();
    let mut checked = 0;
    for printed in PRINTED_PIECES {
        let value = expr(printed);
        let mut found = false;
        for r in &f.refs.simplices {
            for p in &r.pieces {
                if p.volume.eval(P).unwrap().rel_diff(&value) > ten(60) {
                    continue;
                }
                found = true;
                checked += 1;
                let g = f.geometry(&r.witt_symbol);
                let computed = density::cusp_piece_volume(g, p.cusp, &p.s.eval(P).unwrap()).unwrap();
                if computed.rel_diff(&value) > tol {
                    bad.push(format!("{} A{}", r.witt_symbol, p.cusp));
                }
            }
        }
        if !found {
            bad.push(format!("{printed} unmatched"));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{} printed volumes, {checked} pieces within 1e-25{}", PRINTED_PIECES.len(), failures(&bad)),
    }
}

fn failures(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", bad.join(", "))
    }
}

fn suite_failures(s: &Suite) -> Vec<String> {
    s.failures().map(|c| format!("{} {}", c.subject, c.item)).collect()
}

fn intersection_replication(f: &Fixture) -> Outcome {
    let suite = verify::intersection_suite(&f.geoms, &f.refs, &Tolerances::decimal(P, 30, 25));
    // Rows that coincide with a simplex vertex are the trivial ones.
    let mut nontrivial = 0;
    for r in &f.refs.simplices {
        let g = f.geometry(&r.witt_symbol);
        let verts: Vec<Vec<Scalar>> = g.vertices.iter().map(|v| v.affine().unwrap().coords().to_vec()).collect();
        for row in &r.intersections {
            let vals: Vec<Scalar> = row.iter().map(|e| e.eval(P).unwrap()).collect();
            let affine: Vec<Scalar> = vals.iter().map(|x| x / &vals[0]).collect();
            let is_vertex = verts.iter().any(|v| v.iter().zip(&affine).all(|(a, b)| (a - b).is_zero_within(&ten(40))));
            nontrivial += usize::from(!is_vertex);
        }
    }
    let bad = suite_failures(&suite);
    Outcome {
        pass: suite.passed() && !suite.checks.is_empty(),
        detail: format!("{} rows ({nontrivial} nontrivial) within 1e-25{}", suite.checks.len(), failures(&bad)),
    }
}

fn maximal_parameters(f: &Fixture) -> Outcome {
    let tol = ten(25);
    let mut bad = Vec::new();
    let mut check = |witt: &str, cusp: usize, expected: Scalar| {
        let s = density::max_horoball_parameter(f.geometry(witt), cusp).unwrap();
        if !(s - &expected).is_zero_within(&tol) {
            bad.push(format!("{witt} s{cusp}"));
        }
    };
    for g in &f.geoms {
        check(&g.witt_symbol, 0, Scalar::zero(P));
    }
    check("P8bar", 5, Scalar::from_ratio(3, 5, P));
    check("S9bar", 8, Scalar::from_ratio(7, 9, P));
    check("Q9bar", 7, Scalar::from_ratio(3, 5, P));
    Outcome {
        pass: bad.is_empty(),
        detail: format!("s0 = 0 for 14 simplices, P8bar/S9bar/Q9bar extra cusps{}", failures(&bad)),
    }
}

fn sorted(mut v: Vec<Scalar>) -> Vec<Scalar> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn multi_cusp_structure(f: &Fixture) -> Outcome {
    let tol = ten(25);
    let mut bad = Vec::new();
    let weights: [(&str, &[(i64, i64)]); 3] = [
        ("P8bar", &[(9, 17), (8, 17)]),
        ("S9bar", &[(135, 151), (16, 151)]),
        ("Q9bar", &[(256, 527), (270, 527), (1, 527)]),
    ];
    for (witt, expected) in weights {
        let expected = sorted(expected.iter().map(|&(a, b)| Scalar::from_ratio(a, b, P)).collect());
        let actual = sorted(f.report(witt).weights.clone());
        let ok =
            expected.len() == actual.len() && expected.iter().zip(&actual).all(|(e, a)| (e - a).is_zero_within(&tol));
        if !ok {
            bad.push(format!("{witt} weights"));
        }
    }
    let target = (int(4) * scalar::zeta(5, P).unwrap()).recip().unwrap();
    let q9 = f.report("Q9bar");
    if q9.transitions.is_empty() {
        bad.push("Q9bar has no transition family".into());
    }
    for t in &q9.transitions {
        let (a, b) = t.endpoints().unwrap();
        let mid = t.density_at(&(&t.x_max / 2)).unwrap();
        if a.rel_diff(&target) > tol || b.rel_diff(&target) > tol {
            bad.push(format!("Q9bar A{}/A{} endpoints", t.shrinking, t.growing));
        }
        if !(mid < a && mid < b) {
            bad.push(format!("Q9bar A{}/A{} midpoint", t.shrinking, t.growing));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("3 weight sets, {} Q9bar transition families{}", q9.transitions.len(), failures(&bad)),
    }
}

fn printed_decimals(f: &Fixture) -> Outcome {
    let zeta = |k| scalar::zeta(k, P).unwrap();
    let pi = Scalar::pi(P);
    let cases: Vec<(&str, Scalar, Option<&str>)> = vec![
        ("0.85328", scalar::d3_infinity_series(P), None),
        ("0.59421", int(5) / (int(7) * zeta(3)), None),
        ("0.71644", int(5) * sqrt(2) / pi.square(), None),
        ("0.36773", closed_form("T7bar"), Some("T7bar")),
        ("0.331793", closed_form("S7bar"), Some("S7bar")),
        ("0.26605", closed_form("P7bar"), Some("P7bar")),
        ("0.28873", closed_form("T8bar"), Some("T8bar")),
        ("0.21617", closed_form("S8bar"), Some("S8bar")),
        ("0.24109", closed_form("T9bar"), Some("T9bar")),
        ("0.13816", closed_form("S9bar"), Some("S9bar")),
    ];
    let mut bad = Vec::new();
    for (printed, value, witt) in &cases {
        let mut ok = reference::matches_printed(value, printed).unwrap();
        if let Some(w) = witt {
            ok &= reference::matches_printed(&f.report(w).density, printed).unwrap();
        }
        if !ok {
            bad.push(format!("{printed} (got {})", value.to_digits(8)));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{}/{} decimals within one unit of the last printed digit{}",
            cases.len() - bad.len(),
            cases.len(),
            failures(&bad)
        ),
    }
}

fn gram_and_incidence(f: &Fixture) -> Outcome {
    let tol = Tolerances::decimal(P, 30, 25);
    let gram = verify::gram_suite(&f.geoms, &tol);
    let incidence = verify::incidence_suite(&f.geoms, &tol);
    let mut bad = suite_failures(&gram);
    bad.extend(suite_failures(&incidence));
    Outcome {
        pass: bad.is_empty() && gram.checks.len() == 14 && incidence.checks.len() == 14,
        detail: format!(
            "gram {}/14, incidence {}/14 at 1e-30{}",
            gram.checks.iter().filter(|c| c.pass).count(),
            incidence.checks.iter().filter(|c| c.pass).count(),
            failures(&bad)
        ),
    }
}

fn commensurability(f: &Fixture) -> Outcome {
    let tol = Tolerances::decimal(P, 30, 25);
    let corrected = verify::commensurability_suite(&f.catalog, P, &tol);
    let printed = verify::commensurability_suite(&f.catalog.with_printed_volumes(), P, &tol);
    let broken = suite_failures(&printed);
    Outcome {
        pass: corrected.passed() && corrected.checks.len() == 6 && !printed.passed(),
        detail: format!(
            "corrected volumes {}/6; printed volumes break: {}",
            corrected.checks.iter().filter(|c| c.pass).count(),
            if broken.is_empty() { "nothing".to_string() } else { broken.join(", ") }
        ),
    }
}

fn monte_carlo(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for witt in ["S6bar", "T9bar"] {
        let g = f.geometry(witt);
        let start = Instant::now();
        let est = mc_oracle::estimate_volume(g, 1_000_000, 42).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let z = est.z_score(g.volume.to_f64());
        pass &= z.abs() < 3.0 && secs < 60.0;
        parts.push(format!("{witt} z = {z:.2} in {secs:.1} s"));
    }
    Outcome { pass, detail: format!("1e6 samples, seed 42: {}", parts.join(", ")) }
}

fn run_property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<String, String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    match runner.run(&strategy, test) {
        Ok(()) => Ok(format!("{name} {cases}")),
        Err(e) => Err(format!("{name}: {e}")),
    }
}

fn property_suites(_: &Fixture) -> Outcome {
    let results = [
        run_property("isometry", 48, common::isometry_inputs(), common::density_isometry_invariance),
        run_property("cayley-menger", 256, common::points_and_orders(), common::cayley_menger_permutation_invariance),
        run_property("convexity", 256, common::paired_inputs(), common::paired_volume_convexity),
        common::transition_family_convexity()
            .map(|_| "transition 1".to_string())
            .map_err(|e| format!("transition: {e}")),
        run_property("round-trip", 256, common::round_trip_inputs(), common::horosphere_round_trip),
        run_property("tangency", 256, common::tangency_inputs(), common::tangency_involution),
    ];
    let bad: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    let ok: Vec<String> = results.iter().filter_map(|r| r.clone().ok()).collect();
    Outcome { pass: bad.is_empty(), detail: format!("cases: {}{}", ok.join(", "), failures(&bad)) }
}

fn main() -> ExitCode {
    let fixture = Fixture::load();
    let criteria: [(&str, Criterion); 10] = [
        ("density replication", density_replication),
        ("piece volumes", piece_replication),
        ("edge intersections", intersection_replication),
        ("maximal parameters", maximal_parameters),
        ("multi-cusp structure", multi_cusp_structure),
        ("printed decimals", printed_decimals),
        ("gram and incidence", gram_and_incidence),
        ("commensurability", commensurability),
        ("monte carlo volumes", monte_carlo),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = run(&fixture);
        let state = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{state} {:>2} {name}: {}", k + 1, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
