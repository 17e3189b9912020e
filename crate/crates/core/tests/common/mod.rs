//! Helpers and property bodies shared by the property and acceptance targets.
#![allow(dead_code)]

use horopack::catalog::SimplexGeometry;
use horopack::density;
use horopack::horosphere::{self, HoroballSpec};
use horopack::lorentz::{self, HyperplaneForm, LorentzMap, ProjectivePoint};
use horopack::scalar;
use horopack::{mc_oracle, Catalog, Scalar};
use proptest::prelude::*;

pub const P: u32 = 256;

pub fn sc(x: f64) -> Scalar {
    Scalar::from_f64(x, P)
}

pub fn close(a: &Scalar, b: &Scalar, slack_bits: i32) -> bool {
    let tol = Scalar::epsilon(a.precision().min(b.precision()), slack_bits);
    a.rel_diff(b) <= tol || (a - b).is_zero_within(&tol)
}

pub fn geometry(index: usize) -> SimplexGeometry {
    let c = Catalog::bundled();
    c.simplices()[index % c.len()].evaluate(P).unwrap()
}

/// Interior point `(1, p)` from a direction and a radius below one.
pub fn interior(dir: &[f64], r: f64) -> ProjectivePoint {
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
    let mut coords = vec![Scalar::one(P)];
    coords.extend(dir.iter().map(|x| sc(x / norm * r)));
    ProjectivePoint::new(coords).unwrap()
}

/// Ideal point `(1, w)` with `w` the exact unit vector along `dir`.
pub fn ideal(dir: &[f64]) -> ProjectivePoint {
    let v: Vec<Scalar> = dir.iter().map(|&x| sc(x)).collect();
    let norm = scalar::sum(&v.iter().map(Scalar::square).collect::<Vec<_>>(), P).sqrt().unwrap();
    let mut coords = vec![Scalar::one(P)];
    coords.extend(v.iter().map(|x| x / &norm));
    ProjectivePoint::new(coords).unwrap()
}

/// Boost with rapidity `phi` in the `(x0, x_axis)` plane followed by a
/// rotation by `theta` in the `(x1, x2)` plane.
pub fn boost_rotation(n: usize, axis: usize, phi: f64, theta: f64) -> LorentzMap {
    let mut m: Vec<Vec<Scalar>> =
        (0..=n).map(|i| (0..=n).map(|j| Scalar::from_int((i == j) as i64, P)).collect()).collect();
    let (c, s) = (sc(phi).cosh(), sc(phi).sinh());
    m[0][0] = c.clone();
    m[axis][axis] = c;
    m[0][axis] = s.clone();
    m[axis][0] = s;
    let boost = LorentzMap::from_matrix(m).unwrap();
    let mut r: Vec<Vec<Scalar>> =
        (0..=n).map(|i| (0..=n).map(|j| Scalar::from_int((i == j) as i64, P)).collect()).collect();
    let (c, s) = (sc(theta).cos(), sc(theta).sin());
    r[1][1] = c.clone();
    r[2][2] = c;
    r[1][2] = -&s;
    r[2][1] = s;
    let rot = LorentzMap::from_matrix(r).unwrap();
    let composed: Vec<Vec<Scalar>> = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    scalar::sum(&(0..=n).map(|k| &rot.matrix()[i][k] * &boost.matrix()[k][j]).collect::<Vec<_>>(), P)
                })
                .collect()
        })
        .collect();
    LorentzMap::from_matrix(composed).unwrap()
}

/// Moves a whole simplex by `m`: vertices by `m`, forms by `m^-1` on the right.
pub fn transform(g: &SimplexGeometry, m: &LorentzMap) -> SimplexGeometry {
    let inv = m.inverse();
    let n = g.dimension;
    let vertices = g.vertices.iter().map(|v| m.apply(v).unwrap()).collect();
    let forms = g
        .forms
        .iter()
        .map(|u| {
            let c = u.coeffs();
            let coeffs = (0..=n)
                .map(|j| scalar::sum(&(0..=n).map(|i| &c[i] * &inv.matrix()[i][j]).collect::<Vec<_>>(), P))
                .collect();
            HyperplaneForm::new(coeffs).unwrap()
        })
        .collect();
    SimplexGeometry { vertices, forms, ..g.clone() }
}

// ---- named properties ----

pub type IsometryInput = (usize, f64, f64, usize);

pub fn isometry_inputs() -> impl Strategy<Value = IsometryInput> {
    (0usize..14, -1.2f64..1.2, 0.0f64..6.3, 0usize..3)
}

/// Densities and weights survive moving the simplex by standardize, a boost
/// and a rotation.
pub fn density_isometry_invariance((index, phi, theta, cusp_pick): IsometryInput) -> Result<(), TestCaseError> {
    let g = geometry(index);
    let n = g.dimension;
    let base = density::density_report(&g).unwrap();
    let c = g.ideal_vertices[cusp_pick % g.ideal_vertices.len()];
    let moved = transform(&g, &lorentz::standardize(&g.vertices[c]).unwrap());
    let moved = transform(&moved, &boost_rotation(n, 1 + (index % n), phi, theta));
    let report = density::density_report(&moved).unwrap();
    prop_assert!(close(&base.density, &report.density, 64), "{} vs {}", base.density, report.density);
    for (a, b) in base.weights.iter().zip(&report.weights) {
        prop_assert!((a - b).is_zero_within(&Scalar::epsilon(P, 64)));
    }
    Ok(())
}

pub type PointsAndOrder = (Vec<Vec<f64>>, Vec<usize>);

pub fn points_and_orders() -> impl Strategy<Value = PointsAndOrder> {
    (
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 5),
        Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
    )
}

/// Cayley-Menger volume ignores vertex order and agrees with `|det| / 4!`.
pub fn cayley_menger_permutation_invariance((pts, perm): PointsAndOrder) -> Result<(), TestCaseError> {
    let points: Vec<Vec<Scalar>> = pts.iter().map(|p| p.iter().map(|&x| sc(x)).collect()).collect();
    let dist = |order: &[usize]| -> Vec<Vec<Scalar>> {
        order
            .iter()
            .map(|&i| {
                order
                    .iter()
                    .map(|&j| {
                        let d2 = scalar::sum(
                            &points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).square()).collect::<Vec<_>>(),
                            P,
                        );
                        d2.sqrt().unwrap()
                    })
                    .collect()
            })
            .collect()
    };
    let edges: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
    let mut chart = vec![vec![0.0; 4]];
    chart.extend(edges);
    let oracle = mc_oracle::euclidean_simplex_volume(&chart);
    prop_assume!(oracle.as_ref().is_ok_and(|v| *v > 1e-6));
    let v1 = density::cayley_menger_volume(&dist(&[0, 1, 2, 3, 4])).unwrap();
    let v2 = density::cayley_menger_volume(&dist(&perm)).unwrap();
    prop_assert!(close(&v1, &v2, 120));
    prop_assert!((v1.to_f64() - oracle.unwrap()).abs() <= 1e-9);
    Ok(())
}

pub type PairedInput = (f64, usize, f64);

pub fn paired_inputs() -> impl Strategy<Value = PairedInput> {
    (1e-12f64..1.0, 3usize..10, 0.01f64..2.0)
}

/// Second differences of the paired piece volume on a grid are non-negative.
pub fn paired_volume_convexity((v0, n, x_max): PairedInput) -> Result<(), TestCaseError> {
    let v0 = sc(v0);
    let steps = 32;
    let h = sc(x_max / steps as f64);
    let vals: Vec<Scalar> =
        (0..=steps).map(|k| horosphere::paired_piece_volume(&v0, n, &(&h * k as i64)).unwrap()).collect();
    for w in vals.windows(3) {
        prop_assert!(!(&w[0] - &(&w[1] * 2) + &w[2]).is_negative());
    }
    Ok(())
}

pub type RoundTripInput = (Vec<f64>, f64, f64);

pub fn round_trip_inputs() -> impl Strategy<Value = RoundTripInput> {
    (prop::collection::vec(-1.0f64..1.0, 6), 0.0f64..0.99, -0.95f64..0.95)
}

/// The horosphere through an edge intersection is the one that produced it.
pub fn horosphere_round_trip((dir, r, s): RoundTripInput) -> Result<(), TestCaseError> {
    let a0 = lorentz::standard_cusp(6, P);
    let ai = interior(&dir, r);
    let s = sc(s);
    // Only parameters whose horosphere crosses the segment qualify.
    prop_assume!(horosphere::horosphere_residual(&s, &ai).unwrap().is_negative());
    let h = horosphere::edge_intersection(&a0, &ai, &s).unwrap();
    prop_assert!(horosphere::horosphere_residual(&s, &h).unwrap().is_zero_within(&Scalar::epsilon(P, 24)));
    let back = horosphere::horosphere_through(&h).unwrap();
    prop_assert!((back - &s).is_zero_within(&Scalar::epsilon(P, 40)));
    Ok(())
}

pub type TangencyInput = (Vec<f64>, Vec<f64>, f64);

pub fn tangency_inputs() -> impl Strategy<Value = TangencyInput> {
    (prop::collection::vec(-1.0f64..1.0, 8), prop::collection::vec(-1.0f64..1.0, 8), -0.9f64..0.9)
}

/// Tangency from A to B and back returns the starting parameter.
pub fn tangency_involution((a, b, s): TangencyInput) -> Result<(), TestCaseError> {
    let va = ideal(&a);
    let vb = ideal(&b);
    let sep = lorentz::lorentz_dot(&va, &vb).unwrap();
    prop_assume!(sep.to_f64() < -0.05);
    let ball_a = HoroballSpec::new(0, &va, sc(s)).unwrap();
    let t = horosphere::tangency_parameter(&ball_a, &vb).unwrap();
    prop_assume!(t.abs().to_f64() < 0.999);
    let ball_b = HoroballSpec::new(1, &vb, t).unwrap();
    let back = horosphere::tangency_parameter(&ball_b, &va).unwrap();
    prop_assert!((back - sc(s)).is_zero_within(&Scalar::epsilon(P, 48)));
    Ok(())
}

/// The Q9bar transition families: convex on a fine grid, equal endpoints and
/// a strictly smaller midpoint.
pub fn transition_family_convexity() -> Result<(), TestCaseError> {
    let g = Catalog::bundled().get("Q9bar").unwrap().evaluate(P).unwrap();
    let report = density::density_report(&g).unwrap();
    prop_assert!(!report.transitions.is_empty());
    for t in &report.transitions {
        prop_assert!(t.is_convex_on_grid(64).unwrap());
        let (a, b) = t.endpoints().unwrap();
        prop_assert!(close(&a, &b, 64));
        let mid = t.density_at(&(&t.x_max / 2)).unwrap();
        prop_assert!(mid < a);
    }
    Ok(())
}
