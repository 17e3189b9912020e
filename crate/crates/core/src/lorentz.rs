//! Projective model primitives in Lorentzian `(1, n)` space.
//!
//! Points are homogeneous vectors `x = (x0, x1, ..., xn)`; the ball model is
//! the affine chart `x0 = 1`. Forms `u` act on points by the plain dot
//! product `x.u = sum x_i u_i`; their pole is the index-raised vector
//! `(-u0, u1, ..., un)`, so `x.u = <x, pole(u)>`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<Scalar>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::geometry("a point needs at least two homogeneous coordinates"));
        }
        if coords.iter().all(Scalar::is_zero) {
            return Err(Error::geometry("the zero vector is not a projective point"));
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn precision(&self) -> u32 {
        self.coords.iter().map(Scalar::precision).min().unwrap_or(crate::DEFAULT_PRECISION)
    }

    pub fn scaled(&self, factor: &Scalar) -> Result<Self> {
        ProjectivePoint::new(self.coords.iter().map(|c| c * factor).collect())
    }

    /// Representative with first coordinate 1.
    pub fn affine(&self) -> Result<Self> {
        if self.coords[0].is_zero() {
            return Err(Error::geometry("point at infinity of the affine chart"));
        }
        let inv = self.coords[0].recip()?;
        self.scaled(&inv)
    }

    /// Squared Euclidean norm of the coordinate vector.
    pub fn euclidean_norm_sq(&self) -> Scalar {
        let prec = self.precision();
        self.coords.iter().fold(Scalar::zero(prec), |acc, c| acc + c.square())
    }

    /// Spatial part `(x1, ..., xn) / x0` as `f64`, for the sampling oracle.
    pub fn chart_f64(&self) -> Result<Vec<f64>> {
        let a = self.affine()?;
        Ok(a.coords[1..].iter().map(Scalar::to_f64).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneForm {
    coeffs: Vec<Scalar>,
}

impl HyperplaneForm {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::geometry("a form needs at least two coefficients"));
        }
        if coeffs.iter().all(Scalar::is_zero) {
            return Err(Error::geometry("the zero form defines no hyperplane"));
        }
        Ok(HyperplaneForm { coeffs })
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn dimension(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `x.u`, the value of the form at a point.
    pub fn eval(&self, x: &ProjectivePoint) -> Result<Scalar> {
        check_dims(self.dimension(), x.dimension())?;
        let prec = x.precision().min(self.coeffs[0].precision());
        Ok(self.coeffs.iter().zip(&x.coords).fold(Scalar::zero(prec), |acc, (u, c)| acc + u * c))
    }

    /// `<u, u>` computed through the pole.
    pub fn self_product(&self) -> Scalar {
        let p = pole(self);
        lorentz_dot(&p, &p).expect("pole has matching dimension")
    }

    /// Divides by `sqrt(<u,u>)` and flips the sign so that `inside.u > 0`.
    pub fn normalized_towards(&self, inside: &ProjectivePoint) -> Result<Self> {
        let q = self.self_product();
        if !q.is_positive() {
            return Err(Error::geometry("facet form is not spacelike"));
        }
        let mut scale = q.sqrt()?.recip()?;
        let side = self.eval(inside)?;
        if side.is_zero() {
            return Err(Error::geometry("orientation point lies on the hyperplane"));
        }
        if side.is_negative() {
            scale = -scale;
        }
        HyperplaneForm::new(self.coeffs.iter().map(|c| c * &scale).collect())
    }

    /// Same hyperplane with one coefficient changed, for sensitivity tests.
    pub fn with_coeff(&self, index: usize, value: Scalar) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        coeffs[index] = value;
        HyperplaneForm::new(coeffs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Ideal,
    Exterior,
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `-x0 y0 + x1 y1 + ... + xn yn`.
pub fn lorentz_dot(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<Scalar> {
    check_dims(x.dimension(), y.dimension())?;
    Ok(dot_slices(&x.coords, &y.coords))
}

fn dot_slices(x: &[Scalar], y: &[Scalar]) -> Scalar {
    let mut acc = -(&x[0] * &y[0]);
    for (a, b) in x[1..].iter().zip(&y[1..]) {
        acc = acc + a * b;
    }
    acc
}

/// Default classification tolerance `2^(-p/2)`.
pub fn default_tolerance(prec: u32) -> Scalar {
    Scalar::pow2(-(prec as i32) / 2, prec)
}

pub fn classify(x: &ProjectivePoint) -> PointClass {
    classify_with(x, &default_tolerance(x.precision()))
}

/// Scale-invariant classification: `<x,x>` is compared with `tol * |x|^2`.
pub fn classify_with(x: &ProjectivePoint, tol: &Scalar) -> PointClass {
    let q = lorentz_dot(x, x).expect("same point");
    let slack = tol * &x.euclidean_norm_sq();
    if q.abs() <= slack {
        PointClass::Ideal
    } else if q.is_negative() {
        PointClass::Interior
    } else {
        PointClass::Exterior
    }
}

/// `cosh d = -<x,y> / sqrt(<x,x><y,y>)` between proper points.
pub fn distance(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<Scalar> {
    let c = cosh_distance(x, y)?;
    let prec = c.precision();
    let tol = default_tolerance(prec);
    let one = Scalar::one(prec);
    if c < &one - &tol {
        return Err(Error::geometry("cosh of distance below 1"));
    }
    if c <= one {
        return Ok(Scalar::zero(prec));
    }
    c.acosh()
}

fn cosh_distance(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<Scalar> {
    for p in [x, y] {
        if classify(p) != PointClass::Interior {
            return Err(Error::geometry("distance needs two proper (interior) points"));
        }
    }
    let xy = lorentz_dot(x, y)?;
    let xx = lorentz_dot(x, x)?;
    let yy = lorentz_dot(y, y)?;
    // Representatives may lie on opposite sheets; only |<x,y>| is projective.
    Ok(xy.abs() / (xx * yy).sqrt()?)
}

/// `2 sinh(d/2)` computed as the Minkowski length of the difference of the
/// hyperboloid representatives, which avoids the cancellation in `cosh d - 1`.
pub fn half_chord(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<Scalar> {
    let hx = hyperboloid_rep(x)?;
    let hy = hyperboloid_rep(y)?;
    let diff: Vec<Scalar> = hx.iter().zip(&hy).map(|(a, b)| a - b).collect();
    let q = dot_slices(&diff, &diff);
    if q.is_negative() {
        return Ok(Scalar::zero(q.precision()));
    }
    q.sqrt()
}

fn hyperboloid_rep(x: &ProjectivePoint) -> Result<Vec<Scalar>> {
    if classify(x) != PointClass::Interior {
        return Err(Error::geometry("distance needs two proper (interior) points"));
    }
    let q = lorentz_dot(x, x)?;
    let mut scale = (-q).sqrt()?.recip()?;
    if x.coords[0].is_negative() {
        scale = -scale;
    }
    Ok(x.coords.iter().map(|c| c * &scale).collect())
}

/// `(-u0, u1, ..., un)`.
pub fn pole(u: &HyperplaneForm) -> ProjectivePoint {
    let mut coords = u.coeffs.clone();
    coords[0] = -&coords[0];
    ProjectivePoint { coords }
}

/// Foot of the perpendicular from `x` to the hyperplane of `u`:
/// `y = x - (x.u / <u,u>) pole(u)`.
pub fn perpendicular_foot(x: &ProjectivePoint, u: &HyperplaneForm) -> Result<ProjectivePoint> {
    let uu = u.self_product();
    let prec = uu.precision();
    if uu.is_zero_within(&Scalar::epsilon(prec, 16)) {
        return Err(Error::geometry("form has zero Lorentzian norm"));
    }
    let t = u.eval(x)? / uu;
    let p = pole(u);
    let coords: Vec<Scalar> = x.coords.iter().zip(&p.coords).map(|(a, b)| a - &(&t * b)).collect();
    ProjectivePoint::new(coords).map_err(|_| Error::geometry("perpendicular foot degenerates (x is the pole of u)"))
}

/// The ideal point `(1, 0, ..., 0, 1)` every cusp is moved to.
pub fn standard_cusp(n: usize, prec: u32) -> ProjectivePoint {
    let mut coords = vec![Scalar::zero(prec); n + 1];
    coords[0] = Scalar::one(prec);
    coords[n] = Scalar::one(prec);
    ProjectivePoint { coords }
}

/// A linear map of `R^(n+1)` preserving the Lorentzian form.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMap {
    matrix: Vec<Vec<Scalar>>,
}

impl LorentzMap {
    pub fn identity(n: usize, prec: u32) -> Self {
        let matrix = (0..=n)
            .map(|i| (0..=n).map(|j| if i == j { Scalar::one(prec) } else { Scalar::zero(prec) }).collect())
            .collect();
        LorentzMap { matrix }
    }

    /// Wraps a matrix without checking the Lorentz property; see
    /// [`LorentzMap::is_lorentz`].
    pub fn from_matrix(matrix: Vec<Vec<Scalar>>) -> Result<Self> {
        let m = matrix.len();
        if m < 2 || matrix.iter().any(|row| row.len() != m) {
            return Err(Error::geometry("Lorentz map needs a square matrix"));
        }
        Ok(LorentzMap { matrix })
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len() - 1
    }

    pub fn apply(&self, x: &ProjectivePoint) -> Result<ProjectivePoint> {
        check_dims(self.dimension(), x.dimension())?;
        let prec = x.precision();
        let coords = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&x.coords).fold(Scalar::zero(prec), |acc, (m, c)| acc + m * c))
            .collect();
        ProjectivePoint::new(coords)
    }

    /// `J M^T J` with `J = diag(-1, 1, ..., 1)`.
    pub fn inverse(&self) -> Self {
        let m = self.matrix.len();
        let matrix = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let v = self.matrix[j][i].clone();
                        if (i == 0) != (j == 0) {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        LorentzMap { matrix }
    }

    /// Checks `M^T J M = J` entrywise within `tol`.
    pub fn is_lorentz(&self, tol: &Scalar) -> bool {
        let m = self.matrix.len();
        for i in 0..m {
            for j in 0..m {
                let col_i: Vec<Scalar> = (0..m).map(|k| self.matrix[k][i].clone()).collect();
                let col_j: Vec<Scalar> = (0..m).map(|k| self.matrix[k][j].clone()).collect();
                let g = dot_slices(&col_i, &col_j);
                let target = match (i == j, i == 0) {
                    (true, true) => -1,
                    (true, false) => 1,
                    _ => 0,
                };
                if !(g - target).is_zero_within(tol) {
                    return false;
                }
            }
        }
        true
    }
}

/// Lorentz map fixing the model centre and sending the ideal point `v` to a
/// multiple of `(1, 0, ..., 0, 1)`.
///
/// Built from the Householder reflection of the spatial block that maps the
/// unit direction of `v` to the last axis.
pub fn standardize(v: &ProjectivePoint) -> Result<LorentzMap> {
    if classify(v) != PointClass::Ideal {
        return Err(Error::geometry("standardize needs an ideal point"));
    }
    if v.coords[0].is_zero() {
        return Err(Error::geometry("ideal point with zero time coordinate"));
    }
    let n = v.dimension();
    let prec = v.precision();
    let sign = if v.coords[0].is_negative() { -1 } else { 1 };
    let spatial: Vec<Scalar> = v.coords[1..].iter().map(|c| c * sign).collect();
    let norm = spatial.iter().fold(Scalar::zero(prec), |acc, c| acc + c.square()).sqrt()?;
    let mut h: Vec<Scalar> = spatial.iter().map(|c| c / &norm).collect();
    h[n - 1] = &h[n - 1] - 1;
    let hh = h.iter().fold(Scalar::zero(prec), |acc, c| acc + c.square());

    let mut map = LorentzMap::identity(n, prec);
    if hh.is_zero_within(&Scalar::epsilon(2 * prec, 16)) {
        return Ok(map);
    }
    let factor = Scalar::from_int(2, prec) / hh;
    for i in 0..n {
        for j in 0..n {
            let r = &(&factor * &h[i]) * &h[j];
            map.matrix[i + 1][j + 1] = &map.matrix[i + 1][j + 1] - &r;
        }
    }
    Ok(map)
}
