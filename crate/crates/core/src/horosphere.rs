//! Horospheres centred at the standard cusp `A0 = (1, 0, ..., 0, 1)`.
//!
//! The horosphere of type `s` through the axis point `(1, 0, ..., 0, s)` is
//! the zero set of
//!
//! ```text
//! R_s(x) = (s - 1) <x, x> - (1 + s) (x0 - xn)^2
//! ```
//!
//! with `R_s > 0` inside the horoball. Larger `s` means a smaller ball.

use crate::error::{Error, Result};
use crate::lorentz::{self, LorentzMap, PointClass, ProjectivePoint};
use crate::scalar::Scalar;

pub fn horosphere_residual(s: &Scalar, x: &ProjectivePoint) -> Result<Scalar> {
    let q = lorentz::lorentz_dot(x, x)?;
    let c = x.coords();
    let t = (&c[0] - &c[x.dimension()]).square();
    Ok((s - 1) * q - (s + 1) * t)
}

/// The type parameter of the horosphere through `x`: `s = (Q + T) / (Q - T)`
/// with `Q = <x, x>`, `T = (x0 - xn)^2`.
pub fn horosphere_through(x: &ProjectivePoint) -> Result<Scalar> {
    let q = lorentz::lorentz_dot(x, x)?;
    let c = x.coords();
    let t = (&c[0] - &c[x.dimension()]).square();
    let den = &q - &t;
    let prec = den.precision();
    let scale = x.euclidean_norm_sq();
    if den.is_zero_within(&(Scalar::epsilon(prec, 32) * scale)) {
        return Err(Error::geometry("point lies on the tangent plane at the cusp"));
    }
    Ok((q + t) / den)
}

/// Verifies `a0` is a positive multiple of `(1, 0, ..., 0, 1)` and returns
/// that exact representative.
fn snap_standard_cusp(a0: &ProjectivePoint) -> Result<ProjectivePoint> {
    let n = a0.dimension();
    let prec = a0.precision();
    let a = a0.affine()?;
    let std = lorentz::standard_cusp(n, prec);
    let tol = Scalar::epsilon(prec, prec as i32 / 2);
    for (x, y) in a.coords().iter().zip(std.coords()) {
        if !(x - y).is_zero_within(&tol) {
            return Err(Error::geometry("cusp is not in standard position"));
        }
    }
    Ok(std)
}

/// Point where the horosphere of type `s` at the standard cusp `a0` meets the
/// segment from `a0` to `ai`.
///
/// Along `h(t) = t a0 + ai` the `t^2` and cross terms of `(x0 - xn)^2` vanish
/// because `a0` is null and `a0_0 = a0_n`, so the residual is affine in `t`
/// and has exactly one root; it must satisfy `t >= 0` to lie on the segment.
pub fn edge_intersection(a0: &ProjectivePoint, ai: &ProjectivePoint, s: &Scalar) -> Result<ProjectivePoint> {
    check_type(s)?;
    let a0 = snap_standard_cusp(a0)?;
    let ai = ai.affine()?;
    if lorentz::classify(&ai) == PointClass::Exterior {
        return Err(Error::geometry("edge endpoint outside the model"));
    }
    let n = ai.dimension();
    let c = &ai.coords()[0] - &ai.coords()[n];
    let prec = c.precision();
    if c.is_zero_within(&Scalar::epsilon(prec, 32)) {
        return Err(Error::geometry("edge endpoint coincides with the cusp"));
    }
    let q = lorentz::lorentz_dot(&ai, &ai)?;
    let num = (s - 1) * q - (s + 1) * c.square();
    let den = (s - 1) * c * 2;
    let mut t = num / den;
    if t.is_negative() {
        if !t.is_zero_within(&Scalar::epsilon(prec, 32)) {
            return Err(Error::geometry("horoball does not meet the edge"));
        }
        t = Scalar::zero(prec);
    }
    let coords = a0.coords().iter().zip(ai.coords()).map(|(p, q)| &t * p + q).collect();
    ProjectivePoint::new(coords)
}

/// Horospherical arc subtended by a chord of hyperbolic length `chord`.
pub fn horospherical_arc(chord: &Scalar) -> Result<Scalar> {
    if chord.is_negative() {
        return Err(Error::domain("chord length must be non-negative"));
    }
    Ok((chord / 2).sinh() * 2)
}

/// Volume of the horoball piece over a horospherical base of volume
/// `horosheet_volume` in dimension `n`.
pub fn piece_volume(horosheet_volume: &Scalar, n: usize) -> Result<Scalar> {
    if n < 2 {
        return Err(Error::domain("piece volume needs n >= 2"));
    }
    Ok(horosheet_volume / (n as i64 - 1))
}

/// Total volume `V0 cosh((n-1) x)` of two pieces where one ball grows by
/// `x` along the connecting edge and the other shrinks by the same amount.
pub fn paired_piece_volume(v0: &Scalar, n: usize, x: &Scalar) -> Result<Scalar> {
    if !v0.is_positive() {
        return Err(Error::domain("reference volume must be positive"));
    }
    Ok(v0 * (x * (n as i64 - 1)).cosh())
}

/// Piece volume after moving the horosphere from type `s_ref` to type `s`:
/// `V(s) = V(s_ref) exp(-(n-1) (artanh s - artanh s_ref))`.
pub fn rescaled_piece_volume(v_ref: &Scalar, n: usize, s_ref: &Scalar, s: &Scalar) -> Result<Scalar> {
    let shift = s.atanh()? - s_ref.atanh()?;
    Ok(v_ref * (-(shift * (n as i64 - 1))).exp())
}

fn check_type(s: &Scalar) -> Result<()> {
    if s.abs() >= Scalar::one(s.precision()) {
        return Err(Error::domain("horoball type parameter must lie in (-1, 1)"));
    }
    Ok(())
}

/// A horoball at one cusp of a simplex, described in that cusp's standard
/// frame.
#[derive(Clone, Debug)]
pub struct HoroballSpec {
    pub cusp_index: usize,
    pub s: Scalar,
    pub standardizer: LorentzMap,
}

impl HoroballSpec {
    pub fn new(cusp_index: usize, cusp: &ProjectivePoint, s: Scalar) -> Result<Self> {
        check_type(&s)?;
        let standardizer = lorentz::standardize(cusp)?;
        Ok(HoroballSpec { cusp_index, s, standardizer })
    }

    /// `artanh s`, the signed distance shift used by the volume law.
    pub fn shift(&self) -> Result<Scalar> {
        self.s.atanh()
    }

    pub fn residual(&self, x: &ProjectivePoint) -> Result<Scalar> {
        horosphere_residual(&self.s, &self.standardizer.apply(x)?)
    }

    pub fn standard_cusp(&self) -> ProjectivePoint {
        let m = &self.standardizer;
        lorentz::standard_cusp(m.dimension(), self.s.precision())
    }

    /// Where this horosphere meets the edge towards `other` (original
    /// coordinates).
    pub fn meet_edge(&self, other: &ProjectivePoint) -> Result<ProjectivePoint> {
        let local = self.standardizer.apply(other)?;
        let h = edge_intersection(&self.standard_cusp(), &local, &self.s)?;
        self.standardizer.inverse().apply(&h)
    }
}

/// Type parameter of the horoball at `other_cusp` that is tangent to `ball`.
///
/// Two horoballs at different cusps touch on the geodesic joining their
/// centres, which is the simplex edge between the two cusps.
pub fn tangency_parameter(ball: &HoroballSpec, other_cusp: &ProjectivePoint) -> Result<Scalar> {
    let touch = ball.meet_edge(other_cusp)?;
    let m = lorentz::standardize(other_cusp)?;
    horosphere_through(&m.apply(&touch)?)
}
