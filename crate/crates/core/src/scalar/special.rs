//! Riemann and Hurwitz zeta values at integer arguments, and the periodic
//! Dirichlet series built from them.
//!
//! Every series here is a finite combination of Hurwitz zeta values
//! `zeta(s, a)` with rational `0 < a <= 1`:
//!
//! * `zeta(k) = zeta(k, 1)`
//! * `L(s, d) = d^-s * sum_{a=1}^{d-1} (a/d) * zeta(s, a/d)`
//! * `beta(s) = 4^-s * (zeta(s, 1/4) - zeta(s, 3/4))`
//! * the d3 series `= 6^-2 * sum_a c(a) * zeta(2, a/6)` with `c = (+,+,0,-,-)`
//!
//! Hurwitz zeta is computed by Euler-Maclaurin summation. With `N` direct
//! terms and `x = N + a`, the correction terms are
//! `T_j = B_2j / (2j)! * s(s+1)...(s+2j-2) * x^(1-s-2j)`. The function
//! `t -> t^-s` is completely monotone, so the remainder after summing
//! `T_1..T_{j-1}` is bounded by `|T_j|`. Summation stops at the first
//! `|T_j| < 2^-wp`; that bound is a-priori, not a convergence guess.

use super::Scalar;
use crate::error::{Error, Result};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

const INTERNAL_GUARD: u32 = 16;

/// Riemann zeta at an integer `k >= 2`.
pub fn zeta(k: u32, prec: u32) -> Result<Scalar> {
    if k < 2 {
        return Err(Error::domain(format!("zeta({k}) requires k >= 2")));
    }
    hurwitz_zeta(k, 1, 1, prec)
}

/// Hurwitz zeta `sum_{n>=0} (n + a)^-s` for integer `s >= 2` and rational
/// `a = num/den` in `(0, 1]`.
pub fn hurwitz_zeta(s: u32, num: u64, den: u64, prec: u32) -> Result<Scalar> {
    if s < 2 {
        return Err(Error::domain(format!("Hurwitz zeta requires s >= 2, got {s}")));
    }
    if num == 0 || den == 0 || num > den {
        return Err(Error::domain(format!("Hurwitz parameter {num}/{den} outside (0, 1]")));
    }
    let wp = prec + INTERNAL_GUARD;
    let n_direct = u64::from(wp / 4 + 8);
    let neg_s = -(s as i32);

    let mut acc = Float::new(wp);
    for k in 0..n_direct {
        let t = Float::with_val(wp, k * den + num) / den;
        acc += t.pow(neg_s);
    }

    let x = Float::with_val(wp, n_direct * den + num) / den;
    let x_pow = Float::with_val(wp, (&x).pow(neg_s));
    acc += Float::with_val(wp, &x_pow * &x) / (s - 1);
    acc += Float::with_val(wp, &x_pow / 2u32);

    let eps = Float::with_val(wp, 1) >> wp;
    let x_sq = Float::with_val(wp, x.square_ref());
    let mut rising = Float::with_val(wp, &x_pow / &x) * s;
    let mut bern = BernoulliTable::new();
    let max_terms = (wp as usize) * 2 + 32;
    for j in 1..=max_terms {
        let term = Float::with_val(wp, &rising * bern.scaled_even(j));
        if term.clone().abs() < eps {
            return Ok(Scalar::from_float(Float::with_val(prec, acc)));
        }
        acc += &term;
        let a = rising_step(s, j);
        rising *= a;
        rising /= &x_sq;
    }
    Err(Error::Evaluation("Euler-Maclaurin tail did not reach target precision".into()))
}

/// `(s + 2j - 1) * (s + 2j)` as an exact integer.
fn rising_step(s: u32, j: usize) -> Integer {
    let a = Integer::from(s) + Integer::from(2 * j) - 1u32;
    let b = Integer::from(s) + Integer::from(2 * j);
    a * b
}

/// Incrementally generated `B_m / m!` using
/// `sum_{k=0}^{m} b_k / (m + 1 - k)! = 0` for `m >= 1`.
struct BernoulliTable {
    scaled: Vec<Rational>,
    inv_fact: Vec<Rational>,
}

impl BernoulliTable {
    fn new() -> Self {
        BernoulliTable { scaled: vec![Rational::from(1)], inv_fact: vec![Rational::from(1), Rational::from(1)] }
    }

    fn inv_factorial(&mut self, m: usize) -> &Rational {
        while self.inv_fact.len() <= m {
            let k = self.inv_fact.len();
            let next = Rational::from(&self.inv_fact[k - 1] / Integer::from(k));
            self.inv_fact.push(next);
        }
        &self.inv_fact[m]
    }

    /// `B_{2j} / (2j)!`.
    fn scaled_even(&mut self, j: usize) -> &Rational {
        let target = 2 * j;
        while self.scaled.len() <= target {
            let m = self.scaled.len();
            let mut sum = Rational::new();
            for k in 0..m {
                if self.scaled[k].cmp0().is_eq() {
                    continue;
                }
                let f = self.inv_factorial(m + 1 - k).clone();
                sum += f * &self.scaled[k];
            }
            self.scaled.push(-sum);
        }
        &self.scaled[target]
    }
}

pub fn is_odd_prime(d: u64) -> bool {
    if d < 3 || d.is_multiple_of(2) {
        return false;
    }
    let mut q = 3;
    while q * q <= d {
        if d.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

/// Legendre symbol `(n/d)` for an odd prime `d`, by Euler's criterion.
pub fn legendre_symbol(n: i64, d: u64) -> Result<i8> {
    if !is_odd_prime(d) {
        return Err(Error::domain(format!("{d} is not an odd prime")));
    }
    let r = n.rem_euclid(d as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    let mut base = u128::from(r);
    let mut exp = (d - 1) / 2;
    let m = u128::from(d);
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    Ok(if acc == 1 { 1 } else { -1 })
}

/// Dirichlet L-series `sum_{n>=1} (n/d) n^-s` for the Legendre character
/// modulo an odd prime `d`.
pub fn dirichlet_l(s: u32, d: u64, prec: u32) -> Result<Scalar> {
    if s < 2 {
        return Err(Error::domain(format!("L(s, d) requires s >= 2, got {s}")));
    }
    if !is_odd_prime(d) {
        return Err(Error::domain(format!("L(s, d) requires an odd prime modulus, got {d}")));
    }
    let coeffs: Vec<i8> = (1..d).map(|a| legendre_symbol(a as i64, d)).collect::<Result<_>>()?;
    periodic_series(s, d, &coeffs, prec)
}

/// Dirichlet beta `sum_{n>=0} (-1)^n (2n+1)^-s`.
pub fn dirichlet_beta(s: u32, prec: u32) -> Result<Scalar> {
    if s < 2 {
        return Err(Error::domain(format!("beta(s) requires s >= 2, got {s}")));
    }
    periodic_series(s, 4, &[1, 0, -1], prec)
}

/// Inner series `1 + 1/2^2 - 1/4^2 - 1/5^2 + 1/7^2 + ...` of period six.
pub fn d3_inner_series(prec: u32) -> Scalar {
    periodic_series(2, 6, &[1, 1, 0, -1, -1], prec).expect("fixed arguments are in the domain")
}

/// Reciprocal of [`d3_inner_series`], the simplicial density of the regular
/// ideal tetrahedron packing.
pub fn d3_infinity_series(prec: u32) -> Scalar {
    let wp = prec + INTERNAL_GUARD;
    let inner = d3_inner_series(wp);
    Scalar::from_float(Float::with_val(prec, inner.into_float().recip()))
}

/// `sum_{n>=1} c(n mod d) n^-s` where `coeffs[a-1] = c(a)` for `a = 1..d-1`
/// and `c(0) = 0`.
fn periodic_series(s: u32, d: u64, coeffs: &[i8], prec: u32) -> Result<Scalar> {
    let wp = prec + INTERNAL_GUARD;
    let mut acc = Float::new(wp);
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let z = hurwitz_zeta(s, i as u64 + 1, d, wp)?.into_float();
        if c > 0 {
            acc += z;
        } else {
            acc -= z;
        }
    }
    let scale = Float::with_val(wp, d).pow(-(s as i32));
    Ok(Scalar::from_float(Float::with_val(prec, acc * scale)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(v: &Scalar, expected: &str, digits: usize) {
        let s = v.to_digits(digits);
        assert_eq!(s, expected);
    }

    #[test]
    fn zeta_small_values() {
        close(&zeta(3, 128).unwrap(), "1.2020569031595942854", 20);
        close(&zeta(5, 128).unwrap(), "1.0369277551433699263", 20);
        let z2 = zeta(2, 256).unwrap();
        let pi = Scalar::pi(256);
        let expected = &(&pi * &pi) / 6;
        assert!(z2.rel_diff(&expected) < Scalar::epsilon(256, 8));
    }

    #[test]
    fn zeta_rejects_small_k() {
        assert!(zeta(1, 64).is_err());
        assert!(zeta(0, 64).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(1, 3).unwrap(), 1);
        assert_eq!(legendre_symbol(2, 3).unwrap(), -1);
        assert_eq!(legendre_symbol(2, 7).unwrap(), 1);
        assert_eq!(legendre_symbol(3, 3).unwrap(), 0);
        assert_eq!(legendre_symbol(-1, 7).unwrap(), -1);
        assert!(legendre_symbol(1, 9).is_err());
        assert!(legendre_symbol(1, 2).is_err());
    }

    #[test]
    fn l_series_values() {
        close(&dirichlet_l(4, 3, 128).unwrap(), "0.94002568", 8);
        close(&dirichlet_l(4, 7, 128).unwrap(), "1.0519941", 8);
        close(&dirichlet_beta(4, 128).unwrap(), "0.98894455", 8);
        close(&dirichlet_beta(2, 128).unwrap(), "0.91596559417721901505", 20);
    }

    #[test]
    fn d3_series() {
        close(&d3_inner_series(128), "1.1719536", 8);
        close(&d3_infinity_series(128), "0.85327609", 8);
    }

    #[test]
    fn bernoulli_table() {
        let mut t = BernoulliTable::new();
        // B_2 / 2! = 1/12, B_4 / 4! = -1/720, B_6 / 6! = 1/30240
        assert_eq!(*t.scaled_even(1), Rational::from((1, 12)));
        assert_eq!(*t.scaled_even(2), Rational::from((-1, 720)));
        assert_eq!(*t.scaled_even(3), Rational::from((1, 30240)));
    }

    #[test]
    fn high_precision_is_reachable() {
        let a = zeta(3, 1024).unwrap();
        let b = zeta(3, 2048).unwrap();
        assert!(a.rel_diff(&b.with_precision(1024)) < Scalar::epsilon(1024, 4));
    }
}
