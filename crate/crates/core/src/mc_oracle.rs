//! Monte Carlo check of simplex volumes, independent of the closed forms.
//!
//! The hyperbolic volume splits into the horoball pieces removed at the
//! cusps (computed analytically) and the compact remainder, which is
//! integrated by uniform sampling in the Euclidean chart simplex. Runs in
//! `f64`; the comparison is statistical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::SimplexGeometry;
use crate::density;
use crate::error::{Error, Result};

/// Points per batch. Each batch owns one ChaCha stream, so results depend on
/// `(seed, samples)` only, not on the thread count.
pub const BATCH_SIZE: usize = 8192;

fn mc_error(msg: impl Into<String>) -> Error {
    Error::MonteCarlo(msg.into())
}

/// Uniform sampler for a Euclidean simplex given by its vertices.
#[derive(Clone, Debug)]
pub struct SimplexSampler {
    vertices: Vec<Vec<f64>>,
    seed: u64,
}

impl SimplexSampler {
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Points `index * BATCH_SIZE ..` of the stream, `len <= BATCH_SIZE`.
    pub fn batch(&self, index: u64, len: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let n = self.dimension();
        let mut weights = vec![0.0; n + 1];
        (0..len)
            .map(|_| {
                let mut total = 0.0;
                for w in weights.iter_mut() {
                    // Normalised exponential spacings are uniform on the simplex.
                    *w = -(1.0 - rng.gen::<f64>()).ln();
                    total += *w;
                }
                let mut p = vec![0.0; n];
                for (w, v) in weights.iter().zip(&self.vertices) {
                    let b = w / total;
                    for (pk, vk) in p.iter_mut().zip(v) {
                        *pk += b * vk;
                    }
                }
                p
            })
            .collect()
    }

    /// The first `count` points of the stream.
    pub fn points(&self, count: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
        let batches = count.div_ceil(BATCH_SIZE);
        (0..batches).flat_map(move |b| {
            let len = BATCH_SIZE.min(count - b * BATCH_SIZE);
            self.batch(b as u64, len)
        })
    }
}

/// Euclidean volume of a simplex from its chart vertices.
#[allow(clippy::needless_range_loop)]
pub fn euclidean_simplex_volume(vertices: &[Vec<f64>]) -> Result<f64> {
    let n = vertices.len().checked_sub(1).ok_or_else(|| mc_error("no vertices"))?;
    if n == 0 || vertices.iter().any(|v| v.len() != n) {
        return Err(mc_error("expected n + 1 vertices with n coordinates"));
    }
    let mut m: Vec<Vec<f64>> =
        vertices[1..].iter().map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect()).collect();
    let scale: f64 = m.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()));
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).expect("non-empty");
        m.swap(col, pivot);
        if pivot != col {
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        if p.abs() <= 1e-12 * scale {
            return Err(mc_error("degenerate simplex"));
        }
        for row in col + 1..n {
            let f = m[row][col] / p;
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok(det.abs() / factorial)
}

/// Sampler over the simplex with the given chart vertices.
pub fn sample_simplex_uniform(vertices: &[Vec<f64>], seed: u64) -> Result<SimplexSampler> {
    euclidean_simplex_volume(vertices)?;
    Ok(SimplexSampler { vertices: vertices.to_vec(), seed })
}

/// Hyperbolic volume density `(1 - |p|^2)^(-(n+1)/2)` of the projective
/// ball model at the chart point `p`.
pub fn klein_volume_element(p: &[f64], n: usize) -> Result<f64> {
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    let r2: f64 = p.iter().map(|x| x * x).sum();
    if r2 >= 1.0 {
        return Err(mc_error("point is not inside the model ball"));
    }
    Ok((1.0 - r2).powf(-((n + 1) as f64) / 2.0))
}

/// A removed horoball in `f64`: standardizer rows and type parameter.
struct Mask {
    matrix: Vec<Vec<f64>>,
    s: f64,
}

impl Mask {
    fn contains(&self, p: &[f64]) -> bool {
        let n = p.len();
        let y: Vec<f64> =
            self.matrix.iter().map(|row| row[0] + row[1..].iter().zip(p).map(|(a, b)| a * b).sum::<f64>()).collect();
        let q = -y[0] * y[0] + y[1..].iter().map(|x| x * x).sum::<f64>();
        let t = (y[0] - y[n]).powi(2);
        (self.s - 1.0) * q - (1.0 + self.s) * t > 0.0
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct BatchStats {
    sum: f64,
    sum_sq: f64,
    max: f64,
    masked: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub mean: f64,
    /// Infinite when no samples were drawn.
    pub standard_error: f64,
    pub samples: u64,
    pub seed: u64,
    /// Total volume of the removed horoball pieces.
    pub analytic_part: f64,
    pub euclidean_volume: f64,
    /// Largest sampled value of the masked integrand.
    pub max_integrand: f64,
    pub masked_fraction: f64,
}

impl VolumeEstimate {
    /// Signed distance of `reference` from the estimate in standard errors.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference) / self.standard_error
    }
}

/// Estimates the hyperbolic volume of `geom` from `samples` points.
pub fn estimate_volume(geom: &SimplexGeometry, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let report = density::density_report(geom)?;
    let analytic_part = report.total_piece_volume().to_f64();
    let n = geom.dimension;
    let vertices = geom.vertices.iter().map(|v| v.chart_f64()).collect::<Result<Vec<_>>>()?;
    let sampler = sample_simplex_uniform(&vertices, seed)?;
    let euclidean_volume = euclidean_simplex_volume(&vertices)?;
    let masks = report
        .pieces
        .iter()
        .map(|p| {
            let ball = crate::horosphere::HoroballSpec::new(p.cusp_index, &geom.vertices[p.cusp_index], p.s.clone())?;
            let matrix =
                ball.standardizer.matrix().iter().map(|row| row.iter().map(|x| x.to_f64()).collect()).collect();
            Ok(Mask { matrix, s: p.s.to_f64() })
        })
        .collect::<Result<Vec<_>>>()?;

    if samples == 0 {
        return Ok(VolumeEstimate {
            mean: analytic_part,
            standard_error: f64::INFINITY,
            samples,
            seed,
            analytic_part,
            euclidean_volume,
            max_integrand: 0.0,
            masked_fraction: 0.0,
        });
    }

    let count = usize::try_from(samples).map_err(|_| mc_error("sample count too large"))?;
    let batches = count.div_ceil(BATCH_SIZE);
    let stats = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH_SIZE.min(count - b * BATCH_SIZE);
            let mut sum = Neumaier::default();
            let mut sum_sq = Neumaier::default();
            let mut st = BatchStats::default();
            for p in sampler.batch(b as u64, len) {
                if masks.iter().any(|m| m.contains(&p)) {
                    st.masked += 1;
                    continue;
                }
                let f = klein_volume_element(&p, n)?;
                sum.add(f);
                sum_sq.add(f * f);
                st.max = st.max.max(f);
            }
            st.sum = sum.value();
            st.sum_sq = sum_sq.value();
            Ok(st)
        })
        .collect::<Result<Vec<BatchStats>>>()?;

    let mut sum = Neumaier::default();
    let mut sum_sq = Neumaier::default();
    let mut max_integrand: f64 = 0.0;
    let mut masked = 0;
    for st in &stats {
        sum.add(st.sum);
        sum_sq.add(st.sum_sq);
        max_integrand = max_integrand.max(st.max);
        masked += st.masked;
    }
    let nf = samples as f64;
    let mean = sum.value() / nf;
    let variance =
        if samples > 1 { ((sum_sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { f64::INFINITY };
    if !variance.is_finite() && samples > 1 || !max_integrand.is_finite() {
        return Err(mc_error("integrand variance overflowed"));
    }
    Ok(VolumeEstimate {
        mean: analytic_part + euclidean_volume * mean,
        standard_error: euclidean_volume * (variance / nf).sqrt(),
        samples,
        seed,
        analytic_part,
        euclidean_volume,
        max_integrand,
        masked_fraction: masked as f64 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![0.0, 0.5]]
    }

    #[test]
    fn samples_lie_in_simplex_and_repeat() {
        let s = sample_simplex_uniform(&triangle(), 7).unwrap();
        let pts: Vec<_> = s.points(20_000).collect();
        assert_eq!(pts.len(), 20_000);
        for p in &pts {
            assert!(p[0] >= 0.0 && p[1] >= 0.0 && p[0] + p[1] <= 0.5 + 1e-12);
        }
        let again: Vec<_> = s.points(20_000).collect();
        assert_eq!(pts, again);
        let other: Vec<_> = sample_simplex_uniform(&triangle(), 8).unwrap().points(10).collect();
        assert_ne!(pts[..10].to_vec(), other);
    }

    #[test]
    fn sample_mean_near_centroid() {
        let n = 50_000;
        let s = sample_simplex_uniform(&triangle(), 1).unwrap();
        let (mut sx, mut sxx) = (0.0, 0.0);
        for p in s.points(n) {
            sx += p[0];
            sxx += p[0] * p[0];
        }
        let mean = sx / n as f64;
        let sd = (sxx / n as f64 - mean * mean).sqrt();
        assert!((mean - 1.0 / 6.0).abs() < 5.0 * sd / (n as f64).sqrt());
    }

    #[test]
    fn degenerate_and_volume() {
        assert!((euclidean_simplex_volume(&triangle()).unwrap() - 0.125).abs() < 1e-15);
        let flat = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(sample_simplex_uniform(&flat, 0).is_err());
    }

    #[test]
    fn volume_element() {
        assert_eq!(klein_volume_element(&[0.0, 0.0, 0.0], 3).unwrap(), 1.0);
        let a = klein_volume_element(&[0.3, 0.0], 2).unwrap();
        let b = klein_volume_element(&[0.6, 0.0], 2).unwrap();
        assert!(b > a && a > 1.0);
        assert!(klein_volume_element(&[1.0, 0.0], 2).is_err());
        assert!(klein_volume_element(&[0.1], 2).is_err());
    }

    #[test]
    fn zero_samples_give_analytic_part() {
        let g = crate::Catalog::bundled().get("S6bar").unwrap().evaluate(128).unwrap();
        let e = estimate_volume(&g, 0, 42).unwrap();
        assert_eq!(e.mean, e.analytic_part);
        assert!(e.standard_error.is_infinite());
    }

    #[test]
    fn small_run_brackets_volume() {
        let g = crate::Catalog::bundled().get("S6bar").unwrap().evaluate(128).unwrap();
        let e = estimate_volume(&g, 40_000, 3).unwrap();
        let vol = g.volume.to_f64();
        assert!(e.z_score(vol).abs() < 5.0, "{e:?}");
        assert!(e.analytic_part < e.mean);
        assert!(e.max_integrand.is_finite() && e.max_integrand > 1.0);
    }
}
