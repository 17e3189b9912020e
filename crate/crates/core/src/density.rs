//! Local horoball packing density of a simplex.
//!
//! For a cusp `c` with horoball type `s`, the piece of the ball inside the
//! simplex is a cone over a horospherical simplex. Its vertices `H_i` are
//! where the horosphere meets the edges `A_c A_i`; the horosphere is
//! intrinsically Euclidean with distances `2 sinh(d/2)`, so the base volume
//! follows from the Cayley-Menger determinant and the piece volume is that
//! base volume divided by `n - 1`.
//!
//! With several cusps, balls are grown in every order: each new ball takes
//! the largest size (smallest `s`) that neither crosses its opposite facet nor
//! overlaps an already placed ball. Distinct outcomes are the extremal
//! configurations; two that differ in exactly two cusps are joined by a
//! one-parameter family where one ball shrinks while the other grows.

use crate::catalog::SimplexGeometry;
use crate::error::{Error, Result};
use crate::horosphere::{self, HoroballSpec};
use crate::lorentz::{self, PointClass, ProjectivePoint};
use crate::scalar::{ExactExpr, Scalar};

/// Euclidean `(m-1)`-volume of `m` points from their pairwise distances.
#[allow(clippy::needless_range_loop)]
pub fn cayley_menger_volume(dist: &[Vec<Scalar>]) -> Result<Scalar> {
    let m = dist.len();
    if m < 2 {
        return Err(Error::domain("Cayley-Menger volume needs at least two points"));
    }
    if dist.iter().any(|r| r.len() != m) {
        return Err(Error::domain("distance matrix is not square"));
    }
    let prec = dist[0][1].precision();
    let tol = Scalar::epsilon(prec, prec as i32 / 2);
    let mut scale = Scalar::zero(prec);
    for i in 0..m {
        if !dist[i][i].is_zero() {
            return Err(Error::domain("distance matrix has a non-zero diagonal"));
        }
        for j in 0..m {
            if i != j {
                if !dist[i][j].is_positive() {
                    return Err(Error::domain("off-diagonal distances must be positive"));
                }
                if !(&dist[i][j] - &dist[j][i]).is_zero_within(&(&tol * &dist[i][j])) {
                    return Err(Error::domain("distance matrix is not symmetric"));
                }
                scale = scale.max(dist[i][j].square());
            }
        }
    }

    let size = m + 1;
    let mut a: Vec<Vec<Scalar>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| match (i, j) {
                    (0, 0) => Scalar::zero(prec),
                    (0, _) | (_, 0) => Scalar::one(prec),
                    _ => dist[i - 1][j - 1].square(),
                })
                .collect()
        })
        .collect();
    let det = determinant(&mut a);

    let mut denom = Scalar::pow2(m as i32 - 1, prec);
    let mut fact = Scalar::one(prec);
    for k in 2..m {
        fact = fact * k as i64;
    }
    denom = denom * fact.square();
    let mut v2 = det / denom;
    if m % 2 == 1 {
        v2 = -v2;
    }
    if v2.is_negative() {
        let slack = &tol * &scale.powi(m as i32 - 1);
        if !v2.is_zero_within(&slack) {
            return Err(Error::geometry("distances are not embeddable in Euclidean space"));
        }
        return Ok(Scalar::zero(prec));
    }
    v2.sqrt()
}

/// Determinant by Gaussian elimination with partial pivoting; consumes `a`.
#[allow(clippy::needless_range_loop)]
fn determinant(a: &mut [Vec<Scalar>]) -> Scalar {
    let n = a.len();
    let prec = a[0][0].precision().max(a[0][1].precision());
    let mut det = Scalar::one(prec);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).expect("finite"))
            .expect("non-empty range");
        if a[pivot][col].is_zero() {
            return Scalar::zero(prec);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = &det * &a[col][col];
        for row in col + 1..n {
            let f = &a[row][col] / &a[col][col];
            for k in col..n {
                let delta = &f * &a[col][k];
                a[row][k] = &a[row][k] - &delta;
            }
        }
    }
    det
}

fn check_cusp(geom: &SimplexGeometry, cusp: usize) -> Result<()> {
    if !geom.ideal_vertices.contains(&cusp) {
        return Err(Error::geometry(format!("{}: vertex {cusp} is not an ideal vertex", geom.witt_symbol)));
    }
    Ok(())
}

/// Type of the largest horoball at `cusp` that stays inside the facet
/// opposite the cusp: the horosphere through the foot of the perpendicular
/// from the cusp to that facet.
pub fn max_horoball_parameter(geom: &SimplexGeometry, cusp: usize) -> Result<Scalar> {
    check_cusp(geom, cusp)?;
    let a = &geom.vertices[cusp];
    let foot = lorentz::perpendicular_foot(a, &geom.forms[cusp])?;
    if lorentz::classify(&foot) != PointClass::Interior {
        return Err(Error::geometry("perpendicular foot is not an interior point"));
    }
    let m = lorentz::standardize(a)?;
    horosphere::horosphere_through(&m.apply(&foot)?)
}

fn admissible(geom: &SimplexGeometry, cusp: usize, s: &Scalar) -> Result<()> {
    let smax = max_horoball_parameter(geom, cusp)?;
    let tol = Scalar::epsilon(geom.precision, geom.precision as i32 / 2);
    if *s < &smax - &tol {
        return Err(Error::geometry(format!(
            "{}: horoball type {} at vertex {cusp} crosses the opposite facet (minimum {})",
            geom.witt_symbol,
            s.to_digits(12),
            smax.to_digits(12)
        )));
    }
    Ok(())
}

/// Vertices `H_i` (original coordinates, vertex order without the cusp)
/// where the horosphere of type `s` at `cusp` meets the simplex edges.
pub fn horospherical_simplex(geom: &SimplexGeometry, cusp: usize, s: &Scalar) -> Result<Vec<ProjectivePoint>> {
    check_cusp(geom, cusp)?;
    let ball = HoroballSpec::new(cusp, &geom.vertices[cusp], s.clone())?;
    geom.vertices.iter().enumerate().filter(|&(i, _)| i != cusp).map(|(_, v)| ball.meet_edge(v)).collect()
}

/// Volume of the horoball piece of type `s` at `cusp` inside the simplex.
pub fn cusp_piece_volume(geom: &SimplexGeometry, cusp: usize, s: &Scalar) -> Result<Scalar> {
    admissible(geom, cusp, s)?;
    let hs = horospherical_simplex(geom, cusp, s)?;
    let m = hs.len();
    let prec = geom.precision;
    let mut dist = vec![vec![Scalar::zero(prec); m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let l = lorentz::half_chord(&hs[i], &hs[j])?;
            dist[i][j] = l.clone();
            dist[j][i] = l;
        }
    }
    let base = cayley_menger_volume(&dist)?;
    horosphere::piece_volume(&base, geom.dimension)
}

#[derive(Clone, Debug)]
pub struct ClosedFormMatch {
    pub expr: ExactExpr,
    pub value: Scalar,
    pub rel_error: Scalar,
    pub matched: bool,
}

impl ClosedFormMatch {
    pub fn compare(expr: &ExactExpr, computed: &Scalar, tolerance: &Scalar) -> Result<Self> {
        let value = expr.eval(computed.precision())?;
        let rel_error = computed.rel_diff(&value);
        let matched = rel_error <= *tolerance;
        Ok(ClosedFormMatch { expr: expr.clone(), value, rel_error, matched })
    }
}

#[derive(Clone, Debug)]
pub struct CuspPiece {
    pub cusp_index: usize,
    pub s: Scalar,
    pub piece_volume: Scalar,
    pub closed_form: Option<ClosedFormMatch>,
}

/// One admissible assignment of horoball types to all cusps.
#[derive(Clone, Debug)]
pub struct CuspConfiguration {
    /// Cusp indices in catalog order.
    pub cusps: Vec<usize>,
    pub parameters: Vec<Scalar>,
    pub pieces: Vec<Scalar>,
    pub density: Scalar,
}

impl CuspConfiguration {
    pub fn total(&self) -> Scalar {
        let prec = self.density.precision();
        crate::scalar::sum(&self.pieces, prec)
    }
}

/// Densities of the family joining two extremal configurations: the ball at
/// `shrinking` has its type shifted by `artanh`-distance `x`, the ball at
/// `growing` by `-x`, for `x` in `[0, x_max]`.
#[derive(Clone, Debug)]
pub struct TransitionFamily {
    pub shrinking: usize,
    pub growing: usize,
    pub x_max: Scalar,
    pub shrinking_volume: Scalar,
    pub growing_volume: Scalar,
    pub fixed_volume: Scalar,
    pub simplex_volume: Scalar,
    pub dimension: usize,
}

impl TransitionFamily {
    pub fn density_at(&self, x: &Scalar) -> Result<Scalar> {
        let prec = self.x_max.precision();
        let tol = Scalar::epsilon(prec, prec as i32 / 2);
        if x.is_negative() && !x.is_zero_within(&tol) || *x > &self.x_max + &tol {
            return Err(Error::domain(format!(
                "transition parameter {} outside [0, {}]",
                x.to_digits(12),
                self.x_max.to_digits(12)
            )));
        }
        let k = (self.dimension - 1) as i64;
        let rate = x * k;
        let total = &self.shrinking_volume * &(-&rate).exp() + &self.growing_volume * &rate.exp() + &self.fixed_volume;
        Ok(total / &self.simplex_volume)
    }

    pub fn endpoints(&self) -> Result<(Scalar, Scalar)> {
        let zero = Scalar::zero(self.x_max.precision());
        Ok((self.density_at(&zero)?, self.density_at(&self.x_max)?))
    }

    pub fn moves(&self, pair: (usize, usize)) -> bool {
        (self.shrinking, self.growing) == pair || (self.growing, self.shrinking) == pair
    }

    /// Checks non-negative second differences on a uniform grid, which rules
    /// out an interior maximum.
    pub fn is_convex_on_grid(&self, steps: usize) -> Result<bool> {
        let prec = self.x_max.precision();
        let h = &self.x_max / steps as i64;
        let values: Vec<Scalar> = (0..=steps).map(|k| self.density_at(&(&h * k as i64))).collect::<Result<_>>()?;
        let tol = Scalar::epsilon(prec, 32);
        Ok(values.windows(3).all(|w| {
            let second = &w[0] - &(&w[1] * 2) + &w[2];
            !second.is_negative() || second.is_zero_within(&tol)
        }))
    }
}

#[derive(Clone, Debug)]
pub struct DensityReport {
    pub witt_symbol: String,
    pub dimension: usize,
    pub precision: u32,
    /// Pieces of the optimal configuration, in cusp order.
    pub pieces: Vec<CuspPiece>,
    pub simplex_volume: Scalar,
    pub density: Scalar,
    /// `piece / total` for each entry of `pieces`.
    pub weights: Vec<Scalar>,
    pub configurations: Vec<CuspConfiguration>,
    pub transitions: Vec<TransitionFamily>,
    pub transition_extremes: Option<(Scalar, Scalar)>,
    pub closed_form: Option<ClosedFormMatch>,
}

impl DensityReport {
    pub fn total_piece_volume(&self) -> Scalar {
        let v: Vec<Scalar> = self.pieces.iter().map(|p| p.piece_volume.clone()).collect();
        crate::scalar::sum(&v, self.precision)
    }

    pub fn match_closed_form(&mut self, expr: &ExactExpr, tolerance: &Scalar) -> Result<()> {
        self.closed_form = Some(ClosedFormMatch::compare(expr, &self.density, tolerance)?);
        Ok(())
    }

    pub fn piece(&self, cusp: usize) -> Option<&CuspPiece> {
        self.pieces.iter().find(|p| p.cusp_index == cusp)
    }

    fn from_configuration(
        geom: &SimplexGeometry,
        chosen: &CuspConfiguration,
        configurations: Vec<CuspConfiguration>,
        transitions: Vec<TransitionFamily>,
    ) -> Self {
        let total = chosen.total();
        let pieces = chosen
            .cusps
            .iter()
            .zip(&chosen.parameters)
            .zip(&chosen.pieces)
            .map(|((&c, s), v)| CuspPiece { cusp_index: c, s: s.clone(), piece_volume: v.clone(), closed_form: None })
            .collect();
        let weights = chosen.pieces.iter().map(|v| v / &total).collect();
        let transition_extremes = transitions.first().and_then(|t| t.endpoints().ok());
        DensityReport {
            witt_symbol: geom.witt_symbol.clone(),
            dimension: geom.dimension,
            precision: geom.precision,
            pieces,
            simplex_volume: geom.volume.clone(),
            density: chosen.density.clone(),
            weights,
            configurations,
            transitions,
            transition_extremes,
            closed_form: None,
        }
    }
}

fn configuration(geom: &SimplexGeometry, parameters: Vec<Scalar>) -> Result<CuspConfiguration> {
    let cusps = geom.ideal_vertices.clone();
    let pieces =
        cusps.iter().zip(&parameters).map(|(&c, s)| cusp_piece_volume(geom, c, s)).collect::<Result<Vec<_>>>()?;
    let total = crate::scalar::sum(&pieces, geom.precision);
    let density = total / &geom.volume;
    Ok(CuspConfiguration { cusps, parameters, pieces, density })
}

/// Density with the single cusp at its maximal horoball.
pub fn local_density(geom: &SimplexGeometry) -> Result<DensityReport> {
    if geom.ideal_vertices.len() != 1 {
        return Err(Error::geometry(format!(
            "{}: local density expects exactly one ideal vertex, found {}",
            geom.witt_symbol,
            geom.ideal_vertices.len()
        )));
    }
    let cusp = geom.ideal_vertices[0];
    let s = max_horoball_parameter(geom, cusp)?;
    let config = configuration(geom, vec![s])?;
    Ok(DensityReport::from_configuration(geom, &config, vec![config.clone()], Vec::new()))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// All distinct configurations reached by growing the balls one at a time,
/// each as large as the facet and the already placed balls allow.
pub fn extremal_configurations(geom: &SimplexGeometry) -> Result<Vec<CuspConfiguration>> {
    let cusps = &geom.ideal_vertices;
    let prec = geom.precision;
    let smax = cusps.iter().map(|&c| max_horoball_parameter(geom, c)).collect::<Result<Vec<_>>>()?;
    let slot = |c: usize| cusps.iter().position(|&x| x == c).expect("cusp listed");
    let tol = Scalar::epsilon(prec, prec as i32 / 2);

    let mut found: Vec<Vec<Scalar>> = Vec::new();
    for order in permutations(cusps) {
        let mut placed: Vec<HoroballSpec> = Vec::new();
        for &c in &order {
            let mut s = smax[slot(c)].clone();
            for ball in &placed {
                s = s.max(horosphere::tangency_parameter(ball, &geom.vertices[c])?);
            }
            placed.push(HoroballSpec::new(c, &geom.vertices[c], s)?);
        }
        placed.sort_by_key(|b| slot(b.cusp_index));
        let params: Vec<Scalar> = placed.into_iter().map(|b| b.s).collect();
        let duplicate = found.iter().any(|f| f.iter().zip(&params).all(|(a, b)| (a - b).is_zero_within(&tol)));
        if !duplicate {
            found.push(params);
        }
    }
    found.into_iter().map(|p| configuration(geom, p)).collect()
}

fn transition_between(
    geom: &SimplexGeometry,
    a: &CuspConfiguration,
    b: &CuspConfiguration,
) -> Result<Option<TransitionFamily>> {
    let prec = geom.precision;
    let tol = Scalar::epsilon(prec, prec as i32 / 2);
    let differing: Vec<usize> =
        (0..a.cusps.len()).filter(|&k| !(&a.parameters[k] - &b.parameters[k]).is_zero_within(&tol)).collect();
    if differing.len() != 2 {
        return Ok(None);
    }
    let (mut p, mut q) = (differing[0], differing[1]);
    // `p` shrinks (its type increases) going from `a` to `b`.
    if a.parameters[p] > b.parameters[p] {
        std::mem::swap(&mut p, &mut q);
    }
    if a.parameters[q] <= b.parameters[q] {
        return Ok(None);
    }
    let x_max = b.parameters[p].atanh()? - a.parameters[p].atanh()?;
    let x_other = a.parameters[q].atanh()? - b.parameters[q].atanh()?;
    if !(&x_max - &x_other).is_zero_within(&tol) {
        return Ok(None);
    }
    let mut fixed = Scalar::zero(prec);
    for k in 0..a.cusps.len() {
        if k != p && k != q {
            fixed = fixed + &a.pieces[k];
        }
    }
    Ok(Some(TransitionFamily {
        shrinking: a.cusps[p],
        growing: a.cusps[q],
        x_max,
        shrinking_volume: a.pieces[p].clone(),
        growing_volume: a.pieces[q].clone(),
        fixed_volume: fixed,
        simplex_volume: geom.volume.clone(),
        dimension: geom.dimension,
    }))
}

fn transitions_of(geom: &SimplexGeometry, configs: &[CuspConfiguration]) -> Result<Vec<TransitionFamily>> {
    let mut out = Vec::new();
    for i in 0..configs.len() {
        for j in i + 1..configs.len() {
            if let Some(t) = transition_between(geom, &configs[i], &configs[j])? {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Optimal density over the extremal configurations of a multi-cusp simplex.
pub fn multi_cusp_density(geom: &SimplexGeometry) -> Result<DensityReport> {
    if geom.ideal_vertices.len() < 2 {
        return Err(Error::geometry(format!(
            "{}: multi-cusp density expects at least two ideal vertices",
            geom.witt_symbol
        )));
    }
    let configs = extremal_configurations(geom)?;
    let tol = Scalar::epsilon(geom.precision, geom.precision as i32 / 2);
    let mut best = 0;
    for (k, c) in configs.iter().enumerate() {
        if c.density > &configs[best].density + &tol {
            best = k;
        }
    }
    let transitions = transitions_of(geom, &configs)?;
    for t in &transitions {
        if !t.is_convex_on_grid(16)? {
            return Err(Error::geometry(format!("{}: transition family is not convex", geom.witt_symbol)));
        }
    }
    let chosen = configs[best].clone();
    Ok(DensityReport::from_configuration(geom, &chosen, configs, transitions))
}

/// Report for any catalog simplex.
pub fn density_report(geom: &SimplexGeometry) -> Result<DensityReport> {
    match geom.ideal_vertices.len() {
        0 => Err(Error::geometry(format!("{}: no ideal vertex", geom.witt_symbol))),
        1 => local_density(geom),
        _ => multi_cusp_density(geom),
    }
}

/// Density of the transition family moving the balls at `pair` by `x`.
pub fn transition_density(geom: &SimplexGeometry, pair: (usize, usize), x: &Scalar) -> Result<Scalar> {
    let configs = extremal_configurations(geom)?;
    let family = transitions_of(geom, &configs)?.into_iter().find(|t| t.moves(pair)).ok_or_else(|| {
        Error::geometry(format!("{}: no transition family moves cusps {} and {}", geom.witt_symbol, pair.0, pair.1))
    })?;
    family.density_at(x)
}
