//! Brute-force ground truth on sampled sets: best coapproximation,
//! optimality, the `ℓ_∞⁴` subspace without coapproximations, the nonconvex
//! contractive set in `ℓ_∞²`, and nonexpansiveness sweeps.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::sampling;
use crate::spaces::{DualFunctional, NormSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Points `Σ k_i h b_i`, `k ∈ ℤᵐ`, inside the ball of radius `R`.
    Grid { basis: Vec<Point> },
    Vertices,
    Explicit,
}

/// A finite discretization of a set `F`, stored as one flat coordinate array.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSet {
    coords: Vec<f64>,
    dim: usize,
    provenance: Provenance,
    h: f64,
    radius: f64,
}

/// Basis of `⋂ ker f_i` from the reduced row echelon form: one vector per
/// free variable, with a `1` in that coordinate.
pub fn kernel_basis(functionals: &[DualFunctional], dim: usize) -> Result<Vec<Point>> {
    for f in functionals {
        check_dim(dim, f.dim())?;
    }
    let mut rows: Vec<Vec<f64>> = functionals.iter().map(|f| f.coeffs().to_vec()).collect();
    let scale = rows.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    let eps = 1e-12 * scale;
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..dim {
        if r == rows.len() {
            break;
        }
        let Some(best) = (r..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else {
            break;
        };
        if rows[best][col].abs() <= eps {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][col];
        for v in rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0.0 {
                let factor = row[col];
                for (v, q) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * q;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    Ok(free
        .iter()
        .map(|&j| {
            let mut v = vec![0.0; dim];
            v[j] = 1.0;
            for (row, &pc) in rows.iter().zip(&pivots) {
                let c = -row[j];
                v[pc] = if c.abs() <= eps { 0.0 } else { c };
            }
            Point::from(v)
        })
        .collect())
}

impl SampledSet {
    /// Grid of step `h` on `⋂ ker f_i`, truncated to `‖d‖ ≤ radius`.
    pub fn grid_on_subspace(space: &NormSpec, functionals: &[DualFunctional], h: f64, radius: f64) -> Result<Self> {
        let basis = kernel_basis(functionals, space.dim())?;
        SampledSet::grid_on_span(space, basis, h, radius)
    }

    /// Grid `{Σ k_i h b_i : k ∈ ℤᵐ, ‖·‖ ≤ radius}` on the span of `basis`.
    pub fn grid_on_span(space: &NormSpec, basis: Vec<Point>, h: f64, radius: f64) -> Result<Self> {
        let dim = space.dim();
        if !(h > 0.0 && h.is_finite()) || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument("grid needs h > 0 and R > 0".into()));
        }
        for b in &basis {
            check_dim(dim, b.dim())?;
        }
        let m = basis.len();
        let mut coords = Vec::new();
        if m == 0 {
            coords.extend(std::iter::repeat_n(0.0, dim));
        } else {
            let b = DMatrix::from_fn(dim, m, |i, j| basis[j][i]);
            let pinv = b
                .clone()
                .pseudo_inverse(1e-12)
                .map_err(|e| Error::InvalidArgument(format!("basis is degenerate: {e}")))?;
            if (pinv.clone() * &b - DMatrix::identity(m, m)).abs().max() > 1e-8 {
                return Err(Error::InvalidArgument("basis vectors are linearly dependent".into()));
            }
            // |t_i| ≤ ‖row_i(B⁺)‖₂ ‖d‖₂ ≤ ‖row_i(B⁺)‖₂ R / lo
            let (lo, _) = space.euclidean_equivalence();
            let ranges: Vec<std::ops::RangeInclusive<i64>> = (0..m)
                .map(|i| {
                    let t = pinv.row(i).norm() * radius / lo;
                    let k = (t / h + 1e-9).floor() as i64;
                    -k..=k
                })
                .collect();
            let mut buf = vec![0.0; dim];
            for ks in ranges.into_iter().multi_cartesian_product() {
                buf.iter_mut().for_each(|v| *v = 0.0);
                for (k, bv) in ks.iter().zip(&basis) {
                    let t = *k as f64 * h;
                    for (v, c) in buf.iter_mut().zip(bv.iter()) {
                        *v += t * c;
                    }
                }
                if space.norm_unchecked(&buf) <= radius * (1.0 + 1e-12) {
                    coords.extend_from_slice(&buf);
                }
            }
        }
        Ok(SampledSet {
            coords,
            dim,
            provenance: Provenance::Grid { basis },
            h,
            radius,
        })
    }

    /// Vertices of a polytope, reported with resolution `h`.
    pub fn from_vertices(space: &NormSpec, vertices: Vec<Point>, h: f64) -> Result<Self> {
        let mut s = SampledSet::explicit(space, vertices, h)?;
        s.provenance = Provenance::Vertices;
        Ok(s)
    }

    /// An explicit list; points closer than `h/10` to an earlier point are
    /// rejected.
    pub fn explicit(space: &NormSpec, points: Vec<Point>, h: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyList);
        }
        if !(h > 0.0) {
            return Err(Error::InvalidArgument("resolution h must be positive".into()));
        }
        let dim = space.dim();
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        for (i, j) in (0..points.len()).tuple_combinations() {
            if space.distance(&points[i], &points[j]) < h / 10.0 {
                return Err(Error::InvalidArgument(format!(
                    "samples {i} and {j} are closer than h/10"
                )));
            }
        }
        let radius = points.iter().fold(0.0f64, |m, p| m.max(space.norm_unchecked(p)));
        Ok(SampledSet {
            coords: points.iter().flat_map(|p| p.iter().copied()).collect(),
            dim,
            provenance: Provenance::Explicit,
            h,
            radius,
        })
    }

    /// Adds `p` unless a sample already lies within `h/10` of it.
    pub fn with_point(mut self, space: &NormSpec, p: &[f64]) -> Result<Self> {
        check_dim(self.dim, p.len())?;
        if self.iter().all(|c| space.distance(c, p) >= self.h / 10.0) {
            self.coords.extend_from_slice(p);
            self.radius = self.radius.max(space.norm_unchecked(p));
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    /// For grids, the largest distance `(h/2) Σ ‖b_i‖` from a point of the
    /// truncated span to the nearest parameter-rounded grid point.
    pub fn slack(&self, space: &NormSpec) -> Option<f64> {
        match &self.provenance {
            Provenance::Grid { basis } => {
                Some(0.5 * self.h * basis.iter().map(|b| space.norm_unchecked(b)).sum::<f64>())
            }
            _ => None,
        }
    }
}

/// `‖d − c‖ ≤ ‖x − c‖ + tol` for every sample `c`.
pub fn is_coapprox(space: &NormSpec, set: &SampledSet, d: &[f64], x: &[f64], tol: f64) -> bool {
    set.iter()
        .all(|c| space.distance(d, c) <= space.distance(x, c) + tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoapproxReport {
    pub x: Point,
    /// Sample minimizing the worst-case margin.
    pub candidate: Point,
    /// `min_d max_c (‖d − c‖ − ‖x − c‖)` over the samples.
    pub margin: f64,
    pub tol: f64,
    pub samples: usize,
    pub h: f64,
    pub radius: f64,
}

impl CoapproxReport {
    pub fn passed(&self) -> bool {
        self.margin <= self.tol
    }

    /// The candidate when it passes within `tol`.
    pub fn best(&self) -> Option<&Point> {
        self.passed().then_some(&self.candidate)
    }
}

const POOL_SIZE: usize = 32;
const BATCH: usize = 512;

enum Scan {
    Exact(f64),
    Pruned(usize),
}

/// Exhaustive scan for the sample `d` minimizing `max_c (‖d − c‖ − ‖x − c‖)`.
///
/// The result is exact: a candidate is dropped only once some `c` shows its
/// worst case is at least the best value already found. Candidates are
/// visited in order of a lower bound and processed in fixed batches, so the
/// report does not depend on the number of threads.
pub fn find_coapprox(space: &NormSpec, set: &SampledSet, x: &[f64], tol: f64) -> Result<CoapproxReport> {
    check_dim(set.dim(), x.len())?;
    let n = set.len();
    let xc: Vec<f64> = (0..n).into_par_iter().map(|i| space.distance(x, set.point(i))).collect();
    let value = |d: usize, c: usize| space.distance(set.point(d), set.point(c)) - xc[c];

    let mut pool: Vec<usize> = (0..POOL_SIZE.min(n)).map(|k| k * n / POOL_SIZE.min(n)).collect();
    let lower: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|d| pool.iter().map(|&c| value(d, c)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lower[a].total_cmp(&lower[b]).then(a.cmp(&b)));

    let mut best_value = f64::INFINITY;
    let mut best = order[0];
    for batch in order.chunks(BATCH) {
        if lower[batch[0]] >= best_value {
            break;
        }
        let bound = best_value;
        let scans: Vec<Scan> = batch
            .par_iter()
            .map(|&d| {
                let mut w = f64::NEG_INFINITY;
                for &c in &pool {
                    w = w.max(value(d, c));
                    if w >= bound {
                        return Scan::Pruned(c);
                    }
                }
                for c in 0..n {
                    w = w.max(value(d, c));
                    if w >= bound {
                        return Scan::Pruned(c);
                    }
                }
                Scan::Exact(w)
            })
            .collect();
        let mut fresh = Vec::new();
        for (&d, s) in batch.iter().zip(&scans) {
            match *s {
                Scan::Exact(w) if w < best_value => {
                    best_value = w;
                    best = d;
                }
                Scan::Pruned(c) if !pool.contains(&c) && !fresh.contains(&c) && fresh.len() < 8 => fresh.push(c),
                _ => {}
            }
        }
        fresh.extend(pool.iter().copied());
        fresh.truncate(POOL_SIZE);
        pool = fresh;
    }
    Ok(CoapproxReport {
        x: Point::from(x.to_vec()),
        candidate: Point::from(set.point(best).to_vec()),
        margin: best_value,
        tol,
        samples: n,
        h: set.h(),
        radius: set.radius(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    /// No dominator was found.
    pub optimal: bool,
    /// A point `x ≠ z` with `‖x − c‖ ≤ ‖z − c‖` for every sample `c`.
    pub witness: Option<Point>,
    /// Smallest `max_c (‖x − c‖ − ‖z − c‖)` seen over the search.
    pub best_value: f64,
    pub evaluations: usize,
}

/// Minimum separation `‖x − z‖` for `x` to count as a dominator of `z`.
pub const DOMINATOR_SEPARATION: f64 = 1e-9;

/// Searches for `x ≠ z` dominating `z` on the samples: moves from `z` toward
/// samples, random perturbations, then coordinate descent on
/// `φ(x) = max_c (‖x − c‖ − ‖z − c‖)`. A `true` answer is one-sided: no
/// dominator was found within `trial_budget` evaluations of `φ`.
pub fn is_optimal_point(
    space: &NormSpec,
    set: &SampledSet,
    z: &[f64],
    trial_budget: usize,
    seed: u64,
) -> Result<OptimalityReport> {
    check_dim(set.dim(), z.len())?;
    let n = set.len();
    let zc: Vec<f64> = set.iter().map(|c| space.distance(z, c)).collect();
    let phi = |x: &[f64]| -> f64 {
        set.iter()
            .zip(&zc)
            .map(|(c, r)| space.distance(x, c) - r)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut report = OptimalityReport {
        optimal: true,
        witness: None,
        best_value: f64::INFINITY,
        evaluations: 0,
    };
    let mut best_x: Option<Vec<f64>> = None;
    let consider = |x: Vec<f64>, report: &mut OptimalityReport, best_x: &mut Option<Vec<f64>>| -> bool {
        if space.distance(&x, z) < DOMINATOR_SEPARATION || report.evaluations >= trial_budget {
            return false;
        }
        report.evaluations += 1;
        let v = phi(&x);
        if v < report.best_value {
            report.best_value = v;
            *best_x = Some(x.clone());
        }
        if v <= 0.0 {
            report.optimal = false;
            report.witness = Some(Point::from(x));
            return true;
        }
        false
    };

    let toward = |c: &[f64], t: f64| -> Vec<f64> { z.iter().zip(c).map(|(a, b)| a + t * (b - a)).collect() };
    let stride = (3 * n / trial_budget.max(1)).max(1);
    for i in (0..n).step_by(stride) {
        for t in [1.0, 0.5] {
            if consider(toward(set.point(i), t), &mut report, &mut best_x) {
                return Ok(report);
            }
        }
        if report.evaluations >= trial_budget / 2 {
            break;
        }
    }

    let scale = set.radius().max(space.norm_unchecked(z)).max(1.0);
    let mut rng = sampling::rng(seed);
    let random_trials = trial_budget / 4;
    for k in 0..random_trials {
        let s = scale * [1e-3, 1e-2, 1e-1, 1.0][k % 4];
        let u = sampling::uniform_box(&mut rng, z.len(), 1.0);
        let x: Vec<f64> = z.iter().zip(u.iter()).map(|(a, b)| a + s * b).collect();
        if consider(x, &mut report, &mut best_x) {
            return Ok(report);
        }
    }

    if let Some(mut x) = best_x.clone() {
        let mut val = report.best_value;
        let mut step = 0.25 * space.distance(&x, z).max(1e-6);
        while step > 1e-12 && report.evaluations < trial_budget {
            let mut improved = false;
            for i in 0..x.len() {
                for sgn in [1.0, -1.0] {
                    let mut trial = x.clone();
                    trial[i] += sgn * step;
                    if consider(trial.clone(), &mut report, &mut best_x) {
                        return Ok(report);
                    }
                    if report.best_value < val {
                        val = report.best_value;
                        x = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
    Ok(report)
}

/// `sgn` with `sgn(0) = +1`.
fn sgn(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Nonexpansive retraction of `ℓ_∞²` onto the nonconvex double cone
/// `{(x, y) : |y| ≤ |x|}`.
pub fn nonconvex_projection_linf2(p: [f64; 2]) -> Point {
    let [x, y] = p;
    if y.abs() <= x.abs() {
        return Point::from(vec![x, y]);
    }
    if x >= 0.0 {
        Point::from(vec![x, sgn(y) * x])
    } else {
        Point::from(vec![x, -sgn(y) * x])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub pairs: usize,
    /// Points are drawn from `[−scale, scale]ⁿ`.
    pub scale: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { pairs: 10_000, scale: 5.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub max_ratio: f64,
    pub worst_pair: Option<(Point, Point)>,
    /// Pairs with `‖x − z‖ ≥ 1e-6` that entered the maximum.
    pub pairs: usize,
}

/// Half of the pairs are independent uniform points; the other half put `z`
/// at a random distance between `10⁻³·scale` and `scale` from `x`.
pub fn sweep_pairs(dim: usize, cfg: &SweepConfig) -> Vec<(Point, Point)> {
    let mut rng = sampling::rng(cfg.seed);
    (0..cfg.pairs)
        .map(|k| {
            let x = sampling::uniform_box(&mut rng, dim, cfg.scale);
            let z = if k % 2 == 0 {
                sampling::uniform_box(&mut rng, dim, cfg.scale)
            } else {
                let eps = cfg.scale * 10f64.powf(-rng.gen_range(0.0..3.0));
                let u = sampling::uniform_box(&mut rng, dim, 1.0);
                x.add_scaled(eps, &u)
            };
            (x, z)
        })
        .collect()
}

/// `max ‖Mx − Mz‖ / ‖x − z‖` over the given pairs, skipping denominators
/// below `1e-6`. Ties go to the earliest pair.
pub fn max_ratio<M>(map: M, space: &NormSpec, pairs: &[(Point, Point)]) -> SweepReport
where
    M: Fn(&[f64]) -> Point + Sync,
{
    let (ratio, idx, used) = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (x, z))| {
            let den = space.distance(x, z);
            if den < 1e-6 {
                return (f64::NEG_INFINITY, usize::MAX, 0usize);
            }
            (space.distance(&map(x), &map(z)) / den, i, 1)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, 0),
            |a, b| {
                let used = a.2 + b.2;
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    (b.0, b.1, used)
                } else {
                    (a.0, a.1, used)
                }
            },
        );
    SweepReport {
        max_ratio: if used == 0 { 0.0 } else { ratio },
        worst_pair: (idx != usize::MAX).then(|| pairs[idx].clone()),
        pairs: used,
    }
}

/// Maximum expansion ratio of `map` over seeded random pairs.
pub fn nonexpansiveness_sweep<M>(map: M, space: &NormSpec, cfg: &SweepConfig) -> SweepReport
where
    M: Fn(&[f64]) -> Point + Sync,
{
    max_ratio(map, space, &sweep_pairs(space.dim(), cfg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub h: f64,
    pub radius: f64,
    /// Taken from the job's top-level seed when run from a configuration.
    #[serde(skip)]
    pub seed: u64,
    /// Query points on the unit sphere screened for a witness.
    pub queries: usize,
    /// Coarse grid used to rank the queries.
    pub screen_h: f64,
    /// Screened queries certified on the full grid, best first.
    pub certify_attempts: usize,
    pub control_h: f64,
    pub control_radius: f64,
    pub control_queries: usize,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            h: 0.05,
            radius: 10.0,
            seed: 7,
            queries: 64,
            screen_h: 0.25,
            certify_attempts: 4,
            control_h: 0.1,
            control_radius: 2.0,
            control_queries: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlReport {
    pub h: f64,
    pub radius: f64,
    pub samples: usize,
    /// Largest grid margin over the control queries.
    pub max_margin: f64,
    /// Grid slack; a coapproximation in the continuum gives grid margin at most this.
    pub tol: f64,
    pub queries: usize,
}

impl ControlReport {
    pub fn passed(&self) -> bool {
        self.max_margin <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub witness: Point,
    /// Certified lower bound for `‖d − c‖ − ‖x − c‖` at the worst `c`, over
    /// every `d` of the untruncated subspace.
    pub margin: f64,
    /// `min_d max_c` over the grid.
    pub grid_margin: f64,
    pub candidate: Point,
    pub slack: f64,
    pub h: f64,
    pub radius: f64,
    pub seed: u64,
    pub samples: usize,
    pub basis: Vec<Point>,
    pub control: Option<ControlReport>,
}

/// The two functionals whose kernels intersect in the subspace of `ℓ_∞⁴`
/// that has no best coapproximations.
pub fn counterexample_functionals() -> [DualFunctional; 2] {
    let sixth = 1.0 / 6.0;
    [
        DualFunctional::from(vec![1.0, 0.0, 0.0, 0.0]),
        DualFunctional::from(vec![0.5, sixth, sixth, sixth]),
    ]
}

/// Certified margin on the untruncated span: a point of norm above
/// `R − slack` fails against `c = 0` by more than `R − slack − ‖x‖`, and
/// every other point is within `slack` of a grid point, where the margin is
/// 1-Lipschitz and the grid `c` give lower bounds.
fn certified_margin(grid_margin: f64, slack: f64, radius: f64, x_norm: f64) -> f64 {
    (grid_margin - slack).min(radius - slack - x_norm)
}

/// Sign vectors (for `n ≤ 8`) followed by seeded random points, all on the
/// unit sphere of `space`.
pub fn sphere_queries(space: &NormSpec, count: usize, seed: u64) -> Vec<Point> {
    let n = space.dim();
    let mut pts: Vec<Point> = if n <= 8 {
        sampling::sign_vectors(n)
            .into_iter()
            .map(|v| {
                let s = space.norm_unchecked(&v);
                v.scaled(1.0 / s)
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut rng = sampling::rng(seed);
    while pts.len() < count {
        let u = sampling::uniform_box(&mut rng, n, 1.0);
        let s = space.norm_unchecked(&u);
        if s > 1e-3 {
            pts.push(u.scaled(1.0 / s));
        }
    }
    pts.truncate(count.max(1));
    pts
}

/// Searches for `x` with no best coapproximation in `F = ⋂ ker f_k`.
///
/// Queries (by default [`sphere_queries`]) are ranked by their margin on a
/// coarse grid; the best `certify_attempts` are rescanned on the full grid
/// until one has a positive certified margin. When `control` is given, the
/// subspace cut out by those functionals is scanned at the control
/// resolution for the witness and further queries.
pub fn search_counterexample(
    space: &NormSpec,
    functionals: &[DualFunctional],
    control: Option<&[DualFunctional]>,
    queries: Option<Vec<Point>>,
    cfg: &CounterexampleConfig,
) -> Result<CounterexampleReport> {
    let queries = match queries {
        Some(q) if !q.is_empty() => q,
        _ => sphere_queries(space, cfg.queries, cfg.seed),
    };
    for q in &queries {
        check_dim(space.dim(), q.dim())?;
    }

    let coarse = SampledSet::grid_on_subspace(space, functionals, cfg.screen_h, cfg.radius)?;
    let mut screened: Vec<(f64, usize)> = queries
        .iter()
        .enumerate()
        .map(|(i, x)| Ok((find_coapprox(space, &coarse, x, 0.0)?.margin, i)))
        .collect::<Result<_>>()?;
    screened.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let grid = SampledSet::grid_on_subspace(space, functionals, cfg.h, cfg.radius)?;
    let slack = grid.slack(space).expect("grid");
    let basis = match grid.provenance() {
        Provenance::Grid { basis } => basis.clone(),
        _ => unreachable!(),
    };
    let attempts = cfg.certify_attempts.max(1).min(queries.len());
    let mut best_margin = f64::NEG_INFINITY;
    let mut found = None;
    for &(_, i) in screened.iter().take(attempts) {
        let x = &queries[i];
        let rep = find_coapprox(space, &grid, x, slack)?;
        let delta = certified_margin(rep.margin, slack, cfg.radius, space.norm_unchecked(x));
        best_margin = best_margin.max(delta);
        if delta > 0.0 {
            found = Some((rep, delta));
            break;
        }
    }
    let Some((rep, delta)) = found else {
        return Err(Error::SearchExhausted { queries: attempts, best_margin });
    };

    let control = match control {
        None => None,
        Some(fs) => {
            let set = SampledSet::grid_on_subspace(space, fs, cfg.control_h, cfg.control_radius)?;
            let tol = set.slack(space).expect("grid");
            let mut xs = vec![rep.x.clone()];
            xs.extend(
                queries
                    .iter()
                    .filter(|q| **q != rep.x)
                    .take(cfg.control_queries.saturating_sub(1))
                    .cloned(),
            );
            let mut max_margin = f64::NEG_INFINITY;
            for x in &xs {
                max_margin = max_margin.max(find_coapprox(space, &set, x, tol)?.margin);
            }
            Some(ControlReport {
                h: cfg.control_h,
                radius: cfg.control_radius,
                samples: set.len(),
                max_margin,
                tol,
                queries: xs.len(),
            })
        }
    };

    Ok(CounterexampleReport {
        witness: rep.x.clone(),
        margin: delta,
        grid_margin: rep.margin,
        candidate: rep.candidate.clone(),
        slack,
        h: cfg.h,
        radius: cfg.radius,
        seed: cfg.seed,
        samples: grid.len(),
        basis,
        control,
    })
}

/// Finds `x` on the unit sphere of `ℓ_∞⁴` with no best coapproximation in
/// `F = ker f₁ ∩ ker f₂`, and checks that `ker f₁` alone has one at every
/// control query.
pub fn verify_counterexample_linf4(cfg: &CounterexampleConfig) -> Result<CounterexampleReport> {
    let space = NormSpec::linf(4);
    let fs = counterexample_functionals();
    search_counterexample(&space, &fs, Some(&fs[..1]), None, cfg)
}
