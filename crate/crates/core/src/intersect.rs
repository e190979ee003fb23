//! Averaged maps of contractive half-space projections and the relaxed
//! fixed-point iteration that projects onto their intersection.

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::feasibility::convex_coefficients;
use crate::halfspace::HalfSpaceProjection;
use crate::point::Point;
use crate::sampling;
use crate::spaces::NormSpec;

/// Largest family accepted by [`project_onto_intersection`].
pub const MAX_FAMILY: usize = 64;

/// Slack allowed when checking that iteration residuals decrease.
const MONOTONE_SLACK: f64 = 1e-12;

/// `Qx = Σ a_k Q_k x` with positive weights summing to one.
#[derive(Debug, Clone)]
pub struct AveragedMap {
    components: Vec<(f64, HalfSpaceProjection)>,
    space: NormSpec,
}

/// `a_k = 2^{-k}` for `k = 1..=len`, renormalized to sum to one.
pub fn default_weights(len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (1..=len).map(|k| 0.5f64.powi(k as i32)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / s).collect()
}

/// Builds `Σ a_k Q_k`. Without explicit weights the defaults of
/// [`default_weights`] are used.
pub fn averaged_map(projections: Vec<HalfSpaceProjection>, weights: Option<Vec<f64>>) -> Result<AveragedMap> {
    if projections.is_empty() {
        return Err(Error::EmptyList);
    }
    let weights = weights.unwrap_or_else(|| default_weights(projections.len()));
    if weights.len() != projections.len() {
        return Err(Error::WeightMismatch(format!(
            "{} weights for {} projections",
            weights.len(),
            projections.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::WeightMismatch(format!("weight {w} is not positive")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightMismatch(format!("weights sum to {total}, not 1")));
    }
    let space = projections[0].space().clone();
    for q in &projections[1..] {
        if q.space() != &space {
            return Err(Error::InvalidArgument("projections live in different spaces".into()));
        }
    }
    Ok(AveragedMap {
        components: weights.into_iter().zip(projections).collect(),
        space,
    })
}

impl AveragedMap {
    pub fn components(&self) -> &[(f64, HalfSpaceProjection)] {
        &self.components
    }

    pub fn space(&self) -> &NormSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `Qx`, computed as `x + Σ a_k (Q_k x − x)` so that common fixed points
    /// are reproduced exactly.
    pub fn apply(&self, x: &[f64]) -> Point {
        let mut out = x.to_vec();
        let mut buf = vec![0.0; x.len()];
        for (a, q) in &self.components {
            q.apply_into(x, &mut buf);
            for ((o, b), xi) in out.iter_mut().zip(&buf).zip(x) {
                *o += a * (b - xi);
            }
        }
        Point::from(out)
    }

    /// Largest violation `max_k (f_k(x) − d_k)⁺` of the family's constraints.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .fold(0.0f64, |m, (_, q)| m.max(q.halfspace().violation(x)))
    }

    /// The directions `y_k` of the component projections.
    pub fn directions(&self) -> Vec<Point> {
        self.components.iter().map(|(_, q)| q.direction().clone()).collect()
    }
}

/// Whether `0 ∈ conv{ys}`, decided by a feasibility solve.
pub fn zero_in_hull(ys: &[Point]) -> Result<bool> {
    let first = ys.first().ok_or(Error::EmptyList)?;
    for y in ys {
        check_dim(first.dim(), y.dim())?;
    }
    Ok(convex_coefficients(ys, &vec![0.0; first.dim()]).is_some())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// `λ` in `x ← (1 − λ) x + λ Qx`.
    pub relaxation: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            max_iter: 10_000,
            tol: 1e-10,
            relaxation: 0.5,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidArgument("relaxation must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub point: Point,
    pub iterations: usize,
    pub residual: f64,
    /// Whether every step's residual was at most the previous one (up to
    /// `1e-12`).
    pub monotone: bool,
}

/// Krasnoselskii–Mann iteration `x_{j+1} = (1 − λ) x_j + λ Q x_j`, stopping
/// once `‖x_{j+1} − x_j‖ ≤ tol`.
pub fn fixed_point(q: &AveragedMap, x0: &[f64], cfg: &IterationConfig) -> Result<FixedPoint> {
    cfg.validate()?;
    check_dim(q.dim(), x0.len())?;
    let mut x = x0.to_vec();
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut residual = f64::INFINITY;
    for j in 1..=cfg.max_iter {
        let qx = q.apply(&x);
        let next: Vec<f64> = x
            .iter()
            .zip(qx.iter())
            .map(|(a, b)| a + cfg.relaxation * (b - a))
            .collect();
        residual = q.space.distance(&next, &x);
        if residual > prev + MONOTONE_SLACK {
            monotone = false;
        }
        prev = residual;
        x = next;
        if residual <= cfg.tol {
            return Ok(FixedPoint {
                point: Point::from(x),
                iterations: j,
                residual,
                monotone,
            });
        }
    }
    Err(Error::MaxIterExceeded {
        point: Point::from(x),
        iterations: cfg.max_iter,
        residual,
    })
}

/// Tolerance for membership of a computed fixed point in the intersection.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// Runs the averaged map of `projections` (default weights) from `x` and
/// returns the limit, which must satisfy every constraint within `1e-6`.
pub fn project_onto_intersection(
    projections: &[HalfSpaceProjection],
    x: &[f64],
    cfg: &IterationConfig,
) -> Result<Point> {
    if projections.len() > MAX_FAMILY {
        return Err(Error::InvalidArgument(format!(
            "families are limited to {MAX_FAMILY} half-spaces, got {}",
            projections.len()
        )));
    }
    let q = averaged_map(projections.to_vec(), None)?;
    let fp = fixed_point(&q, x, cfg)?;
    let v = q.max_violation(&fp.point);
    if v > MEMBERSHIP_TOL {
        return Err(Error::InvalidProjection(format!(
            "fixed point violates a constraint by {v:.3e}; the averaged map has fixed points outside the intersection"
        )));
    }
    Ok(fp.point)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixCheckReport {
    pub trials: usize,
    /// Trials whose iteration reached residual `≤ 1e-8`.
    pub converged: usize,
    pub max_violation: f64,
    pub violators: Vec<Point>,
}

impl FixCheckReport {
    pub fn passed(&self) -> bool {
        self.violators.is_empty() && self.converged == self.trials
    }
}

/// Samples fixed points of the averaged map from random starts and checks
/// that each lies in every half-space. The ambient norm must be strictly
/// convex.
pub fn strictly_convex_fix_check(
    projections: &[HalfSpaceProjection],
    trials: usize,
    seed: u64,
) -> Result<FixCheckReport> {
    let q = averaged_map(projections.to_vec(), None)?;
    if !q.space().is_strictly_convex() {
        return Err(Error::InvalidBaseSpace("strictly convex ℓ_p with 1 < p < ∞ required".into()));
    }
    let cfg = IterationConfig {
        max_iter: 20_000,
        tol: 1e-10,
        relaxation: 0.5,
    };
    let mut rng = sampling::rng(seed);
    let mut report = FixCheckReport {
        trials,
        converged: 0,
        max_violation: 0.0,
        violators: Vec::new(),
    };
    for _ in 0..trials {
        let scale = rng.gen_range(0.5..5.0);
        let x0 = sampling::uniform_box(&mut rng, q.dim(), scale);
        let (point, residual) = match fixed_point(&q, &x0, &cfg) {
            Ok(fp) => (fp.point, fp.residual),
            Err(Error::MaxIterExceeded { point, residual, .. }) => (point, residual),
            Err(e) => return Err(e),
        };
        if residual > 1e-8 {
            continue;
        }
        report.converged += 1;
        let v = q.max_violation(&point);
        report.max_violation = report.max_violation.max(v);
        if v > MEMBERSHIP_TOL {
            report.violators.push(point);
        }
    }
    Ok(report)
}
