//! Convex bodies, their gauge functions, and outer approximation of a body by
//! supporting half-spaces at smooth boundary points.
//!
//! A body is a closed bounded convex set given by one of four representations.
//! Every body carries a Euclidean certificate `B(center, r) ⊆ C ⊆ B(center, R)`;
//! the gauge `inf{t > 0 : x/t ∈ C}` is then bracketed by `‖x‖/R₀` and `‖x‖/r₀`
//! where `r₀, R₀` are the radii re-centred at the origin, and found by
//! bisection on the membership test.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::feasibility;
use crate::point::{euclidean, Point};
use crate::sampling::{self, SphereSequence};
use crate::spaces::{smooth_gradient, DualFunctional, NormKind, NormSpec, FD_STEP};

/// Absolute tolerance used when a gauge value is needed without a caller tolerance.
pub const DEFAULT_GAUGE_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 200;

/// Relative slack (times the outer radius) for the public membership test.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Tolerance on the dual norm of a half-space functional.
pub const UNIT_DUAL_TOL: f64 = 1e-6;

/// Directions sampled when a support function has no closed form.
const ORACLE_SUPPORT_SAMPLES: usize = 4096;

pub type MembershipFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// `{x : f(x) ≤ d}` with `‖f‖* = 1` in `space`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    f: DualFunctional,
    d: f64,
    space: NormSpec,
}

impl HalfSpace {
    pub fn new(f: DualFunctional, d: f64, space: NormSpec) -> Result<Self> {
        check_dim(space.dim(), f.dim())?;
        if !d.is_finite() {
            return Err(Error::InvalidArgument("half-space level must be finite".into()));
        }
        let norm = space.dual_norm_unchecked(f.coeffs());
        if (norm - 1.0).abs() > UNIT_DUAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "half-space functional must have unit dual norm, got {norm}"
            )));
        }
        Ok(HalfSpace { f, d, space })
    }

    /// `{x : g(x) ≤ level}` rescaled so that the functional has unit dual norm.
    pub fn normalized(g: &DualFunctional, level: f64, space: &NormSpec) -> Result<Self> {
        check_dim(space.dim(), g.dim())?;
        if g.is_zero() {
            return Err(Error::ZeroFunctional);
        }
        let s = space.dual_norm_unchecked(g.coeffs());
        HalfSpace::new(g.scaled(1.0 / s), level / s, space.clone())
    }

    pub fn functional(&self) -> &DualFunctional {
        &self.f
    }

    pub fn level(&self) -> f64 {
        self.d
    }

    pub fn space(&self) -> &NormSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// `f(x) − d`; nonpositive exactly on the half-space.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.f.apply(x) - self.d
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.violation(x) <= 0.0
    }
}

#[derive(Clone)]
pub enum Shape {
    Vertices(Vec<Point>),
    NormBall {
        space: NormSpec,
        center: Point,
        radius: f64,
    },
    HalfSpaces {
        halfspaces: Vec<HalfSpace>,
        vertices: Vec<Point>,
    },
    Oracle(MembershipFn),
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Vertices(v) => f.debug_tuple("Vertices").field(v).finish(),
            Shape::NormBall { space, center, radius } => f
                .debug_struct("NormBall")
                .field("space", space)
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Shape::HalfSpaces { halfspaces, .. } => {
                f.debug_tuple("HalfSpaces").field(&halfspaces.len()).finish()
            }
            Shape::Oracle(_) => f.write_str("Oracle(..)"),
        }
    }
}

/// A closed bounded convex body with a Euclidean interior certificate.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    shape: Shape,
    dim: usize,
    /// `B(center, inner) ⊆ body ⊆ B(center, outer)` in the Euclidean norm.
    center: Point,
    inner: f64,
    outer: f64,
}

impl ConvexBody {
    /// Convex hull of `vertices`. The origin must be an interior point.
    pub fn from_vertices(vertices: Vec<Point>) -> Result<Self> {
        let dim = vertices.first().ok_or(Error::EmptyList)?.dim();
        for v in &vertices {
            check_dim(dim, v.dim())?;
        }
        let outer = vertices.iter().map(|v| v.euclidean_norm()).fold(0.0, f64::max);
        if outer == 0.0 {
            return Err(Error::OriginNotInterior);
        }
        // largest t with ±t e_i in the hull, per axis; the cross-polytope
        // spanned by those points contains the ball of radius t_min / √n
        let mut reach = f64::INFINITY;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                let inside = |t: f64, e: &mut Vec<f64>| {
                    e[i] = sign * t;
                    feasibility::convex_coefficients(&vertices, e).is_some()
                };
                let (mut lo, mut hi) = (0.0, outer);
                if !inside(outer * 1e-9, &mut e) {
                    return Err(Error::OriginNotInterior);
                }
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if inside(mid, &mut e) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                reach = reach.min(lo);
            }
        }
        let inner = reach / (dim as f64).sqrt() * (1.0 - 1e-9);
        Ok(ConvexBody {
            shape: Shape::Vertices(vertices),
            dim,
            center: Point::zeros(dim),
            inner,
            outer,
        })
    }

    /// `{x : ‖x − center‖ ≤ radius}` in `space`.
    pub fn norm_ball(space: NormSpec, center: Point, radius: f64) -> Result<Self> {
        check_dim(space.dim(), center.dim())?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
        }
        let (lo, hi) = space.euclidean_equivalence();
        let dim = space.dim();
        let body = ConvexBody {
            dim,
            inner: radius / hi,
            outer: radius / lo,
            center: center.clone(),
            shape: Shape::NormBall { space, center, radius },
        };
        body.origin_radii()?;
        Ok(body)
    }

    pub fn unit_ball(space: NormSpec) -> Self {
        let dim = space.dim();
        ConvexBody::norm_ball(space, Point::zeros(dim), 1.0).expect("unit ball is valid")
    }

    /// Intersection of half-spaces. Must be bounded with the origin inside.
    pub fn from_halfspaces(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        let dim = halfspaces.first().ok_or(Error::EmptyList)?.dim();
        for h in &halfspaces {
            check_dim(dim, h.dim())?;
        }
        if halfspaces.iter().any(|h| h.level() <= 0.0) {
            return Err(Error::OriginNotInterior);
        }
        // bounded iff the normals positively span R^n
        let normals: Vec<Point> = halfspaces
            .iter()
            .map(|h| Point::from(h.functional().coeffs().to_vec()))
            .collect();
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[i] = sign;
                if !feasibility::in_cone(&normals, &e) {
                    return Err(Error::Unbounded);
                }
            }
        }
        let vertices = enumerate_vertices(&halfspaces, dim);
        if vertices.is_empty() {
            return Err(Error::Unbounded);
        }
        let inner = halfspaces
            .iter()
            .map(|h| h.level() / euclidean(h.functional().coeffs()))
            .fold(f64::INFINITY, f64::min);
        let outer = vertices.iter().map(|v| v.euclidean_norm()).fold(0.0, f64::max);
        Ok(ConvexBody {
            shape: Shape::HalfSpaces { halfspaces, vertices },
            dim,
            center: Point::zeros(dim),
            inner,
            outer,
        })
    }

    /// The box `∏ [lower_i, upper_i]` as an intersection of coordinate half-spaces.
    pub fn axis_box(lower: &[f64], upper: &[f64], space: &NormSpec) -> Result<Self> {
        check_dim(space.dim(), lower.len())?;
        check_dim(space.dim(), upper.len())?;
        let n = space.dim();
        let mut hs = Vec::with_capacity(2 * n);
        for i in 0..n {
            if lower[i] >= upper[i] {
                return Err(Error::InvalidBody(format!("empty box along coordinate {i}")));
            }
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            hs.push(HalfSpace::normalized(&DualFunctional::from(e.clone()), upper[i], space)?);
            e[i] = -1.0;
            hs.push(HalfSpace::normalized(&DualFunctional::from(e), -lower[i], space)?);
        }
        ConvexBody::from_halfspaces(hs)
    }

    /// A body known only through a membership predicate, with the caller's
    /// certificate `B(0, inner) ⊆ body ⊆ B(0, outer)`.
    pub fn from_oracle(dim: usize, membership: MembershipFn, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer >= inner && outer.is_finite()) {
            return Err(Error::InvalidBody(format!(
                "need 0 < inner <= outer < inf, got inner = {inner}, outer = {outer}"
            )));
        }
        Ok(ConvexBody {
            shape: Shape::Oracle(membership),
            dim,
            center: Point::zeros(dim),
            inner,
            outer,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Euclidean certificate `(center, inner, outer)`.
    pub fn certificate(&self) -> (&Point, f64, f64) {
        (&self.center, self.inner, self.outer)
    }

    /// Vertices for polytope representations.
    pub fn vertices(&self) -> Option<&[Point]> {
        match &self.shape {
            Shape::Vertices(v) => Some(v),
            Shape::HalfSpaces { vertices, .. } => Some(vertices),
            _ => None,
        }
    }

    /// Radii `(r₀, R₀)` with `B(0, r₀) ⊆ body ⊆ B(0, R₀)`.
    pub fn origin_radii(&self) -> Result<(f64, f64)> {
        let shift = self.center.euclidean_norm();
        let inner = match &self.shape {
            Shape::NormBall { space, center, radius } => {
                let (_, hi) = space.euclidean_equivalence();
                (radius - space.norm_unchecked(&(-center))) / hi
            }
            _ => self.inner - shift,
        };
        if inner <= 0.0 {
            return Err(Error::OriginNotInterior);
        }
        Ok((inner, self.outer + shift))
    }

    /// Membership with slack `1e-9 · R` so that computed boundary points count
    /// as members.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_with_slack(x, MEMBERSHIP_SLACK * self.outer))
    }

    fn contains_with_slack(&self, x: &[f64], slack: f64) -> bool {
        match &self.shape {
            Shape::Vertices(v) => {
                if slack == 0.0 {
                    feasibility::convex_coefficients(v, x).is_some()
                } else {
                    // shrink towards the centre by the slack, which moves x inwards
                    let n = euclidean(&crate::point::sub(x, &self.center)).max(1e-300);
                    let t = (1.0 - slack / n).max(0.0);
                    let y: Vec<f64> = x
                        .iter()
                        .zip(self.center.iter())
                        .map(|(a, c)| c + t * (a - c))
                        .collect();
                    feasibility::convex_coefficients(v, &y).is_some()
                }
            }
            Shape::NormBall { space, center, radius } => space.distance(x, center) <= radius + slack,
            Shape::HalfSpaces { halfspaces, .. } => {
                halfspaces.iter().all(|h| h.violation(x) <= slack)
            }
            Shape::Oracle(m) => m(x),
        }
    }

    /// Gauge `inf{t > 0 : x/t ∈ C}` within absolute tolerance `tol`, by
    /// bisection on `[‖x‖₂/R₀, ‖x‖₂/r₀]`.
    pub fn gauge(&self, x: &[f64], tol: f64) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("gauge tolerance must be positive".into()));
        }
        let (r0, big_r0) = self.origin_radii()?;
        Ok(self.bisect_gauge(x, tol, r0, big_r0))
    }

    pub(crate) fn gauge_value(&self, x: &[f64]) -> f64 {
        let (r0, big_r0) = self.origin_radii().expect("origin checked at construction");
        self.bisect_gauge(x, DEFAULT_GAUGE_TOL, r0, big_r0)
    }

    fn bisect_gauge(&self, x: &[f64], tol: f64, r0: f64, big_r0: f64) -> f64 {
        let nx = euclidean(x);
        if nx == 0.0 {
            return 0.0;
        }
        if let Some(g) = self.exact_gauge(x) {
            return g;
        }
        let mut lo = nx / big_r0 * (1.0 - 1e-9);
        let mut hi = nx / r0 * (1.0 + 1e-9);
        let mut y = vec![0.0; x.len()];
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= 2.0 * tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi = xi / mid;
            }
            if self.contains_with_slack(&y, 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn exact_gauge(&self, x: &[f64]) -> Option<f64> {
        match &self.shape {
            Shape::HalfSpaces { halfspaces, .. } if halfspaces.iter().all(|h| h.level() > 0.0) => Some(
                halfspaces
                    .iter()
                    .fold(0.0f64, |m, h| m.max(h.functional().apply(x) / h.level())),
            ),
            Shape::NormBall { space, center, radius } if center.is_zero() => {
                Some(space.norm_unchecked(x) / radius)
            }
            _ => None,
        }
    }

    /// `direction / gauge(direction)`, a point of the boundary.
    pub fn boundary_point(&self, direction: &[f64]) -> Result<Point> {
        check_dim(self.dim, direction.len())?;
        if direction.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroVector);
        }
        let g = self.gauge(direction, DEFAULT_GAUGE_TOL)?;
        Ok(Point::from(direction.iter().map(|c| c / g).collect::<Vec<_>>()))
    }

    /// Support function `h(u) = sup_{x ∈ C} u·x`. Exact except for oracle
    /// bodies, where it is a sampled lower bound.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        check_dim(self.dim, u.len())?;
        Ok(self.support_unchecked(u))
    }

    pub(crate) fn support_unchecked(&self, u: &[f64]) -> f64 {
        match &self.shape {
            Shape::Vertices(v) | Shape::HalfSpaces { vertices: v, .. } => {
                v.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max)
            }
            Shape::NormBall { space, center, radius } => {
                center.dot(u) + radius * space.dual_norm_unchecked(u)
            }
            Shape::Oracle(_) => {
                let along = self.boundary_point(u).map(|z| z.dot(u)).unwrap_or(0.0);
                SphereSequence::new(self.dim)
                    .take(ORACLE_SUPPORT_SAMPLES)
                    .map(|d| {
                        let z = d.scaled(1.0 / self.gauge_value(&d));
                        z.dot(u)
                    })
                    .fold(along, f64::max)
            }
        }
    }

    /// Supporting half-space at the boundary point `z`, from the normalized
    /// gradient of the gauge.
    pub fn supporting_halfspace(&self, space: &NormSpec, z: &[f64]) -> Result<HalfSpace> {
        check_dim(self.dim, z.len())?;
        check_dim(self.dim, space.dim())?;
        let g = self.gauge(z, DEFAULT_GAUGE_TOL)?;
        if (g - 1.0).abs() > 1e-4 {
            return Err(Error::NotOnBoundary { gauge: g });
        }
        let step = FD_STEP * euclidean(z).max(1.0);
        let grad = smooth_gradient(|v| self.gauge_value(v), z, step)?;
        let f = DualFunctional::from(grad).normalized(space)?;
        let d = f.apply(z);
        HalfSpace::new(f, d, space.clone())
    }

    /// Translate by `v`. The interior certificate moves with the body, so the
    /// result may no longer contain the origin; gauge evaluation then fails with
    /// [`Error::OriginNotInterior`].
    pub fn translate(&self, v: &[f64]) -> Result<ConvexBody> {
        check_dim(self.dim, v.len())?;
        let shift = |p: &Point| p.add_scaled(1.0, v);
        let shape = match &self.shape {
            Shape::Vertices(vs) => Shape::Vertices(vs.iter().map(shift).collect()),
            Shape::NormBall { space, center, radius } => Shape::NormBall {
                space: space.clone(),
                center: shift(center),
                radius: *radius,
            },
            Shape::HalfSpaces { halfspaces, vertices } => Shape::HalfSpaces {
                halfspaces: halfspaces
                    .iter()
                    .map(|h| HalfSpace {
                        f: h.f.clone(),
                        d: h.d + h.f.apply(v),
                        space: h.space.clone(),
                    })
                    .collect(),
                vertices: vertices.iter().map(shift).collect(),
            },
            Shape::Oracle(m) => {
                let m = m.clone();
                let v = v.to_vec();
                Shape::Oracle(Arc::new(move |x: &[f64]| {
                    let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - b).collect();
                    m(&y)
                }))
            }
        };
        Ok(ConvexBody {
            shape,
            dim: self.dim,
            center: shift(&self.center),
            inner: self.inner,
            outer: self.outer,
        })
    }

    /// The image `t·C`. Zero collapses the body and is rejected.
    pub fn scale(&self, t: f64) -> Result<ConvexBody> {
        if t == 0.0 {
            return Err(Error::DegenerateBody);
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument("scale factor must be finite".into()));
        }
        let shape = match &self.shape {
            Shape::Vertices(vs) => Shape::Vertices(vs.iter().map(|p| p.scaled(t)).collect()),
            Shape::NormBall { space, center, radius } => {
                if t < 0.0 && matches!(space.kind(), NormKind::Gauge(_)) {
                    // -B is a ball of the reflected gauge only for symmetric bodies
                    return Err(Error::InvalidArgument(
                        "negative scaling of a gauge ball is not representable".into(),
                    ));
                }
                Shape::NormBall {
                    space: space.clone(),
                    center: center.scaled(t),
                    radius: radius * t.abs(),
                }
            }
            Shape::HalfSpaces { halfspaces, vertices } => Shape::HalfSpaces {
                halfspaces: halfspaces
                    .iter()
                    .map(|h| HalfSpace {
                        f: h.f.scaled(t.signum()),
                        d: h.d * t.abs(),
                        space: h.space.clone(),
                    })
                    .collect(),
                vertices: vertices.iter().map(|p| p.scaled(t)).collect(),
            },
            Shape::Oracle(m) => {
                let m = m.clone();
                Shape::Oracle(Arc::new(move |x: &[f64]| {
                    let y: Vec<f64> = x.iter().map(|a| a / t).collect();
                    m(&y)
                }))
            }
        };
        Ok(ConvexBody {
            shape,
            dim: self.dim,
            center: self.center.scaled(t),
            inner: self.inner * t.abs(),
            outer: self.outer * t.abs(),
        })
    }
}

/// Vertices of a bounded polyhedron `{x : f_i(x) ≤ d_i}` by brute force over
/// all `n`-subsets of constraints.
fn enumerate_vertices(halfspaces: &[HalfSpace], dim: usize) -> Vec<Point> {
    let scale = halfspaces.iter().map(|h| h.level().abs()).fold(1.0, f64::max);
    let mut out: Vec<Point> = Vec::new();
    for subset in (0..halfspaces.len()).combinations(dim) {
        let a = DMatrix::from_fn(dim, dim, |r, c| halfspaces[subset[r]].functional().coeffs()[c]);
        let b = DVector::from_fn(dim, |r, _| halfspaces[subset[r]].level());
        let lu = a.clone().lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if halfspaces.iter().all(|h| h.violation(&x) <= 1e-9 * scale)
            && !out.iter().any(|p| {
                p.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= 1e-9 * scale
            })
        {
            out.push(Point::from(x));
        }
    }
    out
}

/// Up to `count` supporting half-spaces of `body` at boundary points in the
/// given directions. A direction whose boundary point is a kink is perturbed
/// by `1e-3` (relative) and retried up to five times.
pub fn decompose<I>(
    body: &ConvexBody,
    space: &NormSpec,
    count: usize,
    directions: I,
    seed: u64,
) -> Result<Vec<HalfSpace>>
where
    I: IntoIterator<Item = Point>,
{
    if count == 0 {
        return Err(Error::InvalidArgument("decomposition needs at least one half-space".into()));
    }
    check_dim(body.dim(), space.dim())?;
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut tried = 0;
    for dir in directions.into_iter().take(count) {
        tried += 1;
        check_dim(body.dim(), dir.dim())?;
        let mut d = dir;
        for attempt in 0..=5 {
            match body
                .boundary_point(&d)
                .and_then(|z| body.supporting_halfspace(space, &z))
            {
                Ok(h) => {
                    out.push(h);
                    break;
                }
                Err(Error::NotSmooth { .. }) if attempt < 5 => {
                    let len = d.euclidean_norm();
                    let jitter = sampling::uniform_box(&mut rng, d.dim(), 1.0);
                    let jl = jitter.euclidean_norm().max(1e-12);
                    d = d.add_scaled(1e-3 * len / jl, &jitter);
                }
                Err(Error::NotSmooth { .. }) => break,
                Err(e) => return Err(e),
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoSmoothPoints { tried });
    }
    Ok(out)
}

/// Sampled Hausdorff distance between two convex bodies in the norm of
/// `space`, as `max |h_A(u) − h_B(u)|` over sampled `u` on the dual unit sphere.
///
/// The estimate never exceeds the true distance; for convex bodies the gap
/// shrinks like the covering radius of the sampled directions. Extreme points
/// of the `ℓ_1` and `ℓ_∞` dual balls are always included.
pub fn hausdorff_estimate(a: &ConvexBody, b: &ConvexBody, space: &NormSpec, samples: usize) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), space.dim())?;
    let n = space.dim();
    let mut dirs: Vec<Point> = SphereSequence::new(n).take(samples).collect();
    for i in 0..n {
        dirs.push(Point::basis(n, i));
        dirs.push(-&Point::basis(n, i));
    }
    if n <= 12 {
        dirs.extend(sampling::sign_vectors(n));
    }
    let mut best: f64 = 0.0;
    for u in dirs {
        let s = space.dual_norm_unchecked(&u);
        let u = u.scaled(1.0 / s);
        best = best.max((a.support_unchecked(&u) - b.support_unchecked(&u)).abs());
    }
    Ok(best)
}

pub(crate) fn random_direction<R: Rng>(rng: &mut R, n: usize) -> Point {
    loop {
        let v = sampling::uniform_box(rng, n, 1.0);
        let l = v.euclidean_norm();
        if l > 1e-3 && l <= 1.0 {
            return v.scaled(1.0 / l);
        }
    }
}
