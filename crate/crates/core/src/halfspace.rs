//! Norm-one projections onto hyperplanes `ker f` and the contractive
//! projections onto half-spaces `{f ≤ d}` they induce.
//!
//! A norm-one projection onto `ker f` has the form `P w = w − f(w) y` with
//! `f(y) = 1`. Given one, the half-space `{f ≤ d}` admits the nonexpansive
//! retraction
//!
//! ```text
//! Q x = x                   if f(x) ≤ d
//! Q x = x − f(x − z) y      otherwise, where f(z) = d.
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gauge::HalfSpace;
use crate::point::Point;
use crate::sampling::{self, SphereSequence};
use crate::spaces::{DualFunctional, Exponent, NormSpec};

/// Operator norms up to `1 + CERTIFY_TOL` count as one.
pub const CERTIFY_TOL: f64 = 1e-6;

/// Relative threshold below which a coefficient counts as zero.
const ZERO_COEFF: f64 = 1e-12;

fn support_size(f: &DualFunctional) -> Vec<usize> {
    let m = f.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > ZERO_COEFF * m)
        .map(|(i, _)| i)
        .collect()
}

/// In `ℓ_1ⁿ`, `ker f` is one-complemented iff `f` has at most two nonzero
/// coordinates.
pub fn is_one_complemented_hyperplane_l1(f: &DualFunctional) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroFunctional);
    }
    Ok(support_size(f).len() <= 2)
}

/// Smallest index `j` with `|f_j| ≥ Σ_{i≠j} |f_i|`, equality included.
pub fn dominated_coordinate(f: &DualFunctional) -> Option<usize> {
    let c = f.coeffs();
    let total: f64 = c.iter().map(|v| v.abs()).sum();
    let slack = 1e-12 * total.max(1.0);
    (0..c.len()).find(|&j| c[j].abs() >= total - c[j].abs() - slack)
}

/// In `ℓ_∞ⁿ`, `ker f` is one-complemented iff some coordinate dominates the
/// sum of the others.
pub fn is_one_complemented_hyperplane_linf(f: &DualFunctional) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroFunctional);
    }
    Ok(dominated_coordinate(f).is_some())
}

/// `w ↦ w − f(w) y` with `f(y) = 1`: a projection onto `ker f`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProjection {
    f: DualFunctional,
    y: Point,
}

impl KernelProjection {
    pub fn new(f: DualFunctional, y: Point) -> Result<Self> {
        check_dim(f.dim(), y.dim())?;
        let fy = f.apply(&y);
        if (fy - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidProjection(format!("need f(y) = 1, got {fy}")));
        }
        Ok(KernelProjection { f, y })
    }

    pub fn functional(&self) -> &DualFunctional {
        &self.f
    }

    pub fn direction(&self) -> &Point {
        &self.y
    }

    pub fn apply(&self, w: &[f64]) -> Point {
        Point::from(w.to_vec()).add_scaled(-self.f.apply(w), &self.y)
    }

    fn apply_into(&self, w: &[f64], out: &mut [f64]) {
        let fw = self.f.apply(w);
        for ((o, a), b) in out.iter_mut().zip(w).zip(self.y.iter()) {
            *o = a - fw * b;
        }
    }
}

/// Unit vectors at which operator norms are evaluated.
#[derive(Debug, Clone)]
pub struct Probes {
    points: Vec<Point>,
    exact: bool,
}

impl Probes {
    /// Sign vectors (`n ≤ 16`), signed basis vectors and `samples`
    /// low-discrepancy sphere points, all scaled to unit norm. The sphere
    /// points are left out when the first two already make the estimate exact.
    ///
    /// Sign vectors are the extreme points of the `ℓ_∞` ball and signed basis
    /// vectors those of the `ℓ_1` ball, so for those two norms the estimate of
    /// a linear operator's norm is exact.
    pub fn new(space: &NormSpec, samples: usize) -> Self {
        let n = space.dim();
        let mut raw: Vec<Point> = Vec::new();
        if n <= 16 {
            raw.extend(sampling::sign_vectors(n));
        }
        for i in 0..n {
            raw.push(Point::basis(n, i));
            raw.push(-&Point::basis(n, i));
        }
        let exact = match space.exponent() {
            Some(Exponent::Infinity) => n <= 16,
            Some(Exponent::Finite(p)) => p == 1.0,
            None => false,
        };
        if !exact {
            raw.extend(SphereSequence::new(n).take(samples));
        }
        let points = raw
            .into_iter()
            .map(|p| {
                let s = space.norm_unchecked(&p);
                p.scaled(1.0 / s)
            })
            .collect();
        Probes { points, exact }
    }

    /// Whether the probe set contains every extreme point of the unit ball.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn operator_norm(&self, space: &NormSpec, p: &KernelProjection) -> f64 {
        let mut buf = vec![0.0; space.dim()];
        self.points.iter().fold(0.0f64, |m, w| {
            p.apply_into(w, &mut buf);
            m.max(space.norm_unchecked(&buf))
        })
    }
}

/// Sampled operator norm `sup_{‖w‖=1} ‖w − f(w) y‖`; a lower bound in general
/// and exact in `ℓ_1` and `ℓ_∞`.
pub fn operator_norm_estimate(space: &NormSpec, p: &KernelProjection, samples: usize) -> Result<f64> {
    check_dim(space.dim(), p.f.dim())?;
    Ok(Probes::new(space, samples).operator_norm(space, p))
}

/// Limits for [`find_norm_one_projection`]'s search outside the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBudget {
    pub restarts: usize,
    /// Probe points used while searching.
    pub search_samples: usize,
    /// Probe points used for the final certification.
    pub certify_samples: usize,
    /// Total objective evaluations across all restarts.
    pub max_evaluations: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 200,
            search_samples: 512,
            certify_samples: 20_000,
            max_evaluations: 20_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionSource {
    ClosedForm,
    Search,
}

/// A kernel projection whose sampled operator norm is at most `1 + 1e-6`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormOneProjection {
    projection: KernelProjection,
    space: NormSpec,
    norm_estimate: f64,
    source: ProjectionSource,
}

impl NormOneProjection {
    pub fn projection(&self) -> &KernelProjection {
        &self.projection
    }

    pub fn space(&self) -> &NormSpec {
        &self.space
    }

    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    pub fn source(&self) -> ProjectionSource {
        self.source
    }

    pub fn apply(&self, w: &[f64]) -> Point {
        self.projection.apply(w)
    }
}

fn closed_form_direction(space: &NormSpec, f: &DualFunctional) -> Option<Point> {
    let c = f.coeffs();
    let n = c.len();
    match space.exponent()? {
        Exponent::Finite(p) if p == 2.0 => {
            let s: f64 = c.iter().map(|v| v * v).sum();
            Some(Point::from(c.iter().map(|v| v / s).collect::<Vec<_>>()))
        }
        Exponent::Infinity => {
            let j = dominated_coordinate(f)?;
            let mut y = vec![0.0; n];
            y[j] = 1.0 / c[j];
            Some(Point::from(y))
        }
        Exponent::Finite(p) => {
            // ℓ_p with one or two nonzero coordinates: inside the span of those
            // coordinates, y is the kernel direction of the functional norming
            // ker f, i.e. y ∝ (sgn a |a|^{p-1}, sgn b |b|^{p-1})
            let supp = support_size(f);
            match supp.as_slice() {
                [i] => {
                    let mut y = vec![0.0; n];
                    y[*i] = 1.0 / c[*i];
                    Some(Point::from(y))
                }
                [i, j] => {
                    let (a, b) = (c[*i], c[*j]);
                    let denom = a.abs().powf(p) + b.abs().powf(p);
                    let mut y = vec![0.0; n];
                    y[*i] = a.signum() * a.abs().powf(p - 1.0) / denom;
                    y[*j] = b.signum() * b.abs().powf(p - 1.0) / denom;
                    Some(Point::from(y))
                }
                _ => None,
            }
        }
    }
}

/// Finds `y` with `f(y) = 1` such that `w ↦ w − f(w) y` has norm one.
///
/// Closed forms cover `ℓ_2` (orthogonal projection), `ℓ_∞` with a dominated
/// coordinate `j` (`y = e_j / f_j`) and `ℓ_p` functionals with at most two
/// nonzero coordinates. Anything else goes through a pattern search over
/// the affine slice `{f(y) = 1}` that minimises the sampled operator norm. On
/// failure, [`Error::NotFound`] carries the smallest estimate reached.
pub fn find_norm_one_projection(
    space: &NormSpec,
    f: &DualFunctional,
    budget: &SearchBudget,
) -> Result<NormOneProjection> {
    check_dim(space.dim(), f.dim())?;
    if f.is_zero() {
        return Err(Error::ZeroFunctional);
    }
    let certify = Probes::new(space, budget.certify_samples);
    if let Some(y) = closed_form_direction(space, f) {
        let projection = KernelProjection::new(f.clone(), y)?;
        let norm_estimate = certify.operator_norm(space, &projection);
        if norm_estimate <= 1.0 + CERTIFY_TOL {
            return Ok(NormOneProjection {
                projection,
                space: space.clone(),
                norm_estimate,
                source: ProjectionSource::ClosedForm,
            });
        }
    }

    let probes = Probes::new(space, budget.search_samples);
    let y = search_direction(space, f, &probes, budget);
    let projection = KernelProjection::new(f.clone(), y)?;
    let norm_estimate = certify.operator_norm(space, &projection);
    if norm_estimate <= 1.0 + CERTIFY_TOL {
        Ok(NormOneProjection {
            projection,
            space: space.clone(),
            norm_estimate,
            source: ProjectionSource::Search,
        })
    } else {
        Err(Error::NotFound { estimate: norm_estimate })
    }
}

fn search_direction(space: &NormSpec, f: &DualFunctional, probes: &Probes, budget: &SearchBudget) -> Point {
    let c = f.coeffs();
    let n = c.len();
    let pivot = (0..n)
        .max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs()))
        .expect("nonempty");
    // y(t) = e_pivot / f_pivot + Σ_k t_k (e_k − f_k/f_pivot e_pivot), k ≠ pivot
    let free: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
    let to_y = |t: &[f64]| -> Point {
        let mut y = vec![0.0; n];
        y[pivot] = 1.0 / c[pivot];
        for (tk, &k) in t.iter().zip(&free) {
            y[k] += tk;
            y[pivot] -= tk * c[k] / c[pivot];
        }
        Point::from(y)
    };
    let mut evaluations = 0usize;
    let mut objective = |t: &[f64]| -> f64 {
        evaluations += 1;
        let p = KernelProjection { f: f.clone(), y: to_y(t) };
        probes.operator_norm(space, &p)
    };

    if free.is_empty() {
        return to_y(&[]);
    }
    let mut rng = sampling::rng(budget.seed);
    // start from the Euclidean closed form; later restarts are random
    let s: f64 = c.iter().map(|v| v * v).sum();
    let euclid: Vec<f64> = free.iter().map(|&k| c[k] / s).collect();

    let mut best_t = euclid.clone();
    let mut best = objective(&best_t);
    let evals_per_restart = (budget.max_evaluations / budget.restarts.max(1)).max(8 * free.len());
    let mut used = 0usize;
    for restart in 0..budget.restarts.max(1) {
        if used >= budget.max_evaluations {
            break;
        }
        let mut t: Vec<f64> = if restart == 0 {
            euclid.clone()
        } else {
            (0..free.len()).map(|_| rng.gen_range(-1.0..1.0) / c[pivot].abs()).collect()
        };
        let mut val = objective(&t);
        let mut step = 0.5 / c[pivot].abs();
        let mut local = 1usize;
        while step > 1e-10 && local < evals_per_restart {
            let mut improved = false;
            for k in 0..t.len() {
                for sgn in [1.0, -1.0] {
                    let mut trial = t.clone();
                    trial[k] += sgn * step;
                    let v = objective(&trial);
                    local += 1;
                    if v < val {
                        val = v;
                        t = trial;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                // random directions get past ridges of the max-type objective
                for _ in 0..2 * t.len() {
                    let d = crate::gauge::random_direction(&mut rng, t.len());
                    let trial: Vec<f64> = t.iter().zip(d.iter()).map(|(a, b)| a + step * b).collect();
                    let v = objective(&trial);
                    local += 1;
                    if v < val {
                        val = v;
                        t = trial;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        used += local;
        if val < best {
            best = val;
            best_t = t;
        }
        if best <= 1.0 + 1e-9 {
            break;
        }
    }
    to_y(&best_t)
}

/// Contractive projection onto the half-space `{f ≤ d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceProjection {
    halfspace: HalfSpace,
    anchor: Point,
    y: Point,
    kernel_norm: f64,
}

impl HalfSpaceProjection {
    /// Pairs a half-space with a certified norm-one projection onto the kernel
    /// of its functional. The anchor is `z = d·y`, so `f(z) = d`.
    pub fn new(halfspace: HalfSpace, kernel: &NormOneProjection) -> Result<Self> {
        let f = halfspace.functional().coeffs();
        let g = kernel.projection().functional().coeffs();
        check_dim(f.len(), g.len())?;
        let scale = f.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if f.iter().zip(g).any(|(a, b)| (a - b).abs() > 1e-12 * scale) {
            return Err(Error::InvalidProjection(
                "kernel projection belongs to a different functional".into(),
            ));
        }
        if kernel.space() != halfspace.space() {
            return Err(Error::InvalidProjection(
                "kernel projection was certified in a different space".into(),
            ));
        }
        if kernel.norm_estimate() > 1.0 + CERTIFY_TOL {
            return Err(Error::InvalidProjection(format!(
                "kernel projection has norm {} > 1",
                kernel.norm_estimate()
            )));
        }
        let y = kernel.projection().direction().clone();
        let anchor = y.scaled(halfspace.level());
        Ok(HalfSpaceProjection {
            halfspace,
            anchor,
            y,
            kernel_norm: kernel.norm_estimate(),
        })
    }

    /// Finds a norm-one kernel projection for the half-space and pairs it.
    pub fn certify(halfspace: HalfSpace, budget: &SearchBudget) -> Result<Self> {
        let kernel = find_norm_one_projection(halfspace.space(), halfspace.functional(), budget)?;
        HalfSpaceProjection::new(halfspace, &kernel)
    }

    pub fn halfspace(&self) -> &HalfSpace {
        &self.halfspace
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    /// The direction `y` with `f(y) = 1`.
    pub fn direction(&self) -> &Point {
        &self.y
    }

    pub fn kernel_norm(&self) -> f64 {
        self.kernel_norm
    }

    pub fn space(&self) -> &NormSpec {
        self.halfspace.space()
    }

    pub fn dim(&self) -> usize {
        self.y.dim()
    }

    /// `Qx`; the boundary `f(x) = d` belongs to the identity branch.
    pub fn apply(&self, x: &[f64]) -> Point {
        let mut out = x.to_vec();
        self.apply_into(x, &mut out);
        Point::from(out)
    }

    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let f = self.halfspace.functional();
        let fx = f.apply(x);
        out.copy_from_slice(x);
        if fx > self.halfspace.level() {
            let t = fx - f.apply(&self.anchor);
            for (o, yi) in out.iter_mut().zip(self.y.iter()) {
                *o -= t * yi;
            }
        }
    }
}

/// Retraction onto `ker f` built from a selection `P` into `{f ≤ 0}`.
///
/// Points of the kernel are returned unchanged. For `f(x) > 0`, the result is
/// the point of the segment `[x, Px]` where `f` vanishes; for `f(x) < 0` the
/// same is done with the mirrored selection `x ↦ −P(−x)`.
pub fn kernel_retraction<P>(f: &DualFunctional, selection: P, x: &[f64]) -> Result<Point>
where
    P: Fn(&[f64]) -> Point,
{
    check_dim(f.dim(), x.len())?;
    let fx = f.apply(x);
    if fx == 0.0 {
        return Ok(Point::from(x.to_vec()));
    }
    let (w, fw) = if fx > 0.0 {
        let w = selection(x);
        let fw = f.apply(&w);
        (w, fw)
    } else {
        let neg: Vec<f64> = x.iter().map(|c| -c).collect();
        let w = -&selection(&neg);
        let fw = f.apply(&w);
        (w, -fw)
    };
    // fw here is f evaluated on the side that must not cross zero
    let scale = fx.abs().max(1.0);
    if fw > 1e-12 * scale {
        return Err(Error::SelectionInvalid { value: fw });
    }
    if fw.abs() <= 1e-15 * scale {
        return Ok(w);
    }
    let fw_signed = if fx > 0.0 { fw } else { -fw };
    // α f(x) + (1 − α) f(w) = 0
    let alpha = fw_signed / (fw_signed - fx);
    Ok(Point::from(
        x.iter()
            .zip(w.iter())
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect::<Vec<_>>(),
    ))
}

/// Positively homogeneous extension `x ↦ ‖x‖ P₀(x/‖x‖)` of a map defined on
/// the unit sphere of `space`.
pub fn homogeneous_extension<P>(space: &NormSpec, sphere_selection: P, x: &[f64]) -> Result<Point>
where
    P: Fn(&[f64]) -> Point,
{
    let nx = space.norm(x)?;
    if nx == 0.0 {
        return Ok(Point::zeros(x.len()));
    }
    let u: Vec<f64> = x.iter().map(|c| c / nx).collect();
    Ok(sphere_selection(&u).scaled(nx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn df(v: &[f64]) -> DualFunctional {
        DualFunctional::from(v.to_vec())
    }

    #[test]
    fn l1_predicate() {
        assert!(is_one_complemented_hyperplane_l1(&df(&[1.0, 1.0, 0.0])).unwrap());
        assert!(!is_one_complemented_hyperplane_l1(&df(&[1.0, 1.0, 1.0])).unwrap());
        assert!(matches!(
            is_one_complemented_hyperplane_l1(&df(&[0.0, 0.0, 0.0])),
            Err(Error::ZeroFunctional)
        ));
    }

    #[test]
    fn linf_predicate() {
        let sixth = 1.0 / 6.0;
        assert!(is_one_complemented_hyperplane_linf(&df(&[0.5, sixth, sixth, sixth])).unwrap());
        assert!(is_one_complemented_hyperplane_linf(&df(&[1.0, 0.0, 0.0, 0.0])).unwrap());
        assert!(!is_one_complemented_hyperplane_linf(&df(&[0.25; 4])).unwrap());
        assert!(is_one_complemented_hyperplane_linf(&df(&[0.0, 0.0])).is_err());
        // ties resolve to the smallest index
        assert_eq!(dominated_coordinate(&df(&[0.5, 0.5])), Some(0));
    }

    #[test]
    fn linf_closed_forms() {
        let space = NormSpec::linf(4);
        let b = SearchBudget::default();
        let p = find_norm_one_projection(&space, &df(&[1.0, 0.0, 0.0, 0.0]), &b).unwrap();
        assert_eq!(p.projection().direction().coords(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.source(), ProjectionSource::ClosedForm);
        let sixth = 1.0 / 6.0;
        let p = find_norm_one_projection(&space, &df(&[0.5, sixth, sixth, sixth]), &b).unwrap();
        assert_eq!(p.projection().direction().coords(), &[2.0, 0.0, 0.0, 0.0]);
        assert!(p.norm_estimate() <= 1.0 + 1e-12);
    }

    #[test]
    fn l1_two_sparse_closed_form_has_norm_one() {
        let space = NormSpec::l1(3);
        let f = df(&[0.7, -0.2, 0.0]);
        let p = find_norm_one_projection(&space, &f, &SearchBudget::default()).unwrap();
        let y = p.projection().direction();
        assert_relative_eq!(y[0], 1.0 / 0.9, epsilon = 1e-12);
        assert_relative_eq!(y[1], -1.0 / 0.9, epsilon = 1e-12);
        assert!(p.norm_estimate() <= 1.0 + 1e-12);
    }

    #[test]
    fn l1_search_agrees_with_closed_form() {
        // a gauge space with the ℓ_1 cross-polytope as unit ball has no closed form,
        // so the search runs; it should reach norm one as in ℓ_1 itself
        let l1 = NormSpec::l1(2);
        let cross = crate::gauge::ConvexBody::from_halfspaces(
            crate::sampling::sign_vectors(2)
                .into_iter()
                .map(|s| HalfSpace::normalized(&DualFunctional::from(s.into_vec()), 1.0, &l1).unwrap())
                .collect(),
        )
        .unwrap();
        let space = NormSpec::gauge(cross).unwrap();
        let f = df(&[0.6, 0.4]).normalized(&space).unwrap();
        let budget = SearchBudget { certify_samples: 2000, ..SearchBudget::default() };
        let p = find_norm_one_projection(&space, &f, &budget).unwrap();
        assert_eq!(p.source(), ProjectionSource::Search);
        assert!(p.norm_estimate() <= 1.0 + CERTIFY_TOL);
    }

    #[test]
    fn dense_lp_functional_is_not_found() {
        let space = NormSpec::lp(3.0, 4).unwrap();
        let f = df(&[1.0; 4]).normalized(&space).unwrap();
        let budget = SearchBudget { certify_samples: 4000, ..SearchBudget::default() };
        match find_norm_one_projection(&space, &f, &budget) {
            Err(Error::NotFound { estimate }) => assert!(estimate > 1.0 + 1e-3),
            other => panic!("expected NotFound, got {other:?}"),
        }
    }

    #[test]
    fn non_dominated_linf_functional_is_not_found() {
        let space = NormSpec::linf(3);
        let f = df(&[1.0 / 3.0; 3]);
        match find_norm_one_projection(&space, &f, &SearchBudget::default()) {
            // the symmetric choice y = (1,1,1) gives 4/3
            Err(Error::NotFound { estimate }) => assert!(estimate > 1.3),
            other => panic!("expected NotFound, got {other:?}"),
        }
    }

    #[test]
    fn zero_functional_is_rejected() {
        assert!(matches!(
            find_norm_one_projection(&NormSpec::l2(2), &df(&[0.0, 0.0]), &SearchBudget::default()),
            Err(Error::ZeroFunctional)
        ));
    }

    #[test]
    fn kernel_projection_checks_normalization() {
        assert!(KernelProjection::new(df(&[1.0, 0.0]), Point::from(vec![2.0, 0.0])).is_err());
        let p = KernelProjection::new(df(&[1.0, 1.0]), Point::from(vec![0.5, 0.5])).unwrap();
        let w = p.apply(&[3.0, 1.0]);
        assert_eq!(w.coords(), &[1.0, -1.0]);
        assert_eq!(p.apply(&w).coords(), w.coords());
    }

    fn linf_axis_projection(d: f64) -> HalfSpaceProjection {
        let space = NormSpec::linf(2);
        let h = HalfSpace::new(df(&[1.0, 0.0]), d, space).unwrap();
        HalfSpaceProjection::certify(h, &SearchBudget::default()).unwrap()
    }

    #[test]
    fn contractive_projection_examples() {
        let q = linf_axis_projection(0.0);
        assert_eq!(q.apply(&[2.0, 3.0]).coords(), &[0.0, 3.0]);
        assert_eq!(q.apply(&[-1.0, 0.0]).coords(), &[-1.0, 0.0]);
        // boundary maps to itself
        assert_eq!(q.apply(&[0.0, 5.0]).coords(), &[0.0, 5.0]);
        let space = NormSpec::linf(2);
        let (x, z) = ([2.0, 3.0], [-1.0, 0.0]);
        let lhs = space.distance(&q.apply(&x), &q.apply(&z));
        assert_eq!(lhs, 3.0);
        assert_eq!(space.distance(&x, &z), 3.0);
    }

    #[test]
    fn mismatched_kernel_is_rejected() {
        let space = NormSpec::linf(2);
        let k = find_norm_one_projection(&space, &df(&[0.0, 1.0]), &SearchBudget::default()).unwrap();
        let h = HalfSpace::new(df(&[1.0, 0.0]), 0.0, space).unwrap();
        assert!(HalfSpaceProjection::new(h, &k).is_err());
    }

    #[test]
    fn kernel_retraction_cases() {
        let f = df(&[1.0, 0.0]);
        let id = |x: &[f64]| Point::from(x.to_vec());
        assert_eq!(kernel_retraction(&f, id, &[0.0, 2.0]).unwrap().coords(), &[0.0, 2.0]);
        // f(x) = 2, f(Px) = -1 → α = 1/3
        let sel = |_: &[f64]| Point::from(vec![-1.0, 0.0]);
        let r = kernel_retraction(&f, sel, &[2.0, 3.0]).unwrap();
        assert_relative_eq!(r[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(r[1], 1.0, epsilon = 1e-15);
        // a selection that leaves the half-space is rejected
        let bad = |x: &[f64]| Point::from(x.to_vec());
        assert!(matches!(kernel_retraction(&f, bad, &[1.0, 0.0]), Err(Error::SelectionInvalid { .. })));
    }

    #[test]
    fn kernel_retraction_from_contractive_projection_is_coordinate_projection() {
        let space = NormSpec::linf(4);
        let h = HalfSpace::new(df(&[1.0, 0.0, 0.0, 0.0]), 0.0, space).unwrap();
        let q = HalfSpaceProjection::certify(h, &SearchBudget::default()).unwrap();
        let mut rng = sampling::rng(11);
        for _ in 0..1000 {
            let x = sampling::uniform_box(&mut rng, 4, 5.0);
            let r = kernel_retraction(q.halfspace().functional(), |v| q.apply(v), &x).unwrap();
            let mut want = x.coords().to_vec();
            want[0] = 0.0;
            for (a, b) in r.iter().zip(&want) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn homogeneous_extension_cases() {
        let space = NormSpec::linf(2);
        let id = |x: &[f64]| Point::from(x.to_vec());
        assert_eq!(homogeneous_extension(&space, id, &[0.0, 0.0]).unwrap().coords(), &[0.0, 0.0]);
        let x = [3.0, -2.0];
        assert_eq!(homogeneous_extension(&space, id, &x).unwrap().coords(), &x);

        // with d = 0 the projection is positively homogeneous
        let q = linf_axis_projection(0.0);
        let mut rng = sampling::rng(5);
        for _ in 0..1000 {
            let x = sampling::uniform_box(&mut rng, 2, 4.0);
            let ext = homogeneous_extension(&space, |u| q.apply(u), &x).unwrap();
            let direct = q.apply(&x);
            for (a, b) in ext.iter().zip(direct.iter()) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}
