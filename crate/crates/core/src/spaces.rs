//! Finite-dimensional normed spaces: `ℓ_p` norms, gauges of convex bodies,
//! dual functionals, supporting functionals and complex realification.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gauge::ConvexBody;
use crate::point::{dot, ComplexPoint, Point};

/// Left and right one-sided derivatives further apart than this mean the
/// function is not differentiable at the point.
pub const SMOOTHNESS_THRESHOLD: f64 = 1e-4;

/// Relative step for central differences.
pub const FD_STEP: f64 = 1e-6;

/// Exponent of an `ℓ_p` norm. Infinity is its own variant so that no power of
/// `p` is ever evaluated for the max norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn is_strictly_convex(self) -> bool {
        matches!(self, Exponent::Finite(p) if p > 1.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Str(s) if s.eq_ignore_ascii_case("inf") => f64::INFINITY,
            Raw::Str(s) => s
                .parse::<f64>()
                .map_err(|_| serde::de::Error::custom(format!("invalid exponent {s:?}; use a number >= 1 or \"inf\"")))?,
        };
        Exponent::finite(p).map_err(serde::de::Error::custom)
    }
}

/// Which norm a space carries.
#[derive(Debug, Clone)]
pub enum NormKind {
    Lp(Exponent),
    Gauge(Arc<ConvexBody>),
}

/// A norm on `R^n`.
#[derive(Debug, Clone)]
pub struct NormSpec {
    kind: NormKind,
    dim: usize,
}

impl NormSpec {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Self::with_exponent(Exponent::finite(p)?, dim)
    }

    pub fn with_exponent(p: Exponent, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(NormSpec { kind: NormKind::Lp(p), dim })
    }

    pub fn l1(dim: usize) -> Self {
        NormSpec { kind: NormKind::Lp(Exponent::Finite(1.0)), dim }
    }

    pub fn l2(dim: usize) -> Self {
        NormSpec { kind: NormKind::Lp(Exponent::Finite(2.0)), dim }
    }

    pub fn linf(dim: usize) -> Self {
        NormSpec { kind: NormKind::Lp(Exponent::Infinity), dim }
    }

    /// The gauge of `body` as the norm of the space. The body must contain the
    /// origin in its interior.
    pub fn gauge(body: ConvexBody) -> Result<Self> {
        body.origin_radii()?;
        let dim = body.dim();
        Ok(NormSpec { kind: NormKind::Gauge(Arc::new(body)), dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn exponent(&self) -> Option<Exponent> {
        match self.kind {
            NormKind::Lp(p) => Some(p),
            NormKind::Gauge(_) => None,
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.exponent().is_some_and(Exponent::is_strictly_convex)
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Lp(p) => lp_norm(*p, x),
            NormKind::Gauge(body) => body.gauge_value(x),
        }
    }

    /// `‖x − z‖`
    pub fn distance(&self, x: &[f64], z: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Lp(Exponent::Infinity) => {
                x.iter().zip(z).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            }
            NormKind::Lp(Exponent::Finite(p)) if *p == 1.0 => {
                x.iter().zip(z).map(|(a, b)| (a - b).abs()).sum()
            }
            NormKind::Lp(Exponent::Finite(p)) if *p == 2.0 => {
                x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            }
            _ => self.norm_unchecked(&crate::point::sub(x, z)),
        }
    }

    /// Dual norm `‖f‖* = sup_{‖x‖ ≤ 1} f(x)`. Exact for `ℓ_p` (Hölder) and for
    /// bodies with an exact support function; for membership-oracle bodies the
    /// supremum is sampled and the result is a lower bound.
    pub fn dual_norm(&self, f: &DualFunctional) -> Result<f64> {
        check_dim(self.dim, f.dim())?;
        Ok(self.dual_norm_unchecked(f.coeffs()))
    }

    pub(crate) fn dual_norm_unchecked(&self, f: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Lp(p) => lp_norm(p.conjugate(), f),
            NormKind::Gauge(body) => {
                // the body may be asymmetric; the dual norm of f is max(h(f), h(-f))
                let neg: Vec<f64> = f.iter().map(|c| -c).collect();
                body.support_unchecked(f).max(body.support_unchecked(&neg))
            }
        }
    }

    /// Constants `(lo, hi)` with `lo·‖x‖₂ ≤ ‖x‖ ≤ hi·‖x‖₂`.
    pub fn euclidean_equivalence(&self) -> (f64, f64) {
        let n = self.dim as f64;
        match &self.kind {
            NormKind::Lp(Exponent::Infinity) => (n.powf(-0.5), 1.0),
            NormKind::Lp(Exponent::Finite(p)) => {
                let e = n.powf(1.0 / p - 0.5);
                if *p >= 2.0 {
                    (e, 1.0)
                } else {
                    (1.0, e)
                }
            }
            NormKind::Gauge(body) => {
                let (r, big_r) = body.origin_radii().expect("validated at construction");
                (1.0 / big_r, 1.0 / r)
            }
        }
    }

    /// Norm-one functional attaining `‖x‖` at `x`. Closed form for `ℓ_p`,
    /// `1 < p < ∞`; otherwise a normalized finite-difference gradient, which
    /// fails with [`Error::NotSmooth`] where the norm has a kink.
    pub fn supporting_functional(&self, x: &[f64]) -> Result<DualFunctional> {
        check_dim(self.dim, x.len())?;
        if x.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroVector);
        }
        let g = match self.kind {
            NormKind::Lp(Exponent::Finite(p)) if p > 1.0 => {
                let nx = lp_norm(Exponent::Finite(p), x);
                x.iter()
                    .map(|&c| c.signum() * (c.abs() / nx).powf(p - 1.0))
                    .collect::<Vec<_>>()
            }
            _ => {
                let step = FD_STEP * self.norm_unchecked(x).max(1.0);
                smooth_gradient(|v| self.norm_unchecked(v), x, step)?
            }
        };
        let scale = self.dual_norm_unchecked(&g);
        Ok(DualFunctional::from(g.iter().map(|c| c / scale).collect::<Vec<_>>()))
    }
}

impl PartialEq for NormSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && match (&self.kind, &other.kind) {
                (NormKind::Lp(a), NormKind::Lp(b)) => a == b,
                (NormKind::Gauge(a), NormKind::Gauge(b)) => Arc::ptr_eq(a, b),
                _ => false,
            }
    }
}

pub fn lp_norm(p: Exponent, x: &[f64]) -> f64 {
    match p {
        Exponent::Infinity => x.iter().fold(0.0f64, |m, c| m.max(c.abs())),
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|c| c.abs()).sum(),
        Exponent::Finite(p) if p == 2.0 => crate::point::euclidean(x),
        Exponent::Finite(p) => {
            let m = x.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if m == 0.0 {
                return 0.0;
            }
            m * x.iter().map(|c| (c.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// Central-difference gradient of `f` at `x`, rejecting kinks.
///
/// Along each coordinate the forward and backward one-sided slopes are
/// compared; a gap above [`SMOOTHNESS_THRESHOLD`] means `f` is not
/// differentiable at `x`.
pub(crate) fn smooth_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], step: f64) -> Result<Vec<f64>> {
    let f0 = f(x);
    let mut probe = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let fp = f(&probe);
        probe[i] = x[i] - step;
        let fm = f(&probe);
        probe[i] = x[i];
        let forward = (fp - f0) / step;
        let backward = (f0 - fm) / step;
        let gap = (forward - backward).abs();
        if gap > SMOOTHNESS_THRESHOLD {
            return Err(Error::NotSmooth { coordinate: i, gap });
        }
        g.push((fp - fm) / (2.0 * step));
    }
    Ok(g)
}

/// A linear functional `x ↦ Σ coeffs_i x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualFunctional(Point);

impl DualFunctional {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        Ok(DualFunctional(Point::new(coeffs)?))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scaled(&self, t: f64) -> DualFunctional {
        DualFunctional(self.0.scaled(t))
    }

    /// Rescales to unit dual norm in `space`.
    pub fn normalized(&self, space: &NormSpec) -> Result<DualFunctional> {
        check_dim(space.dim(), self.dim())?;
        if self.is_zero() {
            return Err(Error::ZeroFunctional);
        }
        Ok(self.scaled(1.0 / space.dual_norm_unchecked(self.coeffs())))
    }
}

impl From<Vec<f64>> for DualFunctional {
    fn from(v: Vec<f64>) -> Self {
        DualFunctional(Point::from(v))
    }
}

/// Strictly convex `ℓ_{p_l}` norm approximating the `ℓ_1` or `ℓ_∞` norm of
/// `space`, together with `s_l` such that
/// `(1 − s_l)‖x‖_{p_l} ≤ ‖x‖ ≤ (1 + s_l)‖x‖_{p_l}` for every `x`.
///
/// For `ℓ_1` the exponent is `1 + 1/l` and `s_l = n^{1−1/p_l} − 1`; for `ℓ_∞`
/// it is `l + 1` and `s_l = 1 − n^{−1/p_l}`. Both go to zero as `l` grows.
pub fn approximating_norms(space: &NormSpec, l: u32) -> Result<(NormSpec, f64)> {
    if l == 0 {
        return Err(Error::InvalidArgument("approximation index must be positive".into()));
    }
    let n = space.dim() as f64;
    match space.exponent() {
        Some(Exponent::Finite(p)) if p == 1.0 => {
            let pl = 1.0 + 1.0 / l as f64;
            Ok((NormSpec::lp(pl, space.dim())?, n.powf(1.0 - 1.0 / pl) - 1.0))
        }
        Some(Exponent::Infinity) => {
            let pl = l as f64 + 1.0;
            Ok((NormSpec::lp(pl, space.dim())?, 1.0 - n.powf(-1.0 / pl)))
        }
        _ => Err(Error::InvalidBaseSpace(
            "approximating norms are defined for ℓ_1 and ℓ_∞ only".into(),
        )),
    }
}

/// Realification `(a_j + i b_j)_j ↦ (a_1, b_1, a_2, b_2, …)`.
pub fn realify(z: &ComplexPoint) -> Point {
    Point::from(
        z.re()
            .iter()
            .zip(z.im().iter())
            .flat_map(|(&a, &b)| [a, b])
            .collect::<Vec<_>>(),
    )
}

/// Inverse of [`realify`].
pub fn complexify(v: &[f64]) -> Result<ComplexPoint> {
    if v.len() % 2 != 0 {
        return Err(Error::InvalidArgument("realified vectors have even length".into()));
    }
    let re = v.iter().step_by(2).copied().collect::<Vec<_>>();
    let im = v.iter().skip(1).step_by(2).copied().collect::<Vec<_>>();
    ComplexPoint::new(Point::from(re), Point::from(im))
}

/// Complex `ℓ_p` norm `(Σ |z_j|^p)^{1/p}`.
pub fn complex_lp_norm(p: Exponent, z: &[Complex64]) -> f64 {
    let moduli: Vec<f64> = z.iter().map(|c| c.norm()).collect();
    lp_norm(p, &moduli)
}

/// The norm the complex `ℓ_p` norm induces on the realified space: `ℓ_p` over
/// the Euclidean lengths of consecutive coordinate pairs.
pub fn realified_norm(p: Exponent, v: &[f64]) -> f64 {
    let moduli: Vec<f64> = v.chunks(2).map(|c| c[0].hypot(c[1])).collect();
    lp_norm(p, &moduli)
}

/// Real part of the complex functional `z ↦ Σ w_j z_j`, as a functional on
/// the realified space.
pub fn realify_functional(w: &[Complex64]) -> DualFunctional {
    DualFunctional::from(w.iter().flat_map(|c| [c.re, -c.im]).collect::<Vec<_>>())
}

/// Dual norm of the realified `ℓ_p` norm.
pub fn realified_dual_norm(p: Exponent, g: &DualFunctional) -> f64 {
    realified_norm(p.conjugate(), g.coeffs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn norm_examples() {
        assert_eq!(NormSpec::linf(2).norm(&[1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(NormSpec::l1(3).norm(&[1.0, -1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(NormSpec::l2(2).norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert!(matches!(
            NormSpec::l2(2).norm(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn dual_norm_examples() {
        let f = DualFunctional::from(vec![1.0, -1.0, 1.0]);
        assert_eq!(NormSpec::l1(3).dual_norm(&f).unwrap(), 1.0);
        let f2 = DualFunctional::from(vec![0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert_relative_eq!(NormSpec::linf(4).dual_norm(&f2).unwrap(), 1.0, epsilon = 1e-15);
        let f3 = DualFunctional::from(vec![3.0, 4.0]);
        assert_eq!(NormSpec::l2(2).dual_norm(&f3).unwrap(), 5.0);
    }

    #[test]
    fn exponent_validation() {
        assert!(NormSpec::lp(0.5, 2).is_err());
        assert!(NormSpec::lp(f64::NAN, 2).is_err());
        assert_eq!(NormSpec::lp(f64::INFINITY, 2).unwrap(), NormSpec::linf(2));
        assert_eq!(Exponent::Finite(1.0).conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Finite(4.0).conjugate(), Exponent::Finite(4.0 / 3.0));
    }

    #[test]
    fn supporting_functional_l2() {
        let f = NormSpec::l2(2).supporting_functional(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(f.coeffs()[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(f.coeffs()[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn supporting_functional_l4_matches_finite_differences() {
        let space = NormSpec::lp(4.0, 2).unwrap();
        let f = space.supporting_functional(&[1.0, 1.0]).unwrap();
        let expected = 2f64.powf(-0.75);
        // independent route: central differences of the norm itself
        let fd = smooth_gradient(|v| space.norm_unchecked(v), &[1.0, 1.0], 1e-6).unwrap();
        for i in 0..2 {
            assert_relative_eq!(f.coeffs()[i], expected, epsilon = 1e-14);
            assert_relative_eq!(fd[i], expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn supporting_functional_kinks() {
        assert!(matches!(
            NormSpec::l1(2).supporting_functional(&[1.0, 0.0]),
            Err(Error::NotSmooth { coordinate: 1, .. })
        ));
        assert!(matches!(
            NormSpec::linf(2).supporting_functional(&[1.0, -1.0]),
            Err(Error::NotSmooth { .. })
        ));
        assert!(matches!(
            NormSpec::l2(2).supporting_functional(&[0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
        let f = NormSpec::l1(3).supporting_functional(&[1.0, -2.0, 0.5]).unwrap();
        for (a, b) in f.coeffs().iter().zip([1.0, -1.0, 1.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn approximating_norm_constants() {
        let (sp, s) = approximating_norms(&NormSpec::l1(4), 100).unwrap();
        assert_eq!(sp.exponent(), Some(Exponent::Finite(1.01)));
        // n^{1-1/p} - 1 evaluated by hand: exp(ln 4 · 0.01/1.01) - 1
        let expected = (4f64.ln() * (0.01 / 1.01)).exp() - 1.0;
        assert_relative_eq!(s, expected, epsilon = 1e-15);
        assert!((s - 0.0138).abs() < 5e-5);

        let mut prev = f64::INFINITY;
        for l in [1, 10, 100, 1000, 100000] {
            let (_, s) = approximating_norms(&NormSpec::linf(2), l).unwrap();
            assert!(s < prev);
            prev = s;
        }
        assert!(prev < 1e-5);
        assert!(approximating_norms(&NormSpec::l2(3), 5).is_err());
    }

    #[test]
    fn realify_interleaves() {
        let z = ComplexPoint::from_complex(&[Complex64::new(3.0, 4.0)]);
        let v = realify(&z);
        assert_eq!(v.coords(), &[3.0, 4.0]);
        assert_eq!(realified_norm(Exponent::Finite(1.0), &v), 5.0);
        assert_eq!(complexify(&v).unwrap(), z);
    }
}
