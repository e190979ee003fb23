//! Deterministic sampling: low-discrepancy sphere directions and seeded
//! pseudo-random points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::point::{euclidean, Point};
use crate::spaces::NormSpec;

const PRIMES: [u32; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % b) as f64;
        index /= b;
        f *= inv;
    }
    r
}

/// Halton sequence on the open unit cube, skipping the origin-valued index 0.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton sequence supports at most {} dimensions", PRIMES.len());
    (0..dim).map(|k| radical_inverse(index + 1, PRIMES[k])).collect()
}

/// Low-discrepancy directions on the Euclidean unit sphere of `R^n`.
///
/// Halton points are pushed through Box-Muller pairs and normalized, which
/// gives a deterministic sequence that is dense in the limit.
#[derive(Debug, Clone)]
pub struct SphereSequence {
    dim: usize,
    next: u64,
}

impl SphereSequence {
    pub fn new(dim: usize) -> Self {
        SphereSequence { dim, next: 0 }
    }

    pub fn starting_at(dim: usize, offset: u64) -> Self {
        SphereSequence { dim, next: offset }
    }

    fn gaussian(&self, index: u64) -> Vec<f64> {
        let pairs = self.dim.div_ceil(2);
        let u = halton(index, 2 * pairs);
        let mut g = Vec::with_capacity(2 * pairs);
        for k in 0..pairs {
            let r = (-2.0 * u[2 * k].ln()).sqrt();
            let theta = std::f64::consts::TAU * u[2 * k + 1];
            g.push(r * theta.cos());
            g.push(r * theta.sin());
        }
        g.truncate(self.dim);
        g
    }
}

impl Iterator for SphereSequence {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        loop {
            let g = self.gaussian(self.next);
            self.next += 1;
            let n = euclidean(&g);
            if n > 1e-12 {
                return Some(Point::from(g.iter().map(|c| c / n).collect::<Vec<_>>()));
            }
        }
    }
}

/// `count` equiangular unit directions in the plane, starting at angle 0.
pub fn equiangular(count: usize) -> Vec<Point> {
    (0..count)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / count as f64;
            Point::from(vec![t.cos(), t.sin()])
        })
        .collect()
}

/// All `2^n` vectors with entries `±1`.
pub fn sign_vectors(n: usize) -> Vec<Point> {
    (0..1u64 << n)
        .map(|mask| {
            Point::from(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

/// Unit sphere points of `space`: the first `count` sphere directions,
/// rescaled to norm one.
pub fn unit_sphere(space: &NormSpec, count: usize) -> Vec<Point> {
    SphereSequence::new(space.dim())
        .take(count)
        .map(|u| {
            let n = space.norm_unchecked(&u);
            u.scaled(1.0 / n)
        })
        .collect()
}

pub fn uniform_box<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> Point {
    Point::from(
        (0..n)
            .map(|_| rng.gen_range(-half_width..=half_width))
            .collect::<Vec<_>>(),
    )
}

/// `count` pairs drawn uniformly from the cube `[-scale, scale]^n`.
pub fn random_pairs(n: usize, count: usize, scale: f64, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| (uniform_box(&mut rng, n, scale), uniform_box(&mut rng, n, scale)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_points_are_unit() {
        for u in SphereSequence::new(5).take(500) {
            assert!((u.euclidean_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_sequence_is_deterministic_and_spread() {
        let a: Vec<_> = SphereSequence::new(3).take(200).collect();
        let b: Vec<_> = SphereSequence::new(3).take(200).collect();
        assert_eq!(a, b);
        // every octant gets hit
        let mut seen = [false; 8];
        for u in &a {
            let idx = (u[0] > 0.0) as usize | ((u[1] > 0.0) as usize) << 1 | ((u[2] > 0.0) as usize) << 2;
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn sign_vector_count() {
        let s = sign_vectors(3);
        assert_eq!(s.len(), 8);
        assert!(s.iter().all(|v| v.iter().all(|c| c.abs() == 1.0)));
    }
}
