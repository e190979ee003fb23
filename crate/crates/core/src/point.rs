//! Coordinate vectors.

use std::ops::{Add, Deref, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A point of `R^n` with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    /// Validating constructor: rejects empty input and non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("a point needs at least one coordinate".into()));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Point(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    /// The `i`-th standard basis vector of `R^n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn scaled(&self, t: f64) -> Point {
        Point(self.0.iter().map(|c| c * t).collect())
    }

    /// `self + t * other`
    pub fn add_scaled(&self, t: f64, other: &[f64]) -> Point {
        Point(self.0.iter().zip(other).map(|(a, b)| a + t * b).collect())
    }

    pub fn euclidean_norm(&self) -> f64 {
        euclidean(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Add<&Point> for &Point {
    type Output = Point;

    fn add(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Point> for &Point {
    type Output = Point;

    fn sub(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Point {
    type Output = Point;

    fn mul(self, t: f64) -> Point {
        self.scaled(t)
    }
}

impl Neg for &Point {
    type Output = Point;

    fn neg(self) -> Point {
        self.scaled(-1.0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn euclidean(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|c| (c / m) * (c / m)).sum::<f64>().sqrt()
}

/// A point of `C^n`, stored as real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint {
    re: Point,
    im: Point,
}

impl ComplexPoint {
    pub fn new(re: Point, im: Point) -> Result<Self> {
        check_dim(re.dim(), im.dim())?;
        Ok(ComplexPoint { re, im })
    }

    pub fn from_complex(z: &[Complex64]) -> Self {
        ComplexPoint {
            re: Point(z.iter().map(|c| c.re).collect()),
            im: Point(z.iter().map(|c| c.im).collect()),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn re(&self) -> &Point {
        &self.re
    }

    pub fn im(&self) -> &Point {
        &self.im
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(self.im.iter())
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect()
    }

    /// Multiplication by a complex scalar.
    pub fn scale(&self, s: Complex64) -> ComplexPoint {
        ComplexPoint::from_complex(&self.to_complex().iter().map(|z| z * s).collect::<Vec<_>>())
    }
}

impl Add<&ComplexPoint> for &ComplexPoint {
    type Output = ComplexPoint;

    fn add(self, rhs: &ComplexPoint) -> ComplexPoint {
        ComplexPoint {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Point::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = Point::from(vec![1.0, 2.0]);
        let b = Point::from(vec![3.0, -1.0]);
        assert_eq!((&a + &b).coords(), &[4.0, 1.0]);
        assert_eq!((&a - &b).coords(), &[-2.0, 3.0]);
        assert_eq!(a.add_scaled(2.0, &b).coords(), &[7.0, 0.0]);
        assert_eq!(a.dot(&b), 1.0);
        assert_eq!(Point::from(vec![3.0, 4.0]).euclidean_norm(), 5.0);
    }

    #[test]
    fn complex_parts_must_match() {
        let re = Point::from(vec![1.0, 2.0]);
        let im = Point::from(vec![1.0]);
        assert!(ComplexPoint::new(re, im).is_err());
    }
}
