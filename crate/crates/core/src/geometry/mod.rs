//! Points, spheres and the small dense linear algebra shared by every other
//! module.
//!
//! Everything here works on runtime-sized coordinates so the same code serves
//! the ambient space `R^d` and the lifted space `R^{d+1}`. The supported and
//! tested range is `d <= 3`.

mod linalg;
mod position;
mod sphere;

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use linalg::{null_space_basis, particular_solution, Matrix};
pub use position::{
    check_coupled_general_position, default_jitter_magnitude, jitter, GeneralPositionReport,
    Violation, ViolationKind,
};
pub use sphere::{equidistant_center, min_enclosing_ball, SphereSide};

/// Default predicate tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// A point in `R^d`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub(crate) Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// The point with `height` appended as an extra coordinate.
    pub fn lifted(&self, height: f64) -> Point {
        let mut coords = Vec::with_capacity(self.0.len() + 1);
        coords.extend_from_slice(&self.0);
        coords.push(height);
        Point(coords)
    }

    /// Drops the last coordinate.
    pub fn projected(&self) -> Point {
        Point(self.0[..self.0.len() - 1].to_vec())
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        dist2(&self.0, other).sqrt()
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

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.0).finish()
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(coords: [f64; N]) -> Self {
        assert!(N > 0, "points need at least one coordinate");
        Point(coords.to_vec())
    }
}

/// A sphere (or closed ball, depending on context) in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Point,
    pub radius: f64,
}

impl Sphere {
    /// Classifies `p` against the sphere; `tol` is an absolute distance.
    pub fn side(&self, p: &[f64], tol: f64) -> SphereSide {
        let gap = dist2(&self.center, p).sqrt() - self.radius;
        if gap < -tol {
            SphereSide::Inside
        } else if gap > tol {
            SphereSide::Outside
        } else {
            SphereSide::On
        }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.side(p, tol) != SphereSide::Outside
    }
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Diagonal of the axis-aligned bounding box; 0 for fewer than two points.
pub fn bounding_diameter<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let mut lo = first.as_ref().to_vec();
    let mut hi = lo.clone();
    for p in &points[1..] {
        for (k, &c) in p.as_ref().iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    dist2(&lo, &hi).sqrt()
}

/// Absolute distance tolerance for predicates on a configuration of the given
/// extent.
pub fn distance_tolerance(eps: f64, scale: f64) -> f64 {
    eps * (1.0 + scale)
}

/// Checks that all points share one dimension and returns it.
pub fn common_dimension(points: &[Point]) -> Result<Option<usize>> {
    let Some(first) = points.first() else {
        return Ok(None);
    };
    let dim = first.dim();
    for p in points {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
    }
    Ok(Some(dim))
}

/// Dimension of the affine hull of `points`, with rank decided at tolerance
/// `eps` relative to the largest spread vector.
pub fn affine_rank<P: AsRef<[f64]>>(points: &[P], eps: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p.as_ref(), points[0].as_ref())).collect();
    Matrix::from_rows(&rows).transpose().numerical_rank(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_rejects_non_finite_and_empty() {
        assert_eq!(Point::new(vec![]), Err(Error::EmptyInput));
        assert_eq!(Point::new(vec![1.0, f64::NAN]), Err(Error::NonFinite));
        assert_eq!(Point::new(vec![f64::INFINITY]), Err(Error::NonFinite));
    }

    #[test]
    fn lift_then_project_is_identity() {
        let p = Point::from([0.25, -3.0]);
        let lifted = p.lifted(1.0);
        assert_eq!(lifted.coords(), &[0.25, -3.0, 1.0]);
        assert_eq!(lifted.projected(), p);
    }

    #[test]
    fn affine_rank_of_simple_sets() {
        let collinear = [Point::from([0.0, 0.0]), Point::from([1.0, 0.0]), Point::from([2.0, 0.0])];
        assert_eq!(affine_rank(&collinear, DEFAULT_EPSILON), 1);
        let triangle = [Point::from([0.0, 0.0]), Point::from([1.0, 0.0]), Point::from([0.0, 1.0])];
        assert_eq!(affine_rank(&triangle, DEFAULT_EPSILON), 2);
        assert_eq!(affine_rank(&triangle[..1], DEFAULT_EPSILON), 0);
    }

    #[test]
    fn sphere_side_classification() {
        let s = Sphere {
            center: Point::from([0.0, 0.0]),
            radius: 1.0,
        };
        assert_eq!(s.side(&[0.5, 0.0], 1e-9), SphereSide::Inside);
        assert_eq!(s.side(&[0.0, 1.0], 1e-9), SphereSide::On);
        assert_eq!(s.side(&[2.0, 0.0], 1e-9), SphereSide::Outside);
    }
}
