use itertools::Itertools;
use rand::Rng;
use serde::Serialize;

use super::{bounding_diameter, distance_tolerance, equidistant_center, Point, SphereSide};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Two input points coincide.
    Duplicate,
    /// A (d+1)-subset of one cloud lies on a (d-1)-flat, or a mixed lifted
    /// (d+2)-subset is affinely dependent.
    Flat,
    /// `point` lies on the circumsphere of `subset`.
    Cospherical,
}

/// A violated general-position condition. Indices are global: X first, then Y.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subset: Vec<usize>,
    pub point: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GeneralPositionReport {
    pub violations: Vec<Violation>,
}

impl GeneralPositionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of coupled general position: each cloud in general
/// position in `R^d`, and no lifted point on the circumsphere of any mixed
/// lifted (d+2)-subset. Cost grows like `n^(d+3)`; intended for small inputs.
pub fn check_coupled_general_position(x: &[Point], y: &[Point], eps: f64) -> GeneralPositionReport {
    let mut report = GeneralPositionReport::default();
    let Some(d) = x.first().or(y.first()).map(Point::dim) else {
        return report;
    };
    let all: Vec<&Point> = x.iter().chain(y).collect();
    let tol = distance_tolerance(eps, bounding_diameter(&all));

    // Coincident points within each cloud.
    for (offset, cloud) in [(0, x), (x.len(), y)] {
        for (i, j) in (0..cloud.len()).tuple_combinations() {
            if cloud[i].distance(&cloud[j]) <= tol {
                report.violations.push(Violation {
                    kind: ViolationKind::Duplicate,
                    subset: vec![offset + i, offset + j],
                    point: None,
                });
            }
        }
    }

    for (offset, cloud) in [(0, x), (x.len(), y)] {
        let refs: Vec<&Point> = cloud.iter().collect();
        check_subsets(&refs, offset, d + 1, tol, eps, |_| true, &mut report);
    }

    if !x.is_empty() && !y.is_empty() {
        let lifted: Vec<Point> = x.iter().map(|p| p.lifted(0.0)).chain(y.iter().map(|p| p.lifted(1.0))).collect();
        let refs: Vec<&Point> = lifted.iter().collect();
        let nx = x.len();
        let mixed = |subset: &[usize]| subset.first().is_some_and(|&i| i < nx) && subset.last().is_some_and(|&i| i >= nx);
        check_subsets(&refs, 0, d + 2, tol, eps, mixed, &mut report);
    }
    report
}

fn check_subsets(
    points: &[&Point],
    offset: usize,
    size: usize,
    tol: f64,
    eps: f64,
    include: impl Fn(&[usize]) -> bool,
    report: &mut GeneralPositionReport,
) {
    if points.len() < size {
        return;
    }
    for subset in (0..points.len()).combinations(size) {
        if !include(&subset) {
            continue;
        }
        let global = || subset.iter().map(|i| i + offset).collect::<Vec<_>>();
        let members: Vec<&Point> = subset.iter().map(|&i| points[i]).collect();
        let Ok(sphere) = equidistant_center(&members, eps) else {
            report.violations.push(Violation {
                kind: ViolationKind::Flat,
                subset: global(),
                point: None,
            });
            continue;
        };
        for (i, p) in points.iter().enumerate() {
            if subset.binary_search(&i).is_err() && sphere.side(p, tol) == SphereSide::On {
                report.violations.push(Violation {
                    kind: ViolationKind::Cospherical,
                    subset: global(),
                    point: Some(i + offset),
                });
            }
        }
    }
}

/// Adds independent uniform noise in `[-delta, delta]` to every coordinate.
pub fn jitter<R: Rng + ?Sized>(points: &[Point], delta: f64, rng: &mut R) -> Vec<Point> {
    points
        .iter()
        .map(|p| Point(p.iter().map(|c| c + rng.random_range(-delta..=delta)).collect()))
        .collect()
}

/// `1e-6` times the bounding-box diameter.
pub fn default_jitter_magnitude(points: &[Point]) -> f64 {
    1e-6 * bounding_diameter(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_EPSILON as EPS;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts(raw: &[[f64; 2]]) -> Vec<Point> {
        raw.iter().map(|&p| Point::from(p)).collect()
    }

    #[test]
    fn collinear_triple_is_flat() {
        let report = check_coupled_general_position(&pts(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]), &[], EPS);
        assert!(!report.is_ok());
        assert_eq!(report.violations[0].kind, ViolationKind::Flat);
        assert_eq!(report.violations[0].subset, vec![0, 1, 2]);
    }

    #[test]
    fn small_mixed_pair_is_in_general_position() {
        let report = check_coupled_general_position(&pts(&[[0.0, 0.0], [2.0, 0.0]]), &pts(&[[1.0, 1.0]]), EPS);
        assert!(report.is_ok(), "{report:?}");
    }

    #[test]
    fn cocircular_square_is_rejected() {
        let report =
            check_coupled_general_position(&pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), &[], EPS);
        assert!(report.violations.iter().any(|v| v.kind == ViolationKind::Cospherical));
    }

    #[test]
    fn violations_in_y_use_global_indices() {
        let report = check_coupled_general_position(
            &pts(&[[5.0, 5.0]]),
            &pts(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
            EPS,
        );
        assert!(report.violations.iter().any(|v| v.kind == ViolationKind::Flat && v.subset == vec![1, 2, 3]));
    }

    #[test]
    fn duplicates_are_reported() {
        let report = check_coupled_general_position(&pts(&[[0.0, 0.0], [0.0, 0.0]]), &[], EPS);
        assert_eq!(report.violations[0].kind, ViolationKind::Duplicate);
    }

    #[test]
    fn mixed_parallel_segments_are_flat_when_lifted() {
        // x2 - x1 parallel to y2 - y1: the four lifted points are coplanar.
        let report = check_coupled_general_position(
            &pts(&[[0.0, 0.0], [1.0, 0.0]]),
            &pts(&[[0.3, 0.7], [2.3, 0.7]]),
            EPS,
        );
        assert!(report.violations.iter().any(|v| v.kind == ViolationKind::Flat && v.subset == vec![0, 1, 2, 3]));
    }

    #[test]
    fn jitter_restores_general_position() {
        let square = pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let moved = jitter(&square, default_jitter_magnitude(&square), &mut rng);
        for (a, b) in square.iter().zip(&moved) {
            assert!(a.distance(b) <= 2e-6 * 2f64.sqrt());
        }
        // Displacements of ~1e-6 are far above the 1e-9 predicate tolerance.
        assert!(check_coupled_general_position(&moved, &[], EPS).is_ok());
    }
}
