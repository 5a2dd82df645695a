use itertools::Itertools;

use super::{bounding_diameter, distance_tolerance, particular_solution, sub, Matrix, Point, Sphere};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereSide {
    Inside,
    On,
    Outside,
}

/// The smallest sphere through all of `points`: its center is the unique
/// point of their affine hull equidistant from every input.
pub fn equidistant_center<P: AsRef<[f64]>>(points: &[P], eps: f64) -> Result<Sphere> {
    let (base, rest) = points.split_first().ok_or(Error::EmptyInput)?;
    let base = base.as_ref();
    let d = base.len();
    if rest.len() > d {
        return Err(Error::DegenerateInput);
    }
    // 2 (p_i - p_0) . (c - p_0) = |p_i - p_0|^2
    let rows: Vec<Vec<f64>> = rest.iter().map(|p| sub(p.as_ref(), base)).collect();
    let rhs: Vec<f64> = rows.iter().map(|v| 0.5 * v.iter().map(|x| x * x).sum::<f64>()).collect();
    let a = Matrix::from_row_vecs(d, &rows);
    let offset = particular_solution(&a, &rhs, eps).map_err(|_| Error::DegenerateInput)?;
    let center: Vec<f64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
    let radius = offset.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(Sphere {
        center: Point(center),
        radius,
    })
}

/// Minimal enclosing ball (Welzl's recursion in input order).
pub fn min_enclosing_ball<P: AsRef<[f64]>>(points: &[P], eps: f64) -> Result<Sphere> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let slices: Vec<&[f64]> = points.iter().map(|p| p.as_ref()).collect();
    if slices.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
        return Err(Error::NonFinite);
    }
    let d = slices[0].len();
    let tol = distance_tolerance(eps, bounding_diameter(&slices));
    let mut boundary = Vec::with_capacity(d + 1);
    let ball = welzl(&slices, &mut boundary, d, tol, eps);
    Ok(ball.expect("non-empty input has an enclosing ball"))
}

fn welzl<'a>(
    points: &[&'a [f64]],
    boundary: &mut Vec<&'a [f64]>,
    d: usize,
    tol: f64,
    eps: f64,
) -> Option<Sphere> {
    if points.is_empty() || boundary.len() == d + 1 {
        return ball_through(boundary, tol, eps);
    }
    let (last, rest) = points.split_last().unwrap();
    if let Some(ball) = welzl(rest, boundary, d, tol, eps) {
        if ball.contains(last, tol) {
            return Some(ball);
        }
    }
    boundary.push(last);
    let ball = welzl(rest, boundary, d, tol, eps);
    boundary.pop();
    ball
}

/// Smallest ball with all of `boundary` on its surface. Falls back to the
/// smallest enclosing circumsphere of a subset when the boundary points are
/// numerically dependent.
fn ball_through(boundary: &[&[f64]], tol: f64, eps: f64) -> Option<Sphere> {
    match boundary {
        [] => None,
        [p] => Some(Sphere {
            center: Point(p.to_vec()),
            radius: 0.0,
        }),
        _ => equidistant_center(boundary, eps).ok().or_else(|| {
            (1..boundary.len())
                .rev()
                .flat_map(|k| boundary.iter().copied().combinations(k))
                .filter_map(|subset| equidistant_center(&subset, eps).ok())
                .filter(|s| boundary.iter().all(|p| s.contains(p, tol)))
                .min_by(|a, b| a.radius.total_cmp(&b.radius))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_EPSILON as EPS;

    fn pts(raw: &[[f64; 2]]) -> Vec<Point> {
        raw.iter().map(|&p| Point::from(p)).collect()
    }

    fn assert_sphere(s: &Sphere, center: &[f64], radius: f64) {
        for (a, b) in s.center.iter().zip(center) {
            assert!((a - b).abs() < 1e-12, "center {:?} != {:?}", s.center, center);
        }
        assert!((s.radius - radius).abs() < 1e-12, "radius {} != {}", s.radius, radius);
    }

    #[test]
    fn equidistant_center_examples() {
        let s = equidistant_center(&pts(&[[0.0, 0.0], [2.0, 0.0]]), EPS).unwrap();
        assert_sphere(&s, &[1.0, 0.0], 1.0);
        let s = equidistant_center(&pts(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]), EPS).unwrap();
        assert_sphere(&s, &[1.0, 0.0], 1.0);
        let s = equidistant_center(&pts(&[[0.0, 0.0], [0.0, 2.0], [5.0, 1.0]]), EPS).unwrap();
        assert_sphere(&s, &[2.4, 1.0], 2.6);
    }

    #[test]
    fn equidistant_center_in_affine_hull_of_lower_dimensional_input() {
        // A segment in R^3: the center is its midpoint, not some point off the line.
        let s = equidistant_center(&[Point::from([1.0, 1.0, 1.0]), Point::from([3.0, 1.0, 1.0])], EPS).unwrap();
        assert_sphere(&s, &[2.0, 1.0, 1.0], 1.0);
    }

    #[test]
    fn equidistant_center_rejects_degenerate_input() {
        let collinear = pts(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert_eq!(equidistant_center(&collinear, EPS), Err(Error::DegenerateInput));
        let too_many = pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        assert_eq!(equidistant_center(&too_many, EPS), Err(Error::DegenerateInput));
        let duplicate = pts(&[[0.5, 0.5], [0.5, 0.5]]);
        assert_eq!(equidistant_center(&duplicate, EPS), Err(Error::DegenerateInput));
        assert_eq!(equidistant_center::<Point>(&[], EPS), Err(Error::EmptyInput));
    }

    #[test]
    fn min_enclosing_ball_examples() {
        let s = min_enclosing_ball(&pts(&[[0.0, 0.0]]), EPS).unwrap();
        assert_sphere(&s, &[0.0, 0.0], 0.0);
        let s = min_enclosing_ball(&pts(&[[0.0, 0.0], [3.0, 0.0]]), EPS).unwrap();
        assert_sphere(&s, &[1.5, 0.0], 1.5);
        let s = min_enclosing_ball(&pts(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.1]]), EPS).unwrap();
        assert_sphere(&s, &[1.0, 0.0], 1.0);
    }

    #[test]
    fn min_enclosing_ball_tolerates_collinear_and_duplicate_points() {
        let s = min_enclosing_ball(&pts(&[[0.0, 0.0], [1.0, 0.0], [4.0, 0.0], [1.0, 0.0]]), EPS).unwrap();
        assert_sphere(&s, &[2.0, 0.0], 2.0);
    }
}
