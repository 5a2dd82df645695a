//! Filtration values on `A^co_∞(X, Y)` and on the alpha complex `A_∞(X)`.
//!
//! Each simplex first gets its relaxed value: the min-max distance to its `X`
//! and `Y` parts over the affine set of points equidistant from `Q_X` and
//! from `Q_Y`. A top-down pass then corrects the relaxed value wherever a
//! coface violates the coupled Gabriel condition.

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{alpha_infty, CoupledComplex, PointCloudPair, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{dist2, equidistant_center, null_space_basis, particular_solution, sub, Matrix, Point};

/// Absolute tolerance of the dominance tests.
const DOMINANCE_TIE: f64 = 1e-12;
/// Relative gap below which a face takes its smallest coface value.
const COFACE_TIE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionCase {
    /// The minimizer of the distance to `x_1` is no closer to `y_1`.
    XDominant,
    /// The minimizer of the distance to `y_1` is no closer to `x_1`.
    YDominant,
    /// The minimal circumsphere of `Q`. Also used for pure simplexes.
    Circumsphere,
}

/// Minimizer of the relaxed problem for one simplex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereSolution {
    pub center: Point,
    /// Distance from `center` to every point of `Q_X`; `None` when `Q_X` is empty.
    pub radius_x: Option<f64>,
    /// Distance from `center` to every point of `Q_Y`; `None` when `Q_Y` is empty.
    pub radius_y: Option<f64>,
    /// `max(radius_x, radius_y)`.
    pub r_rel: f64,
    pub case: SolutionCase,
}

/// Relaxed filtration value of `Q = Q_X ∪ Q_Y`.
///
/// With one side empty this is the minimal circumsphere of the other side.
pub fn relaxed_value<P: AsRef<[f64]>>(q_x: &[P], q_y: &[P], eps: f64) -> Result<SphereSolution> {
    let first = q_x.first().or(q_y.first()).ok_or(Error::EmptyInput)?.as_ref();
    let d = first.len();
    let size = q_x.len() + q_y.len();
    if size > d + 2 {
        return Err(Error::DimensionOverflow { size, max: d + 2 });
    }
    if q_x.is_empty() || q_y.is_empty() {
        let sphere = equidistant_center(if q_y.is_empty() { q_x } else { q_y }, eps)?;
        let r = sphere.radius;
        return Ok(SphereSolution {
            center: sphere.center,
            radius_x: (!q_x.is_empty()).then_some(r),
            radius_y: (!q_y.is_empty()).then_some(r),
            r_rel: r,
            case: SolutionCase::Circumsphere,
        });
    }

    // Work relative to x_1 so that b stays small.
    let x1 = q_x[0].as_ref();
    let y1 = sub(q_y[0].as_ref(), x1);
    let y1_sq: f64 = y1.iter().map(|c| c * c).sum();
    let mut rows = Vec::with_capacity(size - 2);
    let mut rhs = Vec::with_capacity(size - 2);
    for x in &q_x[1..] {
        let v = sub(x.as_ref(), x1);
        rhs.push(0.5 * v.iter().map(|c| c * c).sum::<f64>());
        rows.push(v);
    }
    for y in &q_y[1..] {
        let v = sub(y.as_ref(), x1);
        rhs.push(0.5 * (v.iter().map(|c| c * c).sum::<f64>() - y1_sq));
        rows.push(v.iter().zip(&y1).map(|(a, b)| a - b).collect());
    }
    let a = Matrix::from_row_vecs(d, &rows);
    let f = null_space_basis(&a, eps)?;
    let c0 = particular_solution(&a, &rhs, eps)?;

    let project = |p: &[f64]| -> Vec<f64> {
        let offset = sub(p, &c0);
        let s = f.tr_mul_vec(&offset);
        f.mul_vec(&s).iter().zip(&c0).map(|(a, b)| a + b).collect()
    };
    let origin = vec![0.0; d];
    let cx = project(&origin);
    let cy = project(&y1);
    let (rx_x, rx_y) = (dist2(&cx, &origin).sqrt(), dist2(&cx, &y1).sqrt());
    let (ry_x, ry_y) = (dist2(&cy, &origin).sqrt(), dist2(&cy, &y1).sqrt());

    let untranslate = |c: Vec<f64>| Point(c.iter().zip(x1).map(|(a, b)| a + b).collect());
    let solution = if rx_x >= rx_y - DOMINANCE_TIE {
        SphereSolution {
            center: untranslate(cx),
            radius_x: Some(rx_x),
            radius_y: Some(rx_y),
            r_rel: rx_x,
            case: SolutionCase::XDominant,
        }
    } else if ry_x <= ry_y + DOMINANCE_TIE {
        SphereSolution {
            center: untranslate(cy),
            radius_x: Some(ry_x),
            radius_y: Some(ry_y),
            r_rel: ry_y,
            case: SolutionCase::YDominant,
        }
    } else {
        let all: Vec<&[f64]> = q_x.iter().chain(q_y).map(AsRef::as_ref).collect();
        let sphere = equidistant_center(&all, eps)?;
        let rx = sphere.center.distance(x1);
        let ry = sphere.center.distance(q_y[0].as_ref());
        SphereSolution {
            center: sphere.center,
            radius_x: Some(rx),
            radius_y: Some(ry),
            r_rel: rx.max(ry),
            case: SolutionCase::Circumsphere,
        }
    };
    Ok(solution)
}

fn relaxed_for(pair: &PointCloudPair, s: &Simplex, eps: f64) -> Result<SphereSolution> {
    let (ix, iy) = s.split(pair.n_x());
    let qx: Vec<&Point> = ix.iter().map(|&v| pair.point(v)).collect();
    let qy: Vec<&Point> = iy.iter().map(|&v| pair.point(v)).collect();
    relaxed_value(&qx, &qy, eps)
}

/// Whether `(p, q)` satisfies the coupled Gabriel condition.
///
/// For a pure `q`, only the ball of its own cloud is tested, so a vertex from
/// the other cloud never violates the condition.
pub fn coupled_gabriel(p: &Simplex, q: &Simplex, pair: &PointCloudPair, eps: f64) -> Result<bool> {
    let v = extra_vertex(p, q)?;
    let solution = relaxed_for(pair, q, eps)?;
    Ok(gabriel_holds(&solution, pair, v, eps))
}

fn extra_vertex(p: &Simplex, q: &Simplex) -> Result<usize> {
    let not_a_coface = || Error::NotACoface {
        face: q.vertices().to_vec(),
        coface: p.vertices().to_vec(),
    };
    if p.len() != q.len() + 1 {
        return Err(not_a_coface());
    }
    let mut extra = p.vertices().iter().filter(|v| q.vertices().binary_search(v).is_err());
    match (extra.next(), extra.next()) {
        (Some(&v), None) => Ok(v),
        _ => Err(not_a_coface()),
    }
}

fn gabriel_holds(solution: &SphereSolution, pair: &PointCloudPair, v: usize, eps: f64) -> bool {
    let radius = if pair.is_x(v) { solution.radius_x } else { solution.radius_y };
    match radius {
        None => true,
        Some(r) => solution.center.distance(pair.point(v)) >= r - eps * (1.0 + r),
    }
}

/// A simplicial complex with one filtration value per simplex, indexed like
/// [`SimplicialComplex::simplices`].
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    complex: SimplicialComplex,
    values: Vec<f64>,
}

impl FilteredComplex {
    /// Pairs a complex with values; rejects a length mismatch and non-finite
    /// or negative values. Monotonicity is checked by the homology module.
    pub fn new(complex: SimplicialComplex, values: Vec<f64>) -> Result<Self> {
        if values.len() != complex.len() {
            return Err(Error::DimensionMismatch {
                expected: complex.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NonFinite);
        }
        Ok(FilteredComplex { complex, values })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn simplices(&self) -> &[Simplex] {
        self.complex.simplices()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, s: &Simplex) -> Option<f64> {
        self.complex.index_of(s).map(|i| self.values[i])
    }

    /// Indices sorted by `(value, dimension, lexicographic)`.
    pub fn filtration_order(&self) -> Vec<usize> {
        let simplices = self.complex.simplices();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[a]
                .total_cmp(&self.values[b])
                .then_with(|| simplices[a].len().cmp(&simplices[b].len()))
                .then_with(|| simplices[a].cmp(&simplices[b]))
        });
        order
    }

    /// `(simplex, value)` pairs in filtration order.
    pub fn sorted(&self) -> Vec<(&Simplex, f64)> {
        self.filtration_order().into_iter().map(|i| (&self.simplices()[i], self.values[i])).collect()
    }

    /// Simplexes with value `<= r`.
    pub fn at_radius(&self, r: f64) -> impl Iterator<Item = &Simplex> {
        self.simplices().iter().zip(&self.values).filter(move |(_, &v)| v <= r).map(|(s, _)| s)
    }
}

/// Filtration values of every simplex of `complex`, top-down.
pub fn coupled_filtration(complex: &CoupledComplex, eps: f64) -> Result<FilteredComplex> {
    let pair = complex.pair();
    let simplices = complex.simplices();
    let solutions: Vec<Option<SphereSolution>> = simplices
        .par_iter()
        .map(|s| {
            if s.len() == 1 {
                Ok(None)
            } else {
                relaxed_for(pair, s, eps).map(Some).map_err(|e| e.at(s.vertices()))
            }
        })
        .collect::<Result<_>>()?;

    let index = complex.complex();
    let mut values: Vec<Option<f64>> = vec![None; simplices.len()];
    // Smallest coface value seen so far; caps a relaxed value that exceeds it by rounding only.
    // Infinite for top simplexes.
    let mut coface_bound = vec![f64::INFINITY; simplices.len()];
    // Stored order is (dimension, lex), so reverse dimension blocks keep lex order within each.
    let mut start = simplices.len();
    while start > 0 {
        let k = simplices[start - 1].len();
        let block_start = simplices[..start].partition_point(|s| s.len() < k);
        for p_idx in block_start..start {
            let bound = coface_bound[p_idx];
            let r_p = *values[p_idx].get_or_insert_with(|| {
                let r = solutions[p_idx].as_ref().map_or(0.0, |s| s.r_rel.min(bound));
                // Equal in exact arithmetic but solved differently; a split would open a spurious class.
                if bound.is_finite() && bound - r <= COFACE_TIE * (1.0 + bound) { bound } else { r }
            });
            for (q, v) in simplices[p_idx].facets() {
                let q_idx = index.index_of(&q).expect("complex is face-closed");
                match values[q_idx] {
                    Some(r_q) => values[q_idx] = Some(r_q.min(r_p)),
                    None => {
                        let gabriel = solutions[q_idx].as_ref().is_none_or(|sol| gabriel_holds(sol, pair, v, eps));
                        if gabriel {
                            coface_bound[q_idx] = coface_bound[q_idx].min(r_p);
                        } else {
                            values[q_idx] = Some(r_p);
                        }
                    }
                }
            }
        }
        start = block_start;
    }
    let values = values.into_iter().map(|v| v.expect("every simplex is visited")).collect();
    FilteredComplex::new(index.clone(), values)
}

/// The alpha filtration of a single cloud.
pub fn alpha_filtration(x: &[Point], eps: f64) -> Result<FilteredComplex> {
    coupled_filtration(&alpha_infty(x, eps)?, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::coupled_alpha_infty;
    use crate::geometry::DEFAULT_EPSILON as EPS;
    use proptest::prelude::*;

    fn pts(raw: &[[f64; 2]]) -> Vec<Point> {
        raw.iter().map(|&p| Point::from(p)).collect()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn assert_solution(s: &SphereSolution, center: [f64; 2], r: f64, case: SolutionCase) {
        assert_eq!(s.case, case, "{s:?}");
        assert!(close(s.r_rel, r, 1e-9), "{s:?}");
        assert!(s.center.distance(&center) <= 1e-9, "{s:?}");
    }

    #[test]
    fn relaxed_value_fixtures() {
        let s = relaxed_value(&pts(&[[0.0, 0.0]]), &pts(&[[3.0, 0.0]]), EPS).unwrap();
        assert_solution(&s, [1.5, 0.0], 1.5, SolutionCase::Circumsphere);

        let s = relaxed_value(&pts(&[[0.0, 0.0], [2.0, 0.0]]), &pts(&[[1.0, 1.0]]), EPS).unwrap();
        assert_solution(&s, [1.0, 0.0], 1.0, SolutionCase::XDominant);
        assert!(close(s.radius_x.unwrap(), 1.0, 1e-12) && close(s.radius_y.unwrap(), 1.0, 1e-12));

        let s = relaxed_value(&pts(&[[0.0, 0.0], [0.0, 2.0]]), &pts(&[[0.5, 1.0]]), EPS).unwrap();
        assert_solution(&s, [0.0, 1.0], 1.0, SolutionCase::XDominant);

        let s = relaxed_value(&pts(&[[0.0, 0.0], [0.0, 2.0]]), &pts(&[[5.0, 1.0]]), EPS).unwrap();
        assert_solution(&s, [2.4, 1.0], 2.6, SolutionCase::Circumsphere);
    }

    #[test]
    fn relaxed_value_y_dominant_and_pure() {
        let s = relaxed_value(&pts(&[[1.0, 1.0]]), &pts(&[[0.0, 0.0], [2.0, 0.0]]), EPS).unwrap();
        assert_solution(&s, [1.0, 0.0], 1.0, SolutionCase::YDominant);
        let s = relaxed_value(&pts(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]), &[], EPS).unwrap();
        assert_solution(&s, [1.0, 0.0], 1.0, SolutionCase::Circumsphere);
        assert_eq!(s.radius_y, None);
    }

    #[test]
    fn relaxed_value_errors() {
        let too_many = pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let err = relaxed_value(&too_many, &pts(&[[1.0, 1.0], [2.0, 2.0]]), EPS).unwrap_err();
        assert_eq!(err, Error::DimensionOverflow { size: 5, max: 4 });
        // Parallel bisectors: the system has no solution.
        let err = relaxed_value(&pts(&[[0.0, 0.0], [1.0, 0.0]]), &pts(&[[0.0, 1.0], [1.0, 1.0]]), EPS).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }), "{err:?}");
        assert_eq!(relaxed_value::<Point>(&[], &[], EPS).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn gabriel_examples() {
        let pair = PointCloudPair::new(pts(&[[0.0, 0.0], [1.0, 0.1]]), pts(&[[2.0, 0.0]])).unwrap();
        let q = Simplex::new(vec![0, 2]);
        let p = Simplex::new(vec![0, 1, 2]);
        assert!(!coupled_gabriel(&p, &q, &pair, EPS).unwrap());

        let pair = PointCloudPair::new(pts(&[[0.0, 0.0], [2.0, 0.0]]), pts(&[[1.0, 1.0]])).unwrap();
        assert!(coupled_gabriel(&Simplex::new(vec![0, 1, 2]), &Simplex::new(vec![0, 1]), &pair, EPS).unwrap());

        let err = coupled_gabriel(&Simplex::new(vec![0, 1]), &Simplex::new(vec![2]), &pair, EPS).unwrap_err();
        assert!(matches!(err, Error::NotACoface { .. }));
        let err = coupled_gabriel(&Simplex::new(vec![0, 1, 2]), &Simplex::new(vec![0]), &pair, EPS).unwrap_err();
        assert!(matches!(err, Error::NotACoface { .. }));
    }

    fn filtrate(x: &[[f64; 2]], y: &[[f64; 2]]) -> FilteredComplex {
        let pair = PointCloudPair::new(pts(x), pts(y)).unwrap();
        coupled_filtration(&coupled_alpha_infty(&pair, EPS).unwrap(), EPS).unwrap()
    }

    #[test]
    fn singleton_pair_edge_is_half_distance() {
        let fc = filtrate(&[[0.0, 0.0]], &[[3.0, 4.0]]);
        assert_eq!(fc.values(), &[0.0, 0.0, 2.5]);
    }

    #[test]
    fn mixed_triangle_values() {
        let fc = filtrate(&[[0.0, 0.0], [2.0, 0.0]], &[[1.0, 1.0]]);
        let v = |s: Vec<usize>| fc.value(&Simplex::new(s)).unwrap();
        assert!(close(v(vec![0, 1, 2]), 1.0, 1e-12));
        assert!(close(v(vec![0, 1]), 1.0, 1e-12));
        assert!(close(v(vec![0, 2]), 0.5f64.sqrt(), 1e-12));
        assert!(close(v(vec![1, 2]), 0.5f64.sqrt(), 1e-12));
    }

    #[test]
    fn non_gabriel_edge_inherits_from_coface() {
        let fc = filtrate(&[[0.0, 0.0], [1.0, 0.1]], &[[2.0, 0.0]]);
        let edge = fc.value(&Simplex::new(vec![0, 2])).unwrap();
        let tri = fc.value(&Simplex::new(vec![0, 1, 2])).unwrap();
        assert_eq!(edge, tri);
        assert!(edge > 1.0);
    }

    #[test]
    fn alpha_filtration_examples() {
        let fc = alpha_filtration(&pts(&[[0.0, 0.0], [2.0, 0.0]]), EPS).unwrap();
        assert_eq!(fc.values(), &[0.0, 0.0, 1.0]);
        let fc = alpha_filtration(&pts(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]), EPS).unwrap();
        assert!(close(fc.value(&Simplex::new(vec![0, 1, 2])).unwrap(), 1.0, 1e-12));

        // Obtuse: the long edge is Gabriel, the short ones keep their half lengths.
        let fc = alpha_filtration(&pts(&[[0.0, 0.0], [4.0, 0.0], [1.0, 0.5]]), EPS).unwrap();
        let circumradius = equidistant_center(&pts(&[[0.0, 0.0], [4.0, 0.0], [1.0, 0.5]]), EPS).unwrap().radius;
        assert!(close(fc.value(&Simplex::new(vec![0, 1])).unwrap(), circumradius, 1e-12));
        assert!(close(fc.value(&Simplex::new(vec![0, 2])).unwrap(), 1.25f64.sqrt() / 2.0, 1e-12));
    }

    #[test]
    fn filtration_order_puts_faces_first() {
        let fc = filtrate(&[[0.0, 0.0], [2.0, 0.0]], &[[1.0, 1.0]]);
        let sorted = fc.sorted();
        assert_eq!(sorted.len(), 7);
        assert!(sorted.windows(2).all(|w| w[0].1 <= w[1].1));
        // The pure-X edge and the triangle share value 1: the edge comes first.
        assert_eq!(sorted[5].0, &Simplex::new(vec![0, 1]));
        assert_eq!(sorted[6].0, &Simplex::new(vec![0, 1, 2]));
    }

    /// Golden-section minimum of a unimodal function on `[lo, hi]`.
    fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) <= f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        f(0.5 * (lo + hi))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        // Q_X = {x1, x2}, Q_Y = {y}: the constraint set is the bisector line of x1, x2.
        #[test]
        fn relaxed_value_matches_line_search(
            x1 in prop::array::uniform2(-1.0..1.0f64),
            x2 in prop::array::uniform2(-1.0..1.0f64),
            y in prop::array::uniform2(-1.0..1.0f64),
        ) {
            prop_assume!(dist2(&x1, &x2) > 1e-4);
            let mid = [(x1[0] + x2[0]) / 2.0, (x1[1] + x2[1]) / 2.0];
            let len = dist2(&x1, &x2).sqrt();
            let dir = [-(x2[1] - x1[1]) / len, (x2[0] - x1[0]) / len];
            let objective = |t: f64| {
                let c = [mid[0] + t * dir[0], mid[1] + t * dir[1]];
                dist2(&c, &x1).sqrt().max(dist2(&c, &y).sqrt())
            };
            let expected = golden(objective, -10.0, 10.0);
            let s = relaxed_value(&pts(&[x1, x2]), &pts(&[y]), EPS).unwrap();
            prop_assert!(close(s.r_rel, expected, 1e-6), "{} vs {}", s.r_rel, expected);
        }

        #[test]
        fn filtration_is_monotone(raw in prop::collection::vec(prop::array::uniform2(0.0..1.0f64), 4..14), split in 1usize..3) {
            let (x, y) = raw.split_at(split.min(raw.len() - 1));
            let pair = PointCloudPair::new(pts(x), pts(y)).unwrap();
            let Ok(complex) = coupled_alpha_infty(&pair, EPS) else { return Ok(()) };
            let fc = coupled_filtration(&complex, EPS).unwrap();
            for (i, s) in fc.simplices().iter().enumerate() {
                for (face, _) in s.facets() {
                    prop_assert!(fc.value(&face).unwrap() <= fc.values()[i]);
                }
                if s.len() > 1 {
                    prop_assert!(relaxed_for(&pair, s, EPS).unwrap().r_rel <= fc.values()[i] * (1.0 + 1e-12) + 1e-12);
                } else {
                    prop_assert_eq!(fc.values()[i], 0.0);
                }
            }
        }
    }
}
