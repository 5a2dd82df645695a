//! Persistent homology over GF(2).

use serde::Serialize;

use crate::complex::Simplex;
use crate::error::{Error, Result};
use crate::filtration::FilteredComplex;

/// Boundary matrix with columns in filtration order. Each column lists the
/// rows of its facets in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMatrix {
    simplex_of_column: Vec<usize>,
    dims: Vec<usize>,
    values: Vec<f64>,
    columns: Vec<Vec<usize>>,
}

impl BoundaryMatrix {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j]
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// Index of the column's simplex in the underlying complex.
    pub fn simplex(&self, j: usize) -> usize {
        self.simplex_of_column[j]
    }

    /// Whether `∂∘∂ = 0`, checked column by column.
    pub fn boundary_squared_is_zero(&self) -> bool {
        self.columns.iter().all(|col| {
            let mut acc: Vec<usize> = Vec::new();
            for &row in col {
                acc = xor(&acc, &self.columns[row]);
            }
            acc.is_empty()
        })
    }
}

pub fn boundary_matrix(fc: &FilteredComplex) -> Result<BoundaryMatrix> {
    let order = fc.filtration_order();
    let simplices = fc.simplices();
    let mut position = vec![0; order.len()];
    for (col, &s) in order.iter().enumerate() {
        position[s] = col;
    }
    let mut columns = Vec::with_capacity(order.len());
    for (col, &s) in order.iter().enumerate() {
        let mut rows = Vec::with_capacity(simplices[s].len());
        for (face, _) in simplices[s].facets() {
            let f = fc.complex().index_of(&face).ok_or_else(|| Error::NotInComplex(face.vertices().to_vec()))?;
            if position[f] >= col {
                return Err(Error::NonMonotone {
                    face: face.vertices().to_vec(),
                    coface: simplices[s].vertices().to_vec(),
                });
            }
            rows.push(position[f]);
        }
        rows.sort_unstable();
        columns.push(rows);
    }
    Ok(BoundaryMatrix {
        dims: order.iter().map(|&s| simplices[s].dim()).collect(),
        values: order.iter().map(|&s| fc.values()[s]).collect(),
        simplex_of_column: order,
        columns,
    })
}

/// Symmetric difference of two sorted index lists.
fn xor(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A persistence interval `[birth, death)`; `death` is infinite for
/// essential classes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    /// Indices of the creating and destroying simplexes in the complex.
    #[serde(skip)]
    pub birth_simplex: usize,
    #[serde(skip)]
    pub death_simplex: Option<usize>,
}

impl Interval {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn contains(&self, r: f64) -> bool {
        self.birth <= r && r < self.death
    }

    pub fn is_essential(&self) -> bool {
        self.death_simplex.is_none()
    }
}

/// All intervals, zero-length ones included, sorted by `(dim, birth, death)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    intervals: Vec<Interval>,
}

impl PersistenceDiagram {
    pub fn all(&self) -> &[Interval] {
        &self.intervals
    }

    /// Intervals of positive length.
    pub fn intervals(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(|i| i.death > i.birth)
    }

    /// Intervals of dimension `k` with persistence above `min_persistence`.
    pub fn significant(&self, k: usize, min_persistence: f64) -> Vec<&Interval> {
        self.intervals.iter().filter(|i| i.dim == k && i.persistence() > min_persistence).collect()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.intervals.iter().map(|i| i.dim).max()
    }

    /// Number of intervals of dimension `k` containing `r`.
    pub fn betti(&self, r: f64, k: usize) -> usize {
        self.intervals.iter().filter(|i| i.dim == k && i.contains(r)).count()
    }
}

/// Standard left-to-right column reduction.
pub fn reduce_and_pair(b: &BoundaryMatrix) -> PersistenceDiagram {
    let n = b.len();
    let mut columns = b.columns.clone();
    let mut owner_of_low: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    let mut intervals = Vec::new();
    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match owner_of_low[low] {
                Some(k) => columns[j] = xor(&columns[j], &columns[k]),
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            owner_of_low[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            intervals.push(Interval {
                dim: b.dims[low],
                birth: b.values[low],
                death: b.values[j],
                birth_simplex: b.simplex_of_column[low],
                death_simplex: Some(b.simplex_of_column[j]),
            });
        }
    }
    for j in (0..n).filter(|&j| !paired[j]) {
        intervals.push(Interval {
            dim: b.dims[j],
            birth: b.values[j],
            death: f64::INFINITY,
            birth_simplex: b.simplex_of_column[j],
            death_simplex: None,
        });
    }
    intervals.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
            .then(a.birth_simplex.cmp(&b.birth_simplex))
    });
    PersistenceDiagram { intervals }
}

pub fn persistence_diagram(fc: &FilteredComplex) -> Result<PersistenceDiagram> {
    Ok(reduce_and_pair(&boundary_matrix(fc)?))
}

/// `β_k` of the subcomplex with values `<= r`.
pub fn betti_at(fc: &FilteredComplex, r: f64, k: usize) -> Result<usize> {
    Ok(persistence_diagram(fc)?.betti(r, k))
}

/// `Σ_k (-1)^k #{k-simplexes with value <= r}`.
pub fn euler_characteristic(fc: &FilteredComplex, r: f64) -> i64 {
    fc.at_radius(r).map(|s: &Simplex| if s.dim().is_multiple_of(2) { 1 } else { -1 }).sum()
}

/// `max(|Δbirth|, |Δdeath|)`, infinite unless both deaths are finite or both infinite.
fn interval_cost(a: &Interval, b: &Interval) -> f64 {
    let death = match (a.death.is_finite(), b.death.is_finite()) {
        (true, true) => (a.death - b.death).abs(),
        (false, false) => 0.0,
        _ => f64::INFINITY,
    };
    (a.birth - b.birth).abs().max(death)
}

/// Smallest `δ` such that `a` and `b` admit a perfect matching with every
/// matched pair within `δ` in both coordinates. `None` when the multisets
/// differ in size or no finite matching exists.
pub fn matching_distance(a: &[&Interval], b: &[&Interval]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    if a.is_empty() {
        return Some(0.0);
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|p| b.iter().map(|q| interval_cost(p, q)).collect()).collect();
    let mut candidates: Vec<f64> = cost.iter().flatten().copied().filter(|c| c.is_finite()).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |delta: f64| perfect_matching_exists(&cost, delta);
    let (mut lo, mut hi) = (0, candidates.len());
    if hi == 0 || !feasible(candidates[hi - 1]) {
        return None;
    }
    hi -= 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(candidates[lo])
}

fn perfect_matching_exists(cost: &[Vec<f64>], delta: f64) -> bool {
    let n = cost.len();
    let mut match_of_right: Vec<Option<usize>> = vec![None; n];
    fn augment(u: usize, cost: &[Vec<f64>], delta: f64, seen: &mut [bool], m: &mut [Option<usize>]) -> bool {
        for v in 0..cost.len() {
            if cost[u][v] <= delta && !seen[v] {
                seen[v] = true;
                if m[v].is_none_or(|w| augment(w, cost, delta, seen, m)) {
                    m[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|u| augment(u, cost, delta, &mut vec![false; n], &mut match_of_right))
}

/// Per-dimension comparison of two diagrams.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionComparison {
    pub dim: usize,
    pub count_a: usize,
    pub count_b: usize,
    /// `None` when the intervals cannot be matched.
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramComparison {
    pub dims: Vec<DimensionComparison>,
}

impl DiagramComparison {
    /// Largest per-dimension matching distance; infinite if any dimension fails to match.
    pub fn max_discrepancy(&self) -> f64 {
        self.dims.iter().map(|d| d.distance.unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }

    pub fn agrees(&self, tol: f64) -> bool {
        self.max_discrepancy() <= tol
    }
}

/// Compares intervals of persistence above `min_persistence` in each of `dims`.
pub fn compare_diagrams(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    dims: impl IntoIterator<Item = usize>,
    min_persistence: f64,
) -> DiagramComparison {
    let dims = dims
        .into_iter()
        .map(|k| {
            let ia = a.significant(k, min_persistence);
            let ib = b.significant(k, min_persistence);
            DimensionComparison {
                dim: k,
                count_a: ia.len(),
                count_b: ib.len(),
                distance: matching_distance(&ia, &ib),
            }
        })
        .collect();
    DiagramComparison { dims }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::filtration::alpha_filtration;
    use crate::geometry::{jitter, Point, DEFAULT_EPSILON as EPS};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn filtered(generators: Vec<Vec<usize>>, n: usize, value: impl Fn(&Simplex) -> f64) -> FilteredComplex {
        let complex = SimplicialComplex::from_generators(generators, n);
        let values = complex.simplices().iter().map(value).collect();
        FilteredComplex::new(complex, values).unwrap()
    }

    /// Regular 8-gon on the unit circle, jittered by `1e-7` since it is cocircular.
    fn octagon() -> Vec<Point> {
        let exact: Vec<Point> =
            (0..8).map(|k| Point::from([(k as f64 * PI / 4.0).cos(), (k as f64 * PI / 4.0).sin()])).collect();
        jitter(&exact, 1e-7, &mut ChaCha8Rng::seed_from_u64(8))
    }

    #[test]
    fn single_edge() {
        let fc = filtered(vec![vec![0, 1]], 2, |s| if s.len() == 2 { 1.0 } else { 0.0 });
        let b = boundary_matrix(&fc).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.column(2), &[0, 1]);
        let dgm = reduce_and_pair(&b);
        let h0: Vec<(f64, f64)> = dgm.all().iter().map(|i| (i.birth, i.death)).collect();
        assert_eq!(h0, vec![(0.0, 1.0), (0.0, f64::INFINITY)]);
    }

    #[test]
    fn triangle_boundary_squares_to_zero() {
        let fc = filtered(vec![vec![0, 1, 2]], 3, |s| s.dim() as f64);
        let b = boundary_matrix(&fc).unwrap();
        assert!(b.boundary_squared_is_zero());
        assert!((0..b.len()).all(|j| b.column(j).len() == if b.dim(j) == 0 { 0 } else { b.dim(j) + 1 }));
    }

    #[test]
    fn non_monotone_values_are_rejected() {
        let fc = filtered(vec![vec![0, 1]], 2, |s| if s.len() == 2 { 1.0 } else { 2.0 });
        assert!(matches!(boundary_matrix(&fc), Err(Error::NonMonotone { .. })));
    }

    #[test]
    fn hollow_triangle_has_an_essential_loop() {
        let fc = filtered(vec![vec![0, 1], vec![1, 2], vec![0, 2]], 3, |s| s.dim() as f64);
        let dgm = persistence_diagram(&fc).unwrap();
        assert_eq!(dgm.betti(1.0, 1), 1);
        assert_eq!(dgm.betti(1.0, 0), 1);
        assert_eq!(dgm.betti(0.5, 0), 3);
    }

    #[test]
    fn octagon_loop() {
        let fc = alpha_filtration(&octagon(), EPS).unwrap();
        let dgm = persistence_diagram(&fc).unwrap();
        let h1: Vec<&Interval> = dgm.intervals().filter(|i| i.dim == 1).collect();
        assert_eq!(h1.len(), 1);
        assert!((h1[0].birth - (PI / 8.0).sin()).abs() < 1e-6);
        assert!((h1[0].death - 1.0).abs() < 1e-6);
        assert_eq!(dgm.betti(0.7, 1), 1);
        assert_eq!(dgm.betti(0.1, 0), 8);
    }

    #[test]
    fn euler_characteristic_matches_betti_numbers() {
        let fc = alpha_filtration(&octagon(), EPS).unwrap();
        let dgm = persistence_diagram(&fc).unwrap();
        for r in [0.0, 0.2, 0.38, 0.5, 0.9, 1.0, 2.0] {
            let from_betti: i64 = (0..=2).map(|k| if k % 2 == 0 { 1 } else { -1 } * dgm.betti(r, k) as i64).sum();
            assert_eq!(euler_characteristic(&fc, r), from_betti, "r = {r}");
        }
    }

    #[test]
    fn matching_distance_behaviour() {
        let iv = |birth: f64, death: f64| Interval {
            dim: 1,
            birth,
            death,
            birth_simplex: 0,
            death_simplex: death.is_finite().then_some(1),
        };
        let (a1, a2, b1, b2) = (iv(0.0, 1.0), iv(0.5, 2.0), iv(0.49, 2.0), iv(0.0, 1.02));
        assert_eq!(matching_distance(&[&a1, &a2], &[&b1, &b2]), Some(1.02 - 1.0));
        assert_eq!(matching_distance(&[&a1], &[&b1, &b2]), None);
        let inf = iv(0.0, f64::INFINITY);
        assert_eq!(matching_distance(&[&inf], &[&a1]), None);
        assert_eq!(matching_distance(&[&inf], &[&iv(0.0, f64::INFINITY)]), Some(0.0));
    }

    #[test]
    fn xor_of_sorted_lists() {
        assert_eq!(xor(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert!(xor(&[2], &[2]).is_empty());
    }
}
