//! Brute-force references, deliberately independent of the Delaunay and
//! top-down machinery.
//!
//! [`feasibility`] decides the coupled nerve condition at radius `r`
//! exactly, by enumerating the active sets of the underlying min-max problem;
//! [`feasibility_by_projection`] decides it approximately by extrapolated
//! projections onto Voronoi half-spaces and balls; [`value_by_bisection`]
//! inverts the exact test; [`nerve_at_infinity`] enumerates all
//! subsets whose labeled Voronoi cells meet; [`cech_filtration`] assigns the
//! minimal enclosing ball radius to every subset.

use std::collections::HashSet;

use itertools::Itertools;
use rayon::prelude::*;

use crate::complex::{PointCloudPair, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::filtration::FilteredComplex;
use crate::geometry::{bounding_diameter, dist2, dot, min_enclosing_ball, Point};

/// Violation tolerance, relative to `1 + diameter`.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-10;
/// Sweep cap of the projection method.
pub const MAX_SWEEPS: usize = 100_000;
/// Bracket width at which bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-7;
/// Default size cap of [`cech_filtration`].
pub const CECH_POINT_CAP: usize = 16;

/// Sweeps per stall window; must be large enough that slow convergence
/// toward a thin feasible set still shows progress.
const STALL_WINDOW: usize = 500;
/// Relative decrease of the best violation below which a window counts as stalled.
const STALL_RATIO: f64 = 1e-4;

/// Half-space `normal · c <= offset` with a unit normal.
#[derive(Clone, Debug)]
struct HalfSpace {
    normal: Vec<f64>,
    offset: f64,
}

/// The convex constraints deciding whether `Q` belongs to `A^co_r`.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    halfspaces: Vec<HalfSpace>,
    centers: Vec<Vec<f64>>,
    start: Vec<f64>,
    tol: f64,
}

/// Outcome of a projection run that terminated cleanly.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// A point violating no constraint by more than the tolerance.
    Feasible(Point),
    /// The violation stopped decreasing while still above tolerance.
    Infeasible,
}

impl FeasibilityProblem {
    /// Each vertex of `q` contributes the bisector half-spaces against every
    /// other point of its own cloud, plus a ball around itself.
    pub fn new(q: &Simplex, pair: &PointCloudPair) -> Result<Self> {
        if q.is_empty() || q.vertices().iter().any(|&v| v >= pair.len()) {
            return Err(Error::NotInComplex(q.vertices().to_vec()));
        }
        let n_x = pair.n_x();
        let mut halfspaces = Vec::new();
        for &v in q.vertices() {
            let p = pair.point(v);
            let others = if v < n_x { 0..n_x } else { n_x..pair.len() };
            for w in others.filter(|&w| w != v) {
                if pair.point(w) == p {
                    return Err(Error::NotInGeneralPosition(format!("points {v} and {w} coincide")));
                }
                let (normal, offset) = bisector(p, pair.point(w));
                halfspaces.push(HalfSpace { normal, offset });
            }
        }
        let centers: Vec<Vec<f64>> = q.vertices().iter().map(|&v| pair.point(v).to_vec()).collect();
        let d = pair.dim();
        let start =
            (0..d).map(|k| centers.iter().map(|c| c[k]).sum::<f64>() / centers.len() as f64).collect();
        let all: Vec<&Point> = pair.points().collect();
        Ok(FeasibilityProblem {
            halfspaces,
            centers,
            start,
            tol: FEASIBILITY_TOLERANCE * (1.0 + bounding_diameter(&all)),
        })
    }

    /// Largest constraint violation at `c` (0 when feasible).
    pub fn violation(&self, c: &[f64], r: f64) -> f64 {
        let mut worst = 0.0f64;
        for h in &self.halfspaces {
            worst = worst.max(dot(&h.normal, c) - h.offset);
        }
        if r.is_finite() {
            for p in &self.centers {
                worst = worst.max(dist2(c, p).sqrt() - r);
            }
        }
        worst
    }

    fn halfspace_violation(&self, c: &[f64]) -> f64 {
        self.halfspaces.iter().map(|h| dot(&h.normal, c) - h.offset).fold(0.0, f64::max)
    }

    /// Whether the labeled Voronoi cells meet: some projection of the start
    /// point onto a flat spanned by at most `d` half-space boundaries lies in
    /// every half-space.
    pub fn cells_meet(&self) -> bool {
        let d = self.start.len();
        (0..=d.min(self.halfspaces.len())).any(|k| {
            self.halfspaces.iter().combinations(k).any(|active| {
                let rows: Vec<(&[f64], f64)> = active.iter().map(|h| (h.normal.as_slice(), h.offset)).collect();
                flat_projection(&self.start, &rows).is_some_and(|c| self.halfspace_violation(&c) <= self.tol)
            })
        })
    }

    /// `min max_q |c - q|` over the intersection of the Voronoi cells, with
    /// a minimizer; `None` when the cells do not meet.
    ///
    /// The minimizer is the projection of some `q` onto the flat where a set
    /// of half-space boundaries are active and a set of points of `Q` are
    /// equidistant with `q`, using at most `d` independent equations; every
    /// such candidate is tried.
    pub fn min_max_radius(&self) -> Option<(f64, Point)> {
        let d = self.start.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for k in 0..=d.min(self.halfspaces.len()) {
            for active in self.halfspaces.iter().combinations(k) {
                for t in 1..=self.centers.len().min(d + 1 - k) {
                    for tied in (0..self.centers.len()).combinations(t) {
                        let anchor = &self.centers[tied[0]];
                        let mut rows: Vec<(Vec<f64>, f64)> =
                            active.iter().map(|h| (h.normal.clone(), h.offset)).collect();
                        for &j in &tied[1..] {
                            rows.push(bisector(anchor, &self.centers[j]));
                        }
                        let rows: Vec<(&[f64], f64)> = rows.iter().map(|(n, o)| (n.as_slice(), *o)).collect();
                        let Some(c) = flat_projection(anchor, &rows) else {
                            continue;
                        };
                        if self.halfspace_violation(&c) > self.tol {
                            continue;
                        }
                        let radius = self.centers.iter().map(|p| dist2(&c, p)).fold(0.0, f64::max).sqrt();
                        if best.as_ref().is_none_or(|(b, _)| radius < *b) {
                            best = Some((radius, c));
                        }
                    }
                }
            }
        }
        best.map(|(r, c)| (r, Point(c)))
    }

    /// Runs extrapolated projections at radius `r` (`f64::INFINITY` drops the balls).
    pub fn solve_by_projection(&self, r: f64) -> Result<Verdict> {
        if r.is_finite() {
            // Two balls farther apart than 2r cannot meet.
            let too_far = self.centers.iter().tuple_combinations().any(|(a, b)| dist2(a, b).sqrt() > 2.0 * r + self.tol);
            if too_far {
                return Ok(Verdict::Infeasible);
            }
        }
        let mut c = self.start.clone();
        let mut best = f64::INFINITY;
        let mut best_before_window = f64::INFINITY;
        for sweep in 0..MAX_SWEEPS {
            let v = self.violation(&c, r);
            if v <= self.tol {
                return Ok(Verdict::Feasible(Point(c)));
            }
            best = best.min(v);
            if sweep % STALL_WINDOW == 0 && sweep > 0 {
                if best > (1.0 - STALL_RATIO) * best_before_window {
                    return Ok(Verdict::Infeasible);
                }
                best_before_window = best;
            }
            self.sweep(&mut c, r);
        }
        Err(Error::IterationLimit(MAX_SWEEPS))
    }

    fn cyclic(&self, c: &mut [f64], r: f64) {
        for h in &self.halfspaces {
            let excess = dot(&h.normal, c) - h.offset;
            if excess > 0.0 {
                for (ci, ni) in c.iter_mut().zip(&h.normal) {
                    *ci -= excess * ni;
                }
            }
        }
        if r.is_finite() {
            for p in &self.centers {
                let dist = dist2(c, p).sqrt();
                if dist > r {
                    let scale = r / dist;
                    for (ci, pi) in c.iter_mut().zip(p) {
                        *ci = pi + (*ci - pi) * scale;
                    }
                }
            }
        }
    }

    /// One cyclic pass, then one extrapolated simultaneous step: move toward
    /// the mean of the projections onto the violated constraints, stretched by
    /// the ratio of the mean squared step to the squared mean step (at least 1).
    fn sweep(&self, c: &mut [f64], r: f64) {
        self.cyclic(c, r);
        let d = c.len();
        let mut mean = vec![0.0; d];
        let mut sq = 0.0;
        let mut count = 0usize;
        for h in &self.halfspaces {
            let excess = dot(&h.normal, c) - h.offset;
            if excess > 0.0 {
                for (m, ni) in mean.iter_mut().zip(&h.normal) {
                    *m -= excess * ni;
                }
                sq += excess * excess;
                count += 1;
            }
        }
        if r.is_finite() {
            for p in &self.centers {
                let dist = dist2(c, p).sqrt();
                if dist > r {
                    let shrink = (dist - r) / dist;
                    for ((m, ci), pi) in mean.iter_mut().zip(c.iter()).zip(p) {
                        *m -= (ci - pi) * shrink;
                    }
                    sq += (dist - r) * (dist - r);
                    count += 1;
                }
            }
        }
        if count == 0 {
            return;
        }
        let n = count as f64;
        let mean_sq: f64 = mean.iter().map(|m| (m / n) * (m / n)).sum();
        if mean_sq == 0.0 {
            return;
        }
        let stretch = (sq / n) / mean_sq;
        for (ci, m) in c.iter_mut().zip(&mean) {
            *ci += stretch * m / n;
        }
    }
}

/// Unit-normal half-space `{c : |c - a| <= |c - b|}`.
fn bisector(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let diff: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let len = dot(&diff, &diff).sqrt();
    let normal: Vec<f64> = diff.iter().map(|c| c / len).collect();
    let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    let offset = dot(&normal, &mid);
    (normal, offset)
}

/// Nearest point to `origin` on `{c : n_i · c = o_i}` for unit normals;
/// `None` when the normals are numerically dependent.
fn flat_projection(origin: &[f64], rows: &[(&[f64], f64)]) -> Option<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return Some(origin.to_vec());
    }
    // Gram system G λ = o - n · origin, then c = origin + Σ λ_i n_i.
    let mut g: Vec<Vec<f64>> = rows
        .iter()
        .map(|(a, _)| rows.iter().map(|(b, _)| dot(a, b)).collect())
        .collect();
    let mut rhs: Vec<f64> = rows.iter().map(|(n, o)| o - dot(n, origin)).collect();
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| g[i][col].abs().total_cmp(&g[j][col].abs()))?;
        if g[pivot][col].abs() < 1e-10 {
            return None;
        }
        g.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..k {
            let f = g[row][col] / g[col][col];
            let (upper, lower) = g.split_at_mut(row);
            for (target, source) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= f * source;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut lambda = vec![0.0; k];
    for row in (0..k).rev() {
        let tail: f64 = (row + 1..k).map(|j| g[row][j] * lambda[j]).sum();
        lambda[row] = (rhs[row] - tail) / g[row][row];
    }
    let mut c = origin.to_vec();
    for ((n, _), l) in rows.iter().zip(&lambda) {
        for (ci, ni) in c.iter_mut().zip(n.iter()) {
            *ci += l * ni;
        }
    }
    Some(c)
}

/// Whether the labeled Voronoi balls of radius `r` around `q` share a point.
/// `r = f64::INFINITY` tests the Voronoi cells alone. Exact up to the
/// violation tolerance.
pub fn feasibility(q: &Simplex, pair: &PointCloudPair, r: f64) -> Result<bool> {
    let problem = FeasibilityProblem::new(q, pair)?;
    Ok(if r.is_finite() {
        problem.min_max_radius().is_some_and(|(h, _)| h <= r)
    } else {
        problem.cells_meet()
    })
}

/// Approximate counterpart of [`feasibility`] by projections. Verdicts are
/// tolerance-sensitive near the filtration value, and far-away thin
/// feasible sets (flat hull simplexes) can stall into a false infeasible.
pub fn feasibility_by_projection(q: &Simplex, pair: &PointCloudPair, r: f64) -> Result<bool> {
    Ok(matches!(FeasibilityProblem::new(q, pair)?.solve_by_projection(r)?, Verdict::Feasible(_)))
}

/// The smallest radius at which `q` becomes feasible, to within
/// [`BISECTION_WIDTH`].
pub fn value_by_bisection(q: &Simplex, pair: &PointCloudPair) -> Result<f64> {
    let problem = FeasibilityProblem::new(q, pair)?;
    let not_in_complex = || Error::NotInComplex(q.vertices().to_vec());
    let (h, _) = problem.min_max_radius().ok_or_else(not_in_complex)?;
    if q.len() == 1 {
        return Ok(0.0);
    }
    let feasible = |r: f64| h <= r;
    let all: Vec<&Point> = pair.points().collect();
    let diameter = bounding_diameter(&all).max(f64::MIN_POSITIVE);
    // Flat hull simplexes can need more than the diameter.
    let mut hi = diameter;
    while !feasible(hi) {
        hi *= 2.0;
        if hi > 1e6 * (1.0 + diameter) {
            return Err(not_in_complex());
        }
    }
    let mut lo = 0.0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All subsets of at most `max_size` vertices whose labeled Voronoi cells
/// intersect, in `(dimension, lexicographic)` order. A subset is tested only
/// when all its facets passed.
pub fn nerve_at_infinity(pair: &PointCloudPair, max_size: usize) -> Result<Vec<Simplex>> {
    let n = pair.len();
    let mut level: Vec<Simplex> = (0..n).map(|v| Simplex::new(vec![v])).collect();
    let mut out = level.clone();
    for _ in 1..max_size {
        let present: HashSet<&Simplex> = level.iter().collect();
        let candidates: Vec<Simplex> = level
            .iter()
            .flat_map(|s| {
                let last = *s.vertices().last().expect("non-empty");
                (last + 1..n).map(move |v| {
                    let mut vs = s.vertices().to_vec();
                    vs.push(v);
                    Simplex::new(vs)
                })
            })
            .filter(|c| c.facets().all(|(f, _)| present.contains(&f)))
            .collect();
        let verdicts: Vec<bool> = candidates
            .par_iter()
            .map(|c| feasibility(c, pair, f64::INFINITY).map_err(|e| e.at(c.vertices())))
            .collect::<Result<_>>()?;
        level = candidates.into_iter().zip(verdicts).filter(|(_, ok)| *ok).map(|(c, _)| c).collect();
        if level.is_empty() {
            break;
        }
        out.extend(level.iter().cloned());
    }
    Ok(out)
}

/// Čech filtration of `points` on all subsets of at most `max_dim + 1`
/// vertices, valued by minimal enclosing ball radius.
pub fn cech_filtration(points: &[Point], max_dim: usize, eps: f64) -> Result<FilteredComplex> {
    cech_filtration_capped(points, max_dim, eps, CECH_POINT_CAP)
}

pub fn cech_filtration_capped(points: &[Point], max_dim: usize, eps: f64, cap: usize) -> Result<FilteredComplex> {
    if points.len() > cap {
        return Err(Error::TooLarge { n: points.len(), cap });
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let generators = (1..=max_dim + 1).flat_map(|k| (0..points.len()).combinations(k));
    let complex = SimplicialComplex::from_generators(generators, points.len());
    let mut values = vec![0.0; complex.len()];
    // Stored order lists faces first; the max with facet values absorbs rounding.
    for (i, s) in complex.simplices().iter().enumerate() {
        if s.len() == 1 {
            continue;
        }
        let members: Vec<&Point> = s.vertices().iter().map(|&v| &points[v]).collect();
        let mut value = min_enclosing_ball(&members, eps)?.radius;
        for (f, _) in s.facets() {
            value = value.max(values[complex.index_of(&f).expect("face-closed")]);
        }
        values[i] = value;
    }
    FilteredComplex::new(complex, values)
}
