//! Abstract simplicial complexes and the construction of `A^co_∞(X, Y)`.
//!
//! Vertices are indexed globally: the points of `X` come first, then the
//! points of `Y`. A simplex is a sorted index list, and its `X`/`Y` parts are
//! recovered from the index threshold `|X|`.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::delaunay::{triangulate, Triangulation};
use crate::error::{Error, Result};
use crate::geometry::{check_coupled_general_position, common_dimension, GeneralPositionReport, Point};

/// An ordered pair of point clouds in a common `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloudPair {
    x: Vec<Point>,
    y: Vec<Point>,
    dim: usize,
}

impl PointCloudPair {
    pub fn new(x: Vec<Point>, y: Vec<Point>) -> Result<Self> {
        let dx = common_dimension(&x)?;
        let dy = common_dimension(&y)?;
        let dim = match (dx, dy) {
            (Some(a), Some(b)) if a != b => return Err(Error::DimensionMismatch { expected: a, found: b }),
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::EmptyInput),
        };
        Ok(PointCloudPair { x, y, dim })
    }

    /// Like [`PointCloudPair::new`], but also runs the exhaustive coupled
    /// general position check.
    pub fn checked(x: Vec<Point>, y: Vec<Point>, eps: f64) -> Result<Self> {
        let pair = Self::new(x, y)?;
        let report = pair.check_general_position(eps);
        if let Some(v) = report.violations.first() {
            return Err(Error::NotInGeneralPosition(format!(
                "{} violation(s), first: {:?} on {:?}",
                report.violations.len(),
                v.kind,
                v.subset
            )));
        }
        Ok(pair)
    }

    pub fn x(&self) -> &[Point] {
        &self.x
    }

    pub fn y(&self) -> &[Point] {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_x(&self) -> usize {
        self.x.len()
    }

    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point by global index.
    pub fn point(&self, v: usize) -> &Point {
        if v < self.x.len() {
            &self.x[v]
        } else {
            &self.y[v - self.x.len()]
        }
    }

    pub fn is_x(&self, v: usize) -> bool {
        v < self.x.len()
    }

    /// All points in global order.
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.x.iter().chain(&self.y)
    }

    pub fn check_general_position(&self, eps: f64) -> GeneralPositionReport {
        check_coupled_general_position(&self.x, &self.y, eps)
    }
}

/// A simplex as a sorted list of distinct global vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Dimension, i.e. vertex count minus one.
    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The codimension-1 faces, each paired with the removed vertex.
    pub fn facets(&self) -> impl Iterator<Item = (Simplex, usize)> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            let face = self.0.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
            (Simplex(face), self.0[skip])
        })
    }

    /// Splits into the `X` part and the `Y` part.
    pub fn split(&self, n_x: usize) -> (&[usize], &[usize]) {
        let cut = self.0.partition_point(|&v| v < n_x);
        self.0.split_at(cut)
    }
}

impl From<Vec<usize>> for Simplex {
    fn from(v: Vec<usize>) -> Self {
        Simplex::new(v)
    }
}

/// A face-closed set of simplexes, stored in `(dimension, lexicographic)`
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
}

impl SimplicialComplex {
    /// Downward closure of `generators`, plus the isolated vertices
    /// `0..n_vertices`.
    pub fn from_generators<I, S>(generators: I, n_vertices: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Simplex>,
    {
        let mut all: BTreeSet<(usize, Simplex)> = (0..n_vertices).map(|v| (0, Simplex(vec![v]))).collect();
        for g in generators {
            let g: Simplex = g.into();
            for k in 1..=g.len() {
                for face in g.0.iter().copied().combinations(k) {
                    all.insert((k - 1, Simplex(face)));
                }
            }
        }
        let simplices: Vec<Simplex> = all.into_iter().map(|(_, s)| s).collect();
        let index = simplices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        SimplicialComplex { simplices, index }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains_key(s)
    }

    /// Largest simplex dimension, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.last().map(Simplex::dim)
    }

    /// Number of simplexes in each dimension `0..=dim`.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim().map_or(0, |d| d + 1)];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }

    pub fn of_dim(&self, k: usize) -> impl Iterator<Item = (usize, &Simplex)> {
        self.simplices.iter().enumerate().filter(move |(_, s)| s.dim() == k)
    }
}

/// A simplicial complex on the vertices of a point-cloud pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledComplex {
    pair: PointCloudPair,
    complex: SimplicialComplex,
}

impl CoupledComplex {
    /// Wraps an externally supplied simplex list, closing it under faces.
    pub fn from_simplices<I, S>(pair: PointCloudPair, simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Simplex>,
    {
        let simplices: Vec<Simplex> = simplices.into_iter().map(Into::into).collect();
        for s in &simplices {
            if s.is_empty() || s.vertices().last().is_some_and(|&v| v >= pair.len()) {
                return Err(Error::NotInComplex(s.vertices().to_vec()));
            }
            if s.len() > pair.dim() + 2 {
                return Err(Error::DimensionOverflow {
                    size: s.len(),
                    max: pair.dim() + 2,
                });
            }
        }
        let n = pair.len();
        Ok(CoupledComplex {
            pair,
            complex: SimplicialComplex::from_generators(simplices, n),
        })
    }

    pub fn pair(&self) -> &PointCloudPair {
        &self.pair
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn simplices(&self) -> &[Simplex] {
        self.complex.simplices()
    }

    /// True when every vertex of `s` is in `X`.
    pub fn is_pure_x(&self, s: &Simplex) -> bool {
        s.split(self.pair.n_x()).1.is_empty()
    }

    pub fn is_pure_y(&self, s: &Simplex) -> bool {
        s.split(self.pair.n_x()).0.is_empty()
    }
}

/// `X × {0}` followed by `Y × {1}`.
pub fn lift(pair: &PointCloudPair) -> Vec<Point> {
    pair.x
        .iter()
        .map(|p| p.lifted(0.0))
        .chain(pair.y.iter().map(|p| p.lifted(1.0)))
        .collect()
}

/// `A^co_∞(X, Y)`: the projection of the Delaunay triangulation of the lifted
/// configuration, with all faces. An empty cloud degrades to the Delaunay
/// complex of the other one.
pub fn coupled_alpha_infty(pair: &PointCloudPair, eps: f64) -> Result<CoupledComplex> {
    Ok(CoupledComplex::from_triangulation(pair, &coupled_triangulation(pair, eps)?))
}

/// The triangulation behind [`coupled_alpha_infty`]: of the lifted
/// configuration, or of the non-empty cloud alone. Vertex indices are global.
pub fn coupled_triangulation(pair: &PointCloudPair, eps: f64) -> Result<Triangulation> {
    if pair.y.is_empty() || pair.x.is_empty() {
        triangulate(if pair.y.is_empty() { &pair.x } else { &pair.y }, eps)
    } else {
        triangulate(&lift(pair), eps)
    }
}

impl CoupledComplex {
    /// All faces of the cells of `tri`; projection keeps vertex indices.
    pub fn from_triangulation(pair: &PointCloudPair, tri: &Triangulation) -> Self {
        CoupledComplex {
            pair: pair.clone(),
            complex: SimplicialComplex::from_generators(tri.cells().to_vec(), pair.len()),
        }
    }
}

/// `A_∞(X)`, the Delaunay complex of a single cloud (as a pair with empty `Y`).
pub fn alpha_infty(x: &[Point], eps: f64) -> Result<CoupledComplex> {
    let pair = PointCloudPair::new(x.to_vec(), Vec::new())?;
    coupled_alpha_infty(&pair, eps)
}
