//! Delaunay triangulations in `R^m`.
//!
//! [`delaunay_bruteforce`] enumerates every `(m+1)`-subset and keeps those with
//! an empty circumsphere; it is the reference. [`delaunay_incremental`] is a
//! Bowyer-Watson insertion with a symbolic vertex at infinity, so hull facets
//! are handled without a bounding super-simplex. Both reject inputs where a
//! point lies on a relevant circumsphere within tolerance instead of picking
//! one of several valid triangulations.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::geometry::{
    affine_rank, bounding_diameter, common_dimension, distance_tolerance, dot, equidistant_center,
    null_space_basis, sub, Matrix, Point, Sphere, SphereSide,
};

/// A triangulation of a point set: the top-dimensional cells plus, through
/// [`Triangulation::faces`], their downward closure.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
}

impl Triangulation {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Cells as sorted vertex-index lists, in lexicographic order.
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Every face of every cell, ordered by size and then lexicographically.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut faces = BTreeSet::new();
        for cell in &self.cells {
            for k in 1..=cell.len() {
                for face in cell.iter().copied().combinations(k) {
                    faces.insert((face.len(), face));
                }
            }
        }
        faces.into_iter().map(|(_, f)| f).collect()
    }

    /// Verifies the empty-circumsphere property of every cell against every
    /// vertex, at the given tolerance.
    pub fn check_empty_circumspheres(&self, eps: f64) -> Result<()> {
        let tol = distance_tolerance(eps, bounding_diameter(&self.vertices));
        for cell in &self.cells {
            let members: Vec<&Point> = cell.iter().map(|&i| &self.vertices[i]).collect();
            if members.len() < 2 {
                continue;
            }
            let sphere = equidistant_center(&members, eps)?;
            for (i, p) in self.vertices.iter().enumerate() {
                if cell.binary_search(&i).is_ok() {
                    continue;
                }
                if sphere.side(p, tol) != SphereSide::Outside {
                    return Err(Error::AmbiguousTriangulation {
                        cell: cell.clone(),
                        point: i,
                    });
                }
            }
        }
        Ok(())
    }

    fn from_cells(vertices: Vec<Point>, mut cells: Vec<Vec<usize>>) -> Self {
        for c in &mut cells {
            c.sort_unstable();
        }
        cells.sort();
        cells.dedup();
        Triangulation { vertices, cells }
    }
}

fn validate(points: &[Point], eps: f64) -> Result<usize> {
    let m = common_dimension(points)?.ok_or(Error::EmptyInput)?;
    if points.len() < m + 1 {
        return Err(Error::TooFewPoints {
            needed: m + 1,
            found: points.len(),
        });
    }
    if affine_rank(points, eps) < m {
        return Err(Error::DegenerateInput);
    }
    Ok(m)
}

/// Reference Delaunay triangulation by exhaustive enumeration. Affinely
/// dependent subsets are skipped. `O(n^(m+2))`.
pub fn delaunay_bruteforce(points: &[Point], eps: f64) -> Result<Triangulation> {
    let m = validate(points, eps)?;
    let tol = distance_tolerance(eps, bounding_diameter(points));
    let mut cells = Vec::new();
    for subset in (0..points.len()).combinations(m + 1) {
        let members: Vec<&Point> = subset.iter().map(|&i| &points[i]).collect();
        let Ok(sphere) = equidistant_center(&members, eps) else {
            continue;
        };
        let mut on_sphere = None;
        let mut empty = true;
        for (i, p) in points.iter().enumerate() {
            if subset.binary_search(&i).is_ok() {
                continue;
            }
            match sphere.side(p, tol) {
                SphereSide::Inside => {
                    empty = false;
                    break;
                }
                SphereSide::On => on_sphere = on_sphere.or(Some(i)),
                SphereSide::Outside => {}
            }
        }
        if empty {
            if let Some(point) = on_sphere {
                return Err(Error::AmbiguousTriangulation { cell: subset, point });
            }
            cells.push(subset);
        }
    }
    Ok(Triangulation::from_cells(points.to_vec(), cells))
}

const INFINITE: usize = usize::MAX;

enum Shape {
    Finite(Sphere),
    /// Hull facet joined to the vertex at infinity. `normal . p - offset` is
    /// the signed distance to the facet's hyperplane, positive outside.
    Infinite {
        normal: Vec<f64>,
        offset: f64,
        facet_sphere: Sphere,
    },
}

struct Cell {
    vertices: Vec<usize>,
    shape: Shape,
    alive: bool,
}

struct Builder<'a> {
    points: &'a [Point],
    eps: f64,
    tol: f64,
    interior: Vec<f64>,
    cells: Vec<Cell>,
}

impl<'a> Builder<'a> {
    fn make_cell(&self, mut vertices: Vec<usize>) -> Result<Cell> {
        vertices.sort_unstable();
        let degenerate = || Error::NotInGeneralPosition(format!("flat cell {vertices:?} during insertion"));
        let finite: Vec<&Point> = vertices.iter().filter(|&&v| v != INFINITE).map(|&v| &self.points[v]).collect();
        let shape = if finite.len() == vertices.len() {
            Shape::Finite(equidistant_center(&finite, self.eps).map_err(|_| degenerate())?)
        } else {
            let facet_sphere = equidistant_center(&finite, self.eps).map_err(|_| degenerate())?;
            let base = finite[0];
            let rows: Vec<Vec<f64>> = finite[1..].iter().map(|p| sub(p, base)).collect();
            let basis = null_space_basis(&Matrix::from_row_vecs(base.dim(), &rows), self.eps).map_err(|_| degenerate())?;
            let mut normal = basis.column(0);
            let mut offset = dot(&normal, base);
            let inner = dot(&normal, &self.interior) - offset;
            if inner.abs() <= self.tol {
                return Err(degenerate());
            }
            if inner > 0.0 {
                normal.iter_mut().for_each(|c| *c = -*c);
                offset = -offset;
            }
            Shape::Infinite {
                normal,
                offset,
                facet_sphere,
            }
        };
        Ok(Cell {
            vertices,
            shape,
            alive: true,
        })
    }

    fn conflicts(&self, cell: &Cell, p: usize) -> Result<bool> {
        let point = &self.points[p];
        let side = match &cell.shape {
            Shape::Finite(sphere) => sphere.side(point, self.tol),
            Shape::Infinite {
                normal,
                offset,
                facet_sphere,
            } => {
                let height = dot(normal, point) - offset;
                if height > self.tol {
                    return Ok(true);
                }
                if height < -self.tol {
                    return Ok(false);
                }
                // On the hull hyperplane: the limit sphere meets it in the
                // facet's circumsphere.
                facet_sphere.side(point, self.tol)
            }
        };
        match side {
            SphereSide::Inside => Ok(true),
            SphereSide::Outside => Ok(false),
            SphereSide::On => Err(Error::AmbiguousTriangulation {
                cell: cell.vertices.iter().copied().filter(|&v| v != INFINITE).collect(),
                point: p,
            }),
        }
    }

    fn insert(&mut self, p: usize) -> Result<()> {
        let mut conflicting = Vec::new();
        for (idx, cell) in self.cells.iter().enumerate() {
            if cell.alive && self.conflicts(cell, p)? {
                conflicting.push(idx);
            }
        }
        if conflicting.is_empty() {
            return Err(Error::NotInGeneralPosition(format!("point {p} conflicts with no cell")));
        }
        // Facets seen once among the conflicting cells bound the cavity.
        let mut facet_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for &idx in &conflicting {
            let verts = &self.cells[idx].vertices;
            for skip in 0..verts.len() {
                let facet: Vec<usize> = verts.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                *facet_count.entry(facet).or_default() += 1;
            }
        }
        let mut boundary: Vec<Vec<usize>> = facet_count.into_iter().filter(|&(_, n)| n == 1).map(|(f, _)| f).collect();
        boundary.sort();
        let mut fresh = Vec::with_capacity(boundary.len());
        for mut facet in boundary {
            facet.push(p);
            fresh.push(self.make_cell(facet)?);
        }
        for idx in conflicting {
            self.cells[idx].alive = false;
        }
        self.cells.extend(fresh);
        let dead = self.cells.iter().filter(|c| !c.alive).count();
        if dead > self.cells.len() / 2 {
            self.cells.retain(|c| c.alive);
        }
        Ok(())
    }
}

/// Bowyer-Watson triangulation. Points are inserted in lexicographic order of
/// their coordinates; the result does not depend on the input order.
pub fn delaunay_incremental(points: &[Point], eps: f64) -> Result<Triangulation> {
    let m = validate(points, eps)?;
    let tol = distance_tolerance(eps, bounding_diameter(points));

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(points[b].iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // Initial simplex: greedily take points that raise the affine rank.
    let mut seed: Vec<usize> = vec![order[0]];
    for &i in &order[1..] {
        if seed.len() == m + 1 {
            break;
        }
        let mut trial: Vec<&Point> = seed.iter().map(|&s| &points[s]).collect();
        trial.push(&points[i]);
        if affine_rank(&trial, eps) == seed.len() {
            seed.push(i);
        }
    }
    if seed.len() < m + 1 {
        return Err(Error::DegenerateInput);
    }
    let mut interior = vec![0.0; m];
    for &s in &seed {
        for (acc, c) in interior.iter_mut().zip(points[s].iter()) {
            *acc += c / (m + 1) as f64;
        }
    }

    let mut builder = Builder {
        points,
        eps,
        tol,
        interior,
        cells: Vec::new(),
    };
    let first = builder.make_cell(seed.clone())?;
    builder.cells.push(first);
    for skip in 0..=m {
        let mut verts: Vec<usize> = seed.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
        verts.push(INFINITE);
        let cell = builder.make_cell(verts)?;
        builder.cells.push(cell);
    }
    for &i in &order {
        if !seed.contains(&i) {
            builder.insert(i)?;
        }
    }

    let cells = builder
        .cells
        .into_iter()
        .filter(|c| c.alive && matches!(c.shape, Shape::Finite(_)))
        .map(|c| c.vertices)
        .collect();
    Ok(Triangulation::from_cells(points.to_vec(), cells))
}

/// Delaunay triangulation that also accepts at most `m+1` affinely
/// independent points, whose triangulation is the single simplex they span.
pub fn triangulate(points: &[Point], eps: f64) -> Result<Triangulation> {
    let Some(m) = common_dimension(points)? else {
        return Ok(Triangulation::from_cells(Vec::new(), Vec::new()));
    };
    if points.len() <= m + 1 {
        if affine_rank(points, eps) + 1 < points.len() {
            return Err(Error::DegenerateInput);
        }
        return Ok(Triangulation::from_cells(points.to_vec(), vec![(0..points.len()).collect()]));
    }
    delaunay_incremental(points, eps)
}
