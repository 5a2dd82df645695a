use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense row-major matrix for the handful of rows and columns the
/// low-dimensional solvers need.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix with `cols` columns from row vectors. `cols` is needed
    /// explicitly so that a matrix with zero rows still knows its width.
    pub fn from_row_vecs(cols: usize, rows: &[Vec<f64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Convenience for non-empty row lists.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_row_vecs(cols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^T v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "shape mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self[(i, j)] * v[i];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Rank decided on the pivoted QR diagonal relative to its largest entry.
    pub fn numerical_rank(&self, eps: f64) -> usize {
        PivotedQr::new(self).rank(eps)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Householder QR with column pivoting: `M[:, perm[j]] = Q R[:, j]`, with `Q`
/// square orthogonal and `|R_jj|` non-increasing.
pub(crate) struct PivotedQr {
    pub q: Matrix,
    pub r: Matrix,
    pub perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(m: &Matrix) -> Self {
        let (n, k) = (m.nrows(), m.ncols());
        let mut r = m.clone();
        let mut q = Matrix::identity(n);
        let mut perm: Vec<usize> = (0..k).collect();
        let steps = n.min(k);
        let mut v = vec![0.0; n];

        for j in 0..steps {
            // Pivot: bring the column with the largest remaining norm to `j`.
            let residual = |r: &Matrix, c: usize| (j..n).map(|i| r[(i, c)] * r[(i, c)]).sum::<f64>();
            let (best, best_norm2) = (j..k)
                .map(|c| (c, residual(&r, c)))
                .fold((j, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best != j {
                for i in 0..n {
                    let tmp = r[(i, j)];
                    r[(i, j)] = r[(i, best)];
                    r[(i, best)] = tmp;
                }
                perm.swap(j, best);
            }
            let norm = best_norm2.sqrt();
            if norm == 0.0 {
                break;
            }
            let alpha = if r[(j, j)] > 0.0 { -norm } else { norm };
            for i in j..n {
                v[i] = r[(i, j)];
            }
            v[j] -= alpha;
            let vnorm2: f64 = (j..n).map(|i| v[i] * v[i]).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            for c in j..k {
                let s: f64 = (j..n).map(|i| v[i] * r[(i, c)]).sum();
                let f = 2.0 * s / vnorm2;
                for i in j..n {
                    r[(i, c)] -= f * v[i];
                }
            }
            for row in 0..n {
                let s: f64 = (j..n).map(|i| q[(row, i)] * v[i]).sum();
                let f = 2.0 * s / vnorm2;
                for i in j..n {
                    q[(row, i)] -= f * v[i];
                }
            }
            // Exact zeros below the diagonal.
            for i in j + 1..n {
                r[(i, j)] = 0.0;
            }
        }
        PivotedQr { q, r, perm }
    }

    pub fn rank(&self, eps: f64) -> usize {
        let steps = self.r.nrows().min(self.r.ncols());
        if steps == 0 {
            return 0;
        }
        let lead = self.r[(0, 0)].abs();
        if lead == 0.0 {
            return 0;
        }
        let tol = eps * lead;
        (0..steps).take_while(|&j| self.r[(j, j)].abs() > tol).count()
    }
}

/// Orthonormal basis of `ker(A)` as the columns of a `d x (d - rows)` matrix.
///
/// Fails with [`Error::RankDeficient`] when the rows of `A` are numerically
/// dependent.
pub fn null_space_basis(a: &Matrix, eps: f64) -> Result<Matrix> {
    let (rows, d) = (a.nrows(), a.ncols());
    if rows == 0 {
        return Ok(Matrix::identity(d));
    }
    if rows > d {
        return Err(Error::RankDeficient { rank: d, rows });
    }
    let qr = PivotedQr::new(&a.transpose());
    let rank = qr.rank(eps);
    if rank < rows {
        return Err(Error::RankDeficient { rank, rows });
    }
    let mut f = Matrix::zeros(d, d - rows);
    for i in 0..d {
        for j in rows..d {
            f[(i, j - rows)] = qr.q[(i, j)];
        }
    }
    Ok(f)
}

/// Minimum-norm solution of the full-row-rank system `A c = b`.
pub fn particular_solution(a: &Matrix, b: &[f64], eps: f64) -> Result<Vec<f64>> {
    let (rows, d) = (a.nrows(), a.ncols());
    assert_eq!(rows, b.len(), "rhs length must match row count");
    if rows == 0 {
        return Ok(vec![0.0; d]);
    }
    if rows > d {
        return Err(Error::RankDeficient { rank: d, rows });
    }
    // A^T P = Q R  =>  A = P R^T Q^T, and c = Q_1 t with R_1^T t = P^T b.
    let qr = PivotedQr::new(&a.transpose());
    let rank = qr.rank(eps);
    if rank < rows {
        return Err(Error::RankDeficient { rank, rows });
    }
    let mut t = vec![0.0; rows];
    for i in 0..rows {
        let mut s = b[qr.perm[i]];
        for (j, tj) in t.iter().enumerate().take(i) {
            s -= qr.r[(j, i)] * tj;
        }
        t[i] = s / qr.r[(i, i)];
    }
    let mut c = vec![0.0; d];
    for (j, tj) in t.iter().enumerate() {
        for (i, ci) in c.iter_mut().enumerate() {
            *ci += qr.q[(i, j)] * tj;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-9;

    fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.data
            .iter()
            .zip(&b.data)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn null_space_of_single_axis_row() {
        let a = Matrix::from_rows(&[vec![2.0, 0.0]]);
        let f = null_space_basis(&a, EPS).unwrap();
        assert_eq!((f.nrows(), f.ncols()), (2, 1));
        assert!(f[(0, 0)].abs() < 1e-15);
        assert!((f[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn null_space_of_empty_system_spans_everything() {
        let a = Matrix::zeros(0, 2);
        let f = null_space_basis(&a, EPS).unwrap();
        assert_eq!(f, Matrix::identity(2));
    }

    #[test]
    fn null_space_of_full_rank_system_is_empty() {
        let a = Matrix::identity(2);
        let f = null_space_basis(&a, EPS).unwrap();
        assert_eq!((f.nrows(), f.ncols()), (2, 0));
    }

    #[test]
    fn null_space_rejects_dependent_rows() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0]]);
        assert_eq!(
            null_space_basis(&a, EPS),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        );
    }

    #[test]
    fn particular_solution_examples() {
        let a = Matrix::from_rows(&[vec![2.0, 0.0]]);
        let c = particular_solution(&a, &[2.0], EPS).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-15 && c[1].abs() < 1e-15);

        let c = particular_solution(&Matrix::zeros(0, 3), &[], EPS).unwrap();
        assert_eq!(c, vec![0.0; 3]);

        let c = particular_solution(&Matrix::identity(2), &[3.0, 4.0], EPS).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-14 && (c[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rank_of_wide_matrix_with_repeated_columns() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert_eq!(m.numerical_rank(EPS), 2);
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]);
        assert_eq!(m.numerical_rank(EPS), 1);
        assert_eq!(Matrix::zeros(3, 2).numerical_rank(EPS), 0);
    }

    fn matrix_strategy() -> impl Strategy<Value = Matrix> {
        (1usize..=4)
            .prop_flat_map(|d| (Just(d), 0..=d))
            .prop_flat_map(|(d, rows)| {
                proptest::collection::vec(-10.0f64..10.0, rows * d)
                    .prop_map(move |data| Matrix { rows, cols: d, data })
            })
    }

    proptest! {
        #[test]
        fn null_space_is_orthonormal_and_annihilated(a in matrix_strategy()) {
            // Random continuous entries are full rank with probability one.
            let Ok(f) = null_space_basis(&a, EPS) else { return Ok(()); };
            prop_assert_eq!(f.ncols(), a.ncols() - a.nrows());
            let af = a.mul(&f);
            prop_assert!(af.max_abs() < 1e-9 * a.max_abs().max(1.0));
            let ftf = f.transpose().mul(&f);
            prop_assert!(max_abs_diff(&ftf, &Matrix::identity(f.ncols())) < 1e-12);
        }

        #[test]
        fn particular_solution_solves_and_lies_in_row_space(a in matrix_strategy(), seed in 0u64..1000) {
            let b: Vec<f64> = (0..a.nrows()).map(|i| ((seed + i as u64) % 7) as f64 - 3.0).collect();
            let Ok(c) = particular_solution(&a, &b, EPS) else { return Ok(()); };
            let ac = a.mul_vec(&c);
            for (x, y) in ac.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-8 * (1.0 + y.abs()));
            }
            // Minimum norm: orthogonal to the null space.
            let f = null_space_basis(&a, EPS).unwrap();
            for v in f.tr_mul_vec(&c) {
                prop_assert!(v.abs() < 1e-8 * (1.0 + c.iter().map(|x| x.abs()).sum::<f64>()));
            }
        }
    }
}
