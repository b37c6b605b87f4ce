//! Small dense linear algebra: a row-major matrix and a growable Cholesky factor.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
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

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four accumulators let the compiler vectorize without reassociating.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Lower-triangular Cholesky factor stored packed by rows, growable one row
/// at a time (bordered update).
#[derive(Debug, Clone, Default)]
pub struct CholeskyFactor {
    n: usize,
    packed: Vec<f64>,
}

impl CholeskyFactor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Factorizes the leading `n x n` block of a symmetric matrix given by
    /// `entry(i, j)` for `j <= i`.
    pub fn factorize(n: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut factor = CholeskyFactor {
            n: 0,
            packed: Vec::with_capacity(n * (n + 1) / 2),
        };
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            row.clear();
            row.extend((0..i).map(|j| entry(i, j)));
            factor.forward_solve_in_place(&mut row);
            let pivot_sq = entry(i, i) - dot(&row, &row);
            factor.push_row(&row, pivot_sq)?;
        }
        Ok(factor)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.packed[start..start + i + 1]
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.packed[i * (i + 1) / 2 + i]
    }

    /// Overwrites `b` with `L^{-1} b`.
    pub fn forward_solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n, "forward solve dimension mismatch");
        for i in 0..self.n {
            let row = self.row(i);
            let s = dot(&row[..i], &b[..i]);
            b[i] = (b[i] - s) / row[i];
        }
    }

    pub fn forward_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut out = b.to_vec();
        self.forward_solve_in_place(&mut out);
        out
    }

    /// Overwrites `y` with `L^{-T} y`.
    pub fn backward_solve_in_place(&self, y: &mut [f64]) {
        assert_eq!(y.len(), self.n, "backward solve dimension mismatch");
        for i in (0..self.n).rev() {
            let xi = y[i] / self.diag(i);
            y[i] = xi;
            let row = self.row(i);
            for j in 0..i {
                y[j] -= row[j] * xi;
            }
        }
    }

    /// Appends the row `[l, sqrt(pivot_sq)]`, where `l = L^{-1} a` for the new
    /// off-diagonal column `a`.
    pub fn push_row(&mut self, l: &[f64], pivot_sq: f64) -> Result<()> {
        assert_eq!(l.len(), self.n, "bordered row has the wrong length");
        if !pivot_sq.is_finite() || pivot_sq <= 0.0 {
            return Err(Error::Factorization {
                pivot: self.n,
                value: pivot_sq,
            });
        }
        self.packed.extend_from_slice(l);
        self.packed.push(pivot_sq.sqrt());
        self.n += 1;
        Ok(())
    }

    /// `ln det(L L^T) = 2 sum ln L_ii`.
    pub fn log_det(&self) -> f64 {
        (0..self.n).map(|i| self.diag(i).ln()).sum::<f64>() * 2.0
    }

    /// `L L^T` as a dense matrix.
    pub fn reconstruct(&self) -> Matrix {
        let mut out = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..=i {
                let v = dot(&self.row(i)[..=j], &self.row(j)[..=j]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..11).map(|i| 1.0 - i as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }

    #[test]
    fn factorize_and_solve() {
        // A = [[4, 2, 0.4], [2, 5, 1], [0.4, 1, 3]]
        let a = [[4.0, 2.0, 0.4], [2.0, 5.0, 1.0], [0.4, 1.0, 3.0]];
        let l = CholeskyFactor::factorize(3, |i, j| a[i][j]).unwrap();
        let rec = l.reconstruct();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rec[(i, j)] - a[i][j]).abs() < 1e-14);
            }
        }
        let b = [1.0, -2.0, 0.5];
        let mut x = l.forward_solve(&b);
        l.backward_solve_in_place(&mut x);
        for i in 0..3 {
            let ax: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-13);
        }
        let det = 4.0 * (5.0 * 3.0 - 1.0) - 2.0 * (2.0 * 3.0 - 0.4) + 0.4 * (2.0 - 5.0 * 0.4);
        assert!((l.log_det() - f64::ln(det)).abs() < 1e-13);
    }

    #[test]
    fn rejects_indefinite() {
        let a = [[1.0, 2.0], [2.0, 1.0]];
        let err = CholeskyFactor::factorize(2, |i, j| a[i][j]).unwrap_err();
        assert!(matches!(err, Error::Factorization { pivot: 1, .. }));
    }
}
