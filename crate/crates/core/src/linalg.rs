//! Small dense/CSR matrix backends and vector helpers.
//!
//! Objectives only need `A x`, `Aᵀ r`, and per-row dot products, so both
//! backends expose exactly that.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::identity(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            indptr,
            indices,
            values,
        }
    }
}

/// Compressed sparse row matrix. Column indices within a row are strictly
/// increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 || indptr[0] != 0 {
            return Err(Error::config(
                "csr indptr must have rows + 1 entries starting at 0",
            ));
        }
        if indices.len() != values.len() || *indptr.last().unwrap() != indices.len() {
            return Err(Error::config("csr indices/values length mismatch"));
        }
        for r in 0..rows {
            let (lo, hi) = (indptr[r], indptr[r + 1]);
            if lo > hi {
                return Err(Error::config("csr indptr must be non-decreasing"));
            }
            let row = &indices[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&j| j >= cols) {
                return Err(Error::config(format!(
                    "csr row {r} has unsorted or out-of-range column indices"
                )));
            }
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            let (idx, vals) = self.row(i);
            for (j, v) in idx.iter().zip(vals) {
                data[i * self.cols + j] = *v;
            }
        }
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Returns a copy widened to `cols` columns (no-op if already that wide).
    pub fn with_cols(mut self, cols: usize) -> Self {
        self.cols = self.cols.max(cols);
        self
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for &r in rows {
            let (idx, vals) = self.row(r);
            indices.extend_from_slice(idx);
            values.extend_from_slice(vals);
            indptr.push(indices.len());
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            indptr,
            indices,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

impl Matrix {
    pub fn nrows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows,
            Matrix::Sparse(m) => m.rows,
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols,
            Matrix::Sparse(m) => m.cols,
        }
    }

    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        match self {
            Matrix::Dense(m) => dot(m.row(i), x),
            Matrix::Sparse(m) => {
                let (idx, vals) = m.row(i);
                idx.iter().zip(vals).map(|(&j, v)| v * x[j]).sum()
            }
        }
    }

    /// `out += scale * row_i`.
    pub fn add_row_scaled(&self, i: usize, scale: f64, out: &mut [f64]) {
        match self {
            Matrix::Dense(m) => {
                for (o, v) in out.iter_mut().zip(m.row(i)) {
                    *o += scale * v;
                }
            }
            Matrix::Sparse(m) => {
                let (idx, vals) = m.row(i);
                for (&j, v) in idx.iter().zip(vals) {
                    out[j] += scale * v;
                }
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows()).map(|i| self.row_dot(i, x)).collect()
    }

    pub fn tmatvec(&self, r: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols()];
        for (i, &ri) in r.iter().enumerate() {
            if ri != 0.0 {
                self.add_row_scaled(i, ri, &mut out);
            }
        }
        out
    }

    /// Estimate of the largest eigenvalue of `AᵀA` by power iteration from a
    /// seeded start vector.
    pub fn spectral_norm_sq(&self, iters: usize, seed: u64) -> f64 {
        let n = self.ncols();
        if n == 0 || self.nrows() == 0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut lambda = 0.0;
        for _ in 0..iters {
            let w = self.tmatvec(&self.matvec(&v));
            let nw = norm2(&w);
            if nw == 0.0 {
                return 0.0;
            }
            lambda = nw;
            v = w.into_iter().map(|x| x / nw).collect();
        }
        lambda
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<CsrMatrix> for Matrix {
    fn from(m: CsrMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_products_agree() {
        let d = DenseMatrix::from_row_major(2, 3, vec![1.0, 0.0, 2.0, 0.0, -3.0, 0.5]).unwrap();
        let s = Matrix::Sparse(d.to_csr());
        let d = Matrix::Dense(d);
        let x = [0.3, -1.0, 2.0];
        assert_eq!(d.matvec(&x), s.matvec(&x));
        assert_eq!(d.tmatvec(&[1.0, 2.0]), s.tmatvec(&[1.0, 2.0]));
    }

    #[test]
    fn power_iteration_on_diagonal() {
        let m = Matrix::Dense(DenseMatrix::diag(&[3.0, 1.0]));
        assert!((m.spectral_norm_sq(50, 7) - 9.0).abs() < 1e-6);
        let i = Matrix::Dense(DenseMatrix::identity(2));
        assert!((i.spectral_norm_sq(50, 7) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn csr_rejects_unsorted_rows() {
        assert!(CsrMatrix::new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).is_err());
    }
}
