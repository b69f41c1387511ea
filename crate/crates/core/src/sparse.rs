//! Compressed sparse row storage for the Galerkin matrices.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    /// Builds from `(row, col, value)` triplets. Duplicates are summed; exact
    /// zeros (given or produced by cancellation) are not stored.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::Dimension(alloc::format!("entry ({i}, {j}) outside {nrows}x{ncols} matrix")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(alloc::format!("non-finite entry at ({i}, {j})")));
            }
            sorted.push((i, j, v));
        }
        sorted.sort_by_key(|t| (t.0, t.1));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut iter = sorted.into_iter().peekable();
        while let Some((i, j, mut v)) = iter.next() {
            while let Some(&(i2, j2, v2)) = iter.peek() {
                if (i2, j2) != (i, j) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v != 0.0 {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx, values })
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        let mut triplets = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    triplets.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored (structurally non-zero) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Fraction of non-zero entries, in percent.
    pub fn density_percent(&self) -> f64 {
        100.0 * self.nnz() as f64 / (self.nrows as f64 * self.ncols as f64)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(p) => self.values[lo + p],
            Err(_) => 0.0,
        }
    }

    /// Iterates `(row, col, value)` over stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.col_idx[p], self.values[p]))
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.ncols, "vector length");
        DVector::from_fn(self.nrows, |i, _| self.row(i).map(|(j, v)| v * x[j]).sum())
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        assert_eq!(self.nrows, self.ncols);
        (0..self.nrows).map(|i| x[i] * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>()).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.iter().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Kronecker product `self ⊗ dense`, dropping exact zeros.
    pub fn kron_dense(&self, block: &DMatrix<f64>) -> Result<Self> {
        let (br, bc) = block.shape();
        let mut triplets = Vec::with_capacity(self.nnz() * br * bc);
        for (i, j, g) in self.iter() {
            for c in 0..bc {
                for r in 0..br {
                    let v = g * block[(r, c)];
                    if v != 0.0 {
                        triplets.push((i * br + r, j * bc + c, v));
                    }
                }
            }
        }
        Self::from_triplets(self.nrows * br, self.ncols * bc, &triplets)
    }

    /// Sum of matrices with identical shape; exact zeros are removed.
    pub fn sum<'a>(nrows: usize, ncols: usize, terms: impl IntoIterator<Item = &'a CsrMatrix>) -> Result<Self> {
        let mut triplets = Vec::new();
        for t in terms {
            if t.nrows != nrows || t.ncols != ncols {
                return Err(Error::Dimension(alloc::format!("cannot add {}x{} to {nrows}x{ncols}", t.nrows, t.ncols)));
            }
            triplets.extend(t.iter());
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }
}
