//! Real symmetric sparse matrices in compressed-sparse-row layout.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

/// Real symmetric matrix in CSR form. Column indices are sorted within each
/// row and explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitianMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseHermitianMatrix {
    /// Assemble from per-row entry lists. Entries may arrive unsorted;
    /// duplicates within a row are summed, exact zeros are dropped.
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let (c, mut v) = row[k];
                let mut j = k + 1;
                while j < row.len() && row[j].0 == c {
                    v += row[j].1;
                    j += 1;
                }
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
                k = j;
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Exact symmetry check: entry-for-entry pattern and value equality with
    /// the transpose.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if self.get(j as usize, i) != v {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// y = A x for real vectors.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j as usize];
            }
            y[i] = acc;
        }
    }

    /// y = A x for complex vectors (the matrix itself is real).
    pub fn matvec_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        let out = par::map_indexed(self.dim, |i| {
            let (cols, vals) = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                acc += x[j as usize] * v;
            }
            acc
        });
        y.copy_from_slice(&out);
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec(x, &mut y);
        y
    }

    pub fn apply_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_complex(x, &mut y);
        y
    }

    /// Densify into a faer matrix (used by the dense eigensolver and tests).
    pub fn to_dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::<f64>::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j as usize)] = v;
            }
        }
        m
    }

    /// Coordinate text export: one `row col value` triple per line.
    pub fn write_coordinate_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {} {}", self.dim, self.dim, self.nnz())?;
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.12e}", i, j, v)?;
            }
        }
        Ok(())
    }

    /// Largest eigenvalue magnitude upper bound via the Gershgorin circle
    /// theorem; used to size Krylov substeps.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut bound: f64 = 0.0;
        for i in 0..self.dim {
            let (_, vals) = self.row(i);
            let r: f64 = vals.iter().map(|v| v.abs()).sum();
            bound = bound.max(r);
        }
        bound
    }

    /// Validate structural invariants: in-range sorted columns, symmetric
    /// pattern and values, no stored zeros.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::EigenFailure(format!("row {i} columns not sorted")));
            }
            if cols.iter().any(|&c| c as usize >= self.dim) {
                return Err(Error::EigenFailure(format!("row {i} column out of range")));
            }
            if vals.iter().any(|&v| v == 0.0) {
                return Err(Error::EigenFailure(format!("row {i} stores explicit zero")));
            }
        }
        if !self.is_symmetric() {
            return Err(Error::EigenFailure("matrix is not symmetric".into()));
        }
        Ok(())
    }
}
