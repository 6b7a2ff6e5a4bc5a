//! Envelope (profile) Cholesky factorization.
//!
//! Row `i` of `L` is stored densely from its first structural nonzero up to
//! the diagonal. Fill stays inside the envelope, so for lexicographically
//! ordered stencil matrices the cost is `O(N w^2)` with `w` the row width of
//! the lattice.

use crate::error::{Error, Result};
use crate::sparse::SparseSymmetric;

#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(matrix: &SparseSymmetric) -> Result<Self> {
        let n = matrix.order();
        let mut first = Vec::with_capacity(n);
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            let f = matrix.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
            first.push(f);
            offset.push(offset[i] + (i - f + 1));
        }
        let mut values = vec![0.0; offset[n]];
        for i in 0..n {
            for (j, v) in matrix.row(i) {
                if j <= i {
                    values[offset[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, current) = values.split_at_mut(offset[i]);
            let row_i = &mut current[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let row_j = &done[offset[j]..offset[j] + (j - fj + 1)];
                let dot = dot(&row_i[start - fi..j - fi], &row_j[start - fj..j - fj]);
                row_i[j - fi] = (row_i[j - fi] - dot) / row_j[j - fj];
            }
            let off = &row_i[..i - fi];
            let pivot = row_i[i - fi] - dot(off, off);
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite { row: i, pivot });
            }
            row_i[i - fi] = pivot.sqrt();
        }
        Ok(EnvelopeCholesky { first, offset, values })
    }

    pub fn order(&self) -> usize {
        self.first.len()
    }

    /// Number of stored entries of `L`.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[self.offset[i]..self.offset[i + 1]]
    }

    /// Solve `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.order();
        assert_eq!(x.len(), n);
        for i in 0..n {
            let fi = self.first[i];
            let row = self.row(i);
            let s = dot(&row[..i - fi], &x[fi..i]);
            x[i] = (x[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = self.row(i);
            x[i] /= row[i - fi];
            let xi = x[i];
            for (xp, &l) in x[fi..i].iter_mut().zip(&row[..i - fi]) {
                *xp -= l * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four independent accumulators; fixed order keeps results reproducible
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
