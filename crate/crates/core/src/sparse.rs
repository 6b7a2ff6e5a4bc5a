//! Compressed-row storage for the finite-difference Dirichlet Laplacian.

use std::io::Write;

use crate::grid::Grid;

/// Symmetric sparse matrix with both triangles stored in CSR form. Column
/// indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    order: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymmetric {
    /// Build from per-row `(column, value)` lists; columns are sorted here.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let order = rows.len();
        let mut row_ptr = Vec::with_capacity(order + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        SparseSymmetric {
            order,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(column, value)` pairs of `row`.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[span.clone()].binary_search(&col) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => 0.0,
        }
    }

    /// `y = M x`, rows reduced in storage order.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.order);
        assert_eq!(y.len(), self.order);
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *out = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.order];
        self.mul_vec(x, &mut y);
        y
    }

    /// Exact structural and numerical symmetry of the stored pattern.
    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Write in MatrixMarket coordinate format (`symmetric`, lower triangle, 1-based).
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let lower: Vec<(usize, usize, f64)> = (0..self.order)
            .flat_map(|i| self.row(i).filter(move |&(j, _)| j <= i).map(move |(j, v)| (i, j, v)))
            .collect();
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(out, "{} {} {}", self.order, self.order, lower.len())?;
        for (i, j, v) in lower {
            writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

/// Second-order Dirichlet Laplacian `-Δ` on `grid`: diagonal `2n/h²`, one
/// `-1/h²` per interior lattice neighbor. Exterior neighbors are dropped,
/// which imposes the zero boundary value.
pub fn assemble_laplacian(grid: &Grid) -> SparseSymmetric {
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let diag = 2.0 * grid.dim() as f64 * inv_h2;
    let rows = (0..grid.node_count())
        .map(|node| {
            let mut row: Vec<(usize, f64)> = grid.neighbors(node).map(|nb| (nb, -inv_h2)).collect();
            row.push((node, diag));
            row
        })
        .collect();
    SparseSymmetric::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::grid::rasterize;

    #[test]
    fn interval_stencil() {
        let g = rasterize(&DomainSpec::Interval { length: 1.0 }, 0.25).unwrap();
        let m = assemble_laplacian(&g);
        assert_eq!(m.order(), 3);
        assert_eq!(m.get(0, 0), 32.0);
        assert_eq!(m.get(0, 1), -16.0);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.nnz(), 7);
    }

    #[test]
    fn stencil_invariants() {
        let specs = [
            DomainSpec::Disk { radius: 1.0 },
            DomainSpec::Lshape {
                arm: 1.0,
                thickness: 0.5,
            },
            DomainSpec::Box {
                width: 1.0,
                height: 1.0,
                depth: 1.0,
            },
        ];
        for spec in &specs {
            let g = rasterize(spec, 1.0 / 8.0).unwrap();
            let m = assemble_laplacian(&g);
            let n = g.dim() as f64;
            assert!(m.is_symmetric());
            for i in 0..m.order() {
                let mut offdiag = 0;
                for (j, v) in m.row(i) {
                    if i == j {
                        assert_eq!(v, 2.0 * n * 64.0);
                    } else {
                        assert_eq!(v, -64.0);
                        offdiag += 1;
                    }
                }
                assert!(offdiag <= 2 * g.dim());
            }
        }
    }

    #[test]
    fn row_sums_positive_next_to_boundary() {
        let g = rasterize(&DomainSpec::Disk { radius: 1.0 }, 1.0 / 8.0).unwrap();
        let m = assemble_laplacian(&g);
        let ones = vec![1.0; m.order()];
        let y = m.apply(&ones);
        for (node, &v) in y.iter().enumerate() {
            let interior_neighbors = g.neighbors(node).count();
            if interior_neighbors < 4 {
                assert!(v > 0.0);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn matrix_market_dump() {
        let g = rasterize(&DomainSpec::Interval { length: 1.0 }, 0.25).unwrap();
        let mut buf = Vec::new();
        assemble_laplacian(&g).write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate real symmetric");
        assert_eq!(lines[1], "3 3 5");
        assert!(lines[2].starts_with("1 1 3.2"));
    }
}
