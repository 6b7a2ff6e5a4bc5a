//! Uniform lattices of interior nodes.
//!
//! Parametric domains use a vertex lattice anchored at the lower corner of
//! the bounding box (`lower + i*h` per axis). Lattice points on the boundary
//! fail the open-domain predicate and are dropped, so for intervals,
//! rectangles, and boxes the Dirichlet boundary sits exactly on the domain
//! boundary. Bitmap domains use one node per interior pixel, at the pixel
//! center.

use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// Interior nodes of a rasterized domain, ordered lexicographically with
/// the first axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    dim: usize,
    spacing: f64,
    origin: [f64; 3],
    shape: [usize; 3],
    lattice: Vec<[usize; 3]>,
    index_map: Vec<Option<usize>>,
}

/// Snap tolerance for boundary-lying lattice points, relative to `h`.
const BOUNDARY_SNAP: f64 = 1e-9;

pub fn rasterize(spec: &DomainSpec, h: f64) -> Result<Grid> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidSpacing(format!("h must be positive and finite, got {h}")));
    }
    spec.validate()?;
    let dim = spec.dimension();

    let (origin, shape) = match spec {
        DomainSpec::Bitmap(b) => {
            if ((h - b.pixel_size) / b.pixel_size).abs() > 1e-9 {
                return Err(Error::InvalidSpacing(format!(
                    "bitmap grids use the pixel size {} as spacing, got {h}",
                    b.pixel_size
                )));
            }
            ([0.5 * h, 0.5 * h, 0.0], [b.width, b.height, 1])
        }
        _ => {
            for (name, value) in spec.parameters() {
                if value < 2.0 * h {
                    return Err(Error::FeatureTooFine {
                        name,
                        value,
                        limit: 2.0 * h,
                    });
                }
            }
            let (lo, hi) = spec.bounding_box();
            let mut shape = [1usize; 3];
            for axis in 0..dim {
                shape[axis] = ((hi[axis] - lo[axis]) / h + BOUNDARY_SNAP).floor() as usize + 1;
            }
            (lo, shape)
        }
    };

    let cells = shape[0] * shape[1] * shape[2];
    let mut index_map = vec![None; cells];
    let mut lattice = Vec::new();
    let eps = BOUNDARY_SNAP * h;
    for k in 0..shape[2] {
        for j in 0..shape[1] {
            for i in 0..shape[0] {
                let idx = [i, j, k];
                let mut p = [0.0; 3];
                for axis in 0..dim {
                    p[axis] = origin[axis] + idx[axis] as f64 * h;
                }
                if spec.depth(&p) > eps {
                    index_map[i + shape[0] * (j + shape[1] * k)] = Some(lattice.len());
                    lattice.push(idx);
                }
            }
        }
    }
    if lattice.is_empty() {
        return Err(Error::EmptyGrid);
    }

    Ok(Grid {
        dim,
        spacing: h,
        origin,
        shape,
        lattice,
        index_map,
    })
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn node_count(&self) -> usize {
        self.lattice.len()
    }

    /// Quadrature weight `h^n` carried by every node.
    pub fn weight(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Discrete measure of the domain, `N h^n`.
    pub fn measure(&self) -> f64 {
        self.node_count() as f64 * self.weight()
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn lattice_index(&self, node: usize) -> [usize; 3] {
        self.lattice[node]
    }

    /// Physical coordinate of `node` along `axis`.
    #[inline]
    pub fn coord(&self, node: usize, axis: usize) -> f64 {
        self.origin[axis] + self.lattice[node][axis] as f64 * self.spacing
    }

    pub fn position(&self, node: usize) -> Vec<f64> {
        (0..self.dim).map(|a| self.coord(node, a)).collect()
    }

    /// Node at a lattice position, or `None` for exterior and out-of-range cells.
    pub fn node_at(&self, idx: [isize; 3]) -> Option<usize> {
        let mut flat = 0usize;
        for axis in (0..3).rev() {
            let v = idx[axis];
            if v < 0 || v as usize >= self.shape[axis] {
                return None;
            }
            flat = flat * self.shape[axis] + v as usize;
        }
        self.index_map[flat]
    }

    /// Lattice neighbors of `node` (at most `2n`), in a fixed axis order.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.lattice[node];
        (0..self.dim).flat_map(move |axis| {
            [-1isize, 1].into_iter().filter_map(move |step| {
                let mut idx = [base[0] as isize, base[1] as isize, base[2] as isize];
                idx[axis] += step;
                self.node_at(idx)
            })
        })
    }

    /// Weighted inner product `h^n sum f g`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weight() * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Weighted integral `h^n sum f`.
    pub fn integrate(&self, f: impl Iterator<Item = f64>) -> f64 {
        self.weight() * f.sum::<f64>()
    }
}
