//! Dirichlet-Laplacian eigenpairs on rasterized domains, the eigenfunction
//! moment quantities built from them, and checks of universal bounds on
//! low-order eigenvalue ratios.
//!
//! Pipeline: [`domain::DomainSpec`] → [`grid::rasterize`] →
//! [`sparse::assemble_laplacian`] → [`eigensolve::smallest_k`] →
//! [`spectral`] quantities → [`bounds`] reports. [`identities`] verifies the
//! algebraic identities behind the bounds on random instances, and
//! [`oracle`] supplies closed-form reference spectra.

pub mod bounds;
pub mod cholesky;
pub mod convergence;
pub mod domain;
pub mod eigensolve;
pub mod error;
pub mod grid;
pub mod identities;
pub mod oracle;
pub mod report;
pub mod sparse;
pub mod spectral;
pub mod tridiag;

pub use domain::{membership, Bitmap, DomainSpec};
pub use eigensolve::{residual, smallest_k, Spectrum};
pub use error::{Error, Result};
pub use grid::{rasterize, Grid};
pub use sparse::{assemble_laplacian, SparseSymmetric};
