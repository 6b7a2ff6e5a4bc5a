//! Smallest eigenpairs of the discrete Dirichlet Laplacian.
//!
//! Shift-invert Lanczos at zero shift: the operator `M⁻¹` is applied through
//! an envelope Cholesky factorization, and its largest eigenvalues `1/λ`
//! belong to the smallest `λ`. Every Lanczos vector is reorthogonalized
//! twice against the whole basis and against previously locked pairs.
//! Rounds restart from fresh seeded vectors, deflated against locked pairs,
//! until `k` pairs are locked and one further round confirms that nothing
//! smaller than the `k`-th value is left. The confirmation round is what
//! picks up the missing members of degenerate clusters, which a single
//! Krylov sequence cannot see.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cholesky::EnvelopeCholesky;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sparse::SparseSymmetric;
use crate::tridiag::tridiagonal_eigen;

/// Relative residual tolerance used when callers have no preference.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative gap below which neighbouring eigenvalues count as one cluster.
pub const CLUSTER_GAP: f64 = 1e-9;

const DEFAULT_SEED: u64 = 0x5eed_1a2c_0000_0001;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub seed: u64,
    /// Factorization solves allowed per requested pair.
    pub budget_per_pair: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            budget_per_pair: 100,
        }
    }
}

/// The `k` smallest eigenpairs on a grid. Eigenfunctions are normalized
/// under the grid quadrature, `h^n Σ u_j u_m = δ_jm`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Arc<Grid>,
    values: Vec<f64>,
    functions: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    solves: usize,
}

pub fn smallest_k(matrix: &SparseSymmetric, grid: Arc<Grid>, k: usize, tol: f64) -> Result<Spectrum> {
    smallest_k_with(
        matrix,
        grid,
        k,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn smallest_k_with(
    matrix: &SparseSymmetric,
    grid: Arc<Grid>,
    k: usize,
    options: &SolverOptions,
) -> Result<Spectrum> {
    let n = matrix.order();
    if n != grid.node_count() {
        return Err(Error::Precondition(format!(
            "matrix order {n} does not match grid with {} nodes",
            grid.node_count()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k = {k} must lie in 1..={n}")));
    }
    if !(options.tol > 0.0 && options.tol <= 1e-4) {
        return Err(Error::Precondition(format!(
            "tolerance {} must lie in (0, 1e-4]",
            options.tol
        )));
    }

    let chol = EnvelopeCholesky::factor(matrix)?;
    let mut solver = Lanczos {
        matrix,
        chol: &chol,
        tol: options.tol,
        budget: options.budget_per_pair * k,
        solves: 0,
        locked: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let max_rounds = 4 * k + 8;
    let mut confirmed = false;
    for _ in 0..max_rounds {
        let free = n - solver.locked.len();
        if free == 0 {
            confirmed = true;
            break;
        }
        let verifying = solver.locked.len() >= k;
        let want = if verifying { 1 } else { k - solver.locked.len() };
        let max_basis = free.min((2 * want + 20).max(40));
        let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let found = solver.round(start, want, max_basis, k)?;

        if verifying {
            let kth = kth_smallest(&solver.locked, k);
            match found.iter().map(|p| p.value).reduce(f64::min) {
                Some(mu) if mu < kth * (1.0 - CLUSTER_GAP) => solver.lock(found),
                Some(_) => {
                    confirmed = true;
                    break;
                }
                None => {}
            }
        } else {
            solver.lock(found);
        }
    }
    if !confirmed {
        let worst = solver.locked.iter().map(|p| p.residual / p.value).fold(0.0, f64::max);
        return Err(Error::NoConvergence {
            converged: solver.locked.len().min(k),
            requested: k,
            applications: solver.solves,
            worst_residual: worst,
        });
    }

    let solves = solver.solves;
    let mut pairs = solver.locked;
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    pairs.truncate(k);

    let scale = 1.0 / grid.weight().sqrt();
    let mut values = Vec::with_capacity(k);
    let mut functions = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (j, pair) in pairs.into_iter().enumerate() {
        let mut u: Vec<f64> = pair.vector.iter().map(|v| v * scale).collect();
        orient(&mut u, j == 0);
        values.push(pair.value);
        residuals.push(pair.residual);
        functions.push(u);
    }
    Ok(Spectrum {
        grid,
        values,
        functions,
        residuals,
        solves,
    })
}

/// `‖Mv − λv‖₂ / ‖v‖₂`.
pub fn residual(matrix: &SparseSymmetric, value: f64, vector: &[f64]) -> Result<f64> {
    let norm = norm(vector);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mv = matrix.apply(vector);
    let r: f64 = mv
        .iter()
        .zip(vector)
        .map(|(a, v)| (a - value * v).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(r / norm)
}

/// Ritz values after `steps` steps of plain Lanczos on `M` itself, from a
/// seeded start vector. Used as a cheap positive-definiteness probe.
pub fn lanczos_ritz_values(matrix: &SparseSymmetric, steps: usize, seed: u64) -> Vec<f64> {
    let n = matrix.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut v);
    let mut basis = vec![v];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    for j in 0..steps.min(n) {
        let mut w = matrix.apply(&basis[j]);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        if b <= 1e-12 * a.abs() || j + 1 == steps.min(n) {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    tridiagonal_eigen(&alpha, &beta).0
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<Grid> {
        Arc::clone(&self.grid)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Eigenvalues, nondecreasing; `values()[0]` is `λ_1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `λ_j` with the 1-based index used throughout the formulas.
    pub fn lambda(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    /// `u_j`, 1-based, as node values.
    pub fn u(&self, j: usize) -> &[f64] {
        &self.functions[j - 1]
    }

    pub fn functions(&self) -> &[Vec<f64>] {
        &self.functions
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Factorization solves spent by the eigensolver.
    pub fn solves(&self) -> usize {
        self.solves
    }

    /// Largest deviation of the quadrature Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for b in a..self.len() {
                let g = self.grid.inner(&self.functions[a], &self.functions[b]);
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - expect).abs());
            }
        }
        worst
    }

    /// Maximal runs of (1-based) indices whose consecutive values differ by
    /// less than `CLUSTER_GAP` relative. Singletons are included.
    pub fn clusters(&self) -> Vec<std::ops::RangeInclusive<usize>> {
        let mut out = Vec::new();
        let mut start = 1;
        for j in 2..=self.len() + 1 {
            let split = j > self.len() || self.lambda(j) - self.lambda(j - 1) >= CLUSTER_GAP * self.lambda(j);
            if split {
                out.push(start..=j - 1);
                start = j;
            }
        }
        out
    }

    /// Whether a degenerate cluster straddles the cut between indices `j`
    /// and `j + 1`, making quantities truncated at `j` basis-dependent.
    pub fn cluster_split_at(&self, j: usize) -> bool {
        j >= 1 && j < self.len() && self.lambda(j + 1) - self.lambda(j) < CLUSTER_GAP * self.lambda(j + 1)
    }

    /// CSV with header `index,eigenvalue,residual` (1-based index).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,eigenvalue,residual")?;
        for (j, (v, r)) in self.values.iter().zip(&self.residuals).enumerate() {
            writeln!(out, "{},{:.17e},{:.6e}", j + 1, v, r)?;
        }
        Ok(())
    }

    pub fn to_export(&self, domain: &str, include_vectors: bool) -> SpectrumExport {
        SpectrumExport {
            domain: domain.to_string(),
            dimension: self.dim(),
            spacing: self.grid.spacing(),
            node_count: self.grid.node_count(),
            eigenvalues: self.values.clone(),
            residuals: self.residuals.clone(),
            eigenvectors: include_vectors.then(|| self.functions.clone()),
        }
    }
}

/// JSON document for a computed spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumExport {
    pub domain: String,
    pub dimension: usize,
    pub spacing: f64,
    pub node_count: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
struct Pair {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
}

struct Lanczos<'a> {
    matrix: &'a SparseSymmetric,
    chol: &'a EnvelopeCholesky,
    tol: f64,
    budget: usize,
    solves: usize,
    locked: Vec<Pair>,
}

impl Lanczos<'_> {
    fn deflate(&self, w: &mut [f64]) {
        for p in &self.locked {
            let c = dot(&p.vector, w);
            axpy(-c, &p.vector, w);
        }
    }

    /// One Krylov sequence; returns the converged pairs among the `want`
    /// largest Ritz values of the deflated inverse.
    fn round(&mut self, mut start: Vec<f64>, want: usize, max_basis: usize, k: usize) -> Result<Vec<Pair>> {
        self.deflate(&mut start);
        self.deflate(&mut start);
        if normalize(&mut start) == 0.0 {
            return Ok(Vec::new());
        }
        let mut basis = vec![start];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();

        loop {
            if self.solves >= self.budget {
                return Err(Error::BudgetExceeded {
                    budget: self.budget,
                    converged: self.locked.len().min(k),
                    requested: k,
                });
            }
            let j = basis.len() - 1;
            let mut w = self.chol.solve(&basis[j]);
            self.solves += 1;
            self.deflate(&mut w);
            let a = dot(&basis[j], &w);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalize(&mut w, &basis);
            self.deflate(&mut w);
            orthogonalize(&mut w, &basis);
            alpha.push(a);
            let b = norm(&w);
            let m = basis.len();

            let exhausted = b <= 1e-14 * a.abs().max(f64::MIN_POSITIVE) || m >= max_basis;
            let checkpoint = m >= want && (m % 4 == 0 || exhausted);
            if checkpoint {
                let (accepted, all) = self.ritz_pairs(&basis, &alpha, &beta, b, want);
                if all || exhausted {
                    return Ok(accepted);
                }
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
    }

    /// Ritz pairs for the `want` largest eigenvalues of the projected
    /// inverse; returns those meeting the residual test on `M` and whether
    /// all of them did.
    fn ritz_pairs(
        &self,
        basis: &[Vec<f64>],
        alpha: &[f64],
        beta: &[f64],
        next_beta: f64,
        want: usize,
    ) -> (Vec<Pair>, bool) {
        let m = alpha.len();
        let (theta, s) = tridiagonal_eigen(alpha, &beta[..m - 1]);
        let mut accepted = Vec::new();
        let mut all = true;
        for idx in (0..m).rev().take(want) {
            let th = theta[idx];
            let estimate = (next_beta * s[idx][m - 1]).abs();
            if !(th > 0.0) || estimate > 1e-3 * th {
                all = false;
                continue;
            }
            let mut y = vec![0.0; basis[0].len()];
            for (coef, v) in s[idx].iter().zip(basis) {
                axpy(*coef, v, &mut y);
            }
            self.deflate(&mut y);
            normalize(&mut y);
            let my = self.matrix.apply(&y);
            let value = dot(&y, &my);
            let res = my
                .iter()
                .zip(&y)
                .map(|(a, v)| (a - value * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if res <= self.tol * value {
                accepted.push(Pair {
                    value,
                    vector: y,
                    residual: res,
                });
            } else {
                all = false;
            }
        }
        (accepted, all)
    }

    fn lock(&mut self, pairs: Vec<Pair>) {
        for mut p in pairs {
            // vectors from one round are orthogonal only up to the Ritz accuracy
            self.deflate(&mut p.vector);
            self.deflate(&mut p.vector);
            if normalize(&mut p.vector) < 0.5 {
                continue;
            }
            let my = self.matrix.apply(&p.vector);
            p.value = dot(&p.vector, &my);
            p.residual = my
                .iter()
                .zip(&p.vector)
                .map(|(a, v)| (a - p.value * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if p.residual <= self.tol * p.value {
                self.locked.push(p);
            }
        }
    }
}

fn kth_smallest(pairs: &[Pair], k: usize) -> f64 {
    let mut v: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    v.sort_by(f64::total_cmp);
    v[k - 1]
}

/// Sign convention: the ground state is made nonnegative in sum, every other
/// vector gets a positive first significant component.
fn orient(u: &mut [f64], ground: bool) {
    let flip = if ground {
        u.iter().sum::<f64>() < 0.0
    } else {
        let big = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        u.iter().find(|x| x.abs() > 1e-8 * big).is_some_and(|&x| x < 0.0)
    };
    if flip {
        u.iter_mut().for_each(|x| *x = -*x);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Classical Gram-Schmidt sweep against an orthonormal set.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    let coefs: Vec<f64> = basis.iter().map(|v| dot(v, w)).collect();
    for (c, v) in coefs.iter().zip(basis) {
        axpy(-c, v, w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::grid::rasterize;
    use crate::sparse::assemble_laplacian;
    use std::f64::consts::PI;

    fn solve(spec: &DomainSpec, h: f64, k: usize) -> Spectrum {
        let g = rasterize(spec, h).unwrap();
        let m = assemble_laplacian(&g);
        smallest_k(&m, Arc::new(g), k, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn interval_three_nodes() {
        let s = solve(&DomainSpec::Interval { length: 1.0 }, 0.25, 3);
        for p in 1..=3 {
            let exact = 32.0 * (1.0 - (p as f64 * PI / 4.0).cos());
            assert!((s.lambda(p) / exact - 1.0).abs() < 1e-8, "{} vs {exact}", s.lambda(p));
        }
    }

    #[test]
    fn unit_square_third_spacing() {
        let s = solve(
            &DomainSpec::Rectangle {
                width: 1.0,
                height: 1.0,
            },
            1.0 / 3.0,
            1,
        );
        assert!((s.lambda(1) - 18.0).abs() < 1e-10);
    }

    #[test]
    fn residual_of_exact_pairs() {
        let g = rasterize(&DomainSpec::Interval { length: 1.0 }, 0.25).unwrap();
        let m = assemble_laplacian(&g);
        let v: Vec<f64> = (1..=3).map(|i| (2.0 * PI * i as f64 * 0.25).sin()).collect();
        assert!(residual(&m, 32.0, &v).unwrap() <= 1e-12);
        assert!(matches!(residual(&m, 1.0, &[0.0; 3]), Err(Error::ZeroVector)));

        let iso = SparseSymmetric::from_rows(vec![vec![(0, 8.0)], vec![(1, 8.0)]]);
        assert_eq!(residual(&iso, 8.0, &[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn spectrum_invariants_on_square() {
        let s = solve(
            &DomainSpec::Rectangle {
                width: 1.0,
                height: 1.0,
            },
            1.0 / 16.0,
            6,
        );
        assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.lambda(1) > 0.0);
        assert!(s.orthonormality_defect() <= 1e-8);
        for (j, r) in s.residuals().iter().enumerate() {
            assert!(*r <= 1e-8 * s.values()[j]);
        }
        assert!(s.u(1).iter().all(|&x| x >= 0.0));
        // (1,2) and (2,1) are exactly degenerate on the square lattice
        assert!(s.cluster_split_at(2));
        assert!(s.clusters().contains(&(2..=3)));
    }

    #[test]
    fn deterministic_bits() {
        let spec = DomainSpec::Disk { radius: 1.0 };
        let a = solve(&spec, 1.0 / 12.0, 5);
        let b = solve(&spec, 1.0 / 12.0, 5);
        assert_eq!(a.values(), b.values());
        assert_eq!(a.functions(), b.functions());
    }

    #[test]
    fn positive_definite_probe() {
        for spec in [
            DomainSpec::Disk { radius: 1.0 },
            DomainSpec::Annulus {
                r_inner: 0.5,
                r_outer: 1.0,
            },
            DomainSpec::Lshape {
                arm: 1.0,
                thickness: 0.5,
            },
            DomainSpec::Box {
                width: 1.0,
                height: 1.0,
                depth: 1.0,
            },
        ] {
            let g = rasterize(&spec, 1.0 / 16.0).unwrap();
            let ritz = lanczos_ritz_values(&assemble_laplacian(&g), 50, 7);
            assert!(ritz[0] > 0.0, "{}", spec.label());
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let g = rasterize(&DomainSpec::Interval { length: 1.0 }, 0.25).unwrap();
        let m = assemble_laplacian(&g);
        let g = Arc::new(g);
        assert!(smallest_k(&m, g.clone(), 0, 1e-9).is_err());
        assert!(smallest_k(&m, g.clone(), 4, 1e-9).is_err());
        assert!(smallest_k(&m, g, 2, 1e-3).is_err());
    }

    #[test]
    fn csv_export() {
        let s = solve(&DomainSpec::Interval { length: 1.0 }, 0.25, 3);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("index,eigenvalue,residual\n1,9.37"));
        let json = serde_json::to_value(s.to_export("interval(1)", true)).unwrap();
        assert_eq!(json["eigenvalues"].as_array().unwrap().len(), 3);
        assert_eq!(json["eigenvectors"].as_array().unwrap().len(), 3);
    }
}
