//! Quantities built from the computed eigenfunctions.
//!
//! All integrals use the grid quadrature `h^n Σ_nodes`. Infinite sums over
//! the spectrum become partial sums through the computed modes, and every
//! inequality diagnostic below is the one-sided truncated form, which only
//! drops nonnegative terms.
//!
//! Index conventions follow the formulas: eigen-indices `j` are 1-based,
//! coordinate indices `α` are 1-based. Storage is 0-based.

use serde::Serialize;

use crate::eigensolve::Spectrum;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Moment matrix, its triangularizing rotation, and the centered rotated
/// coordinates.
#[derive(Debug, Clone)]
pub struct MomentData {
    /// `A[α][β−1] = ∫ x_α u_1 u_{β+1}`, `β = 1..k−1`.
    pub a: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    /// `R = Q A`; `R[α][β] = 0` for `β < α`.
    pub r: Vec<Vec<f64>>,
    /// `y_α^(0) = ∫ y_α u_1²` with `y = Q x`.
    pub offsets: Vec<f64>,
    /// Per-node values of `z_α = y_α − y_α^(0)`.
    pub z: Vec<Vec<f64>>,
}

impl MomentData {
    pub fn compute(spectrum: &Spectrum) -> Result<Self> {
        let a = moment_matrix(spectrum)?;
        let (q, r) = rotation(&a);
        let (offsets, z) = centered_coordinates(spectrum.grid(), &q, spectrum.u(1));
        Ok(MomentData { a, q, r, offsets, z })
    }

    /// `max |QᵀQ − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.q)
    }

    /// Largest forbidden entry `|R[α][β]|`, `β < α`.
    pub fn triangular_defect(&self) -> f64 {
        triangular_defect(&self.r)
    }
}

/// `A[α][β−1] = ∫ x_α u_1 u_{β+1}` for `β = 1..k−1`.
pub fn moment_matrix(spectrum: &Spectrum) -> Result<Vec<Vec<f64>>> {
    let n = spectrum.dim();
    let k = spectrum.len();
    if k < n + 1 {
        return Err(Error::InsufficientModes {
            needed: n + 1,
            available: k,
        });
    }
    let grid = spectrum.grid();
    let u1 = spectrum.u(1);
    let a = (0..n)
        .map(|axis| {
            let xu: Vec<f64> = (0..grid.node_count()).map(|p| grid.coord(p, axis) * u1[p]).collect();
            (2..=k).map(|j| grid.inner(&xu, spectrum.u(j))).collect()
        })
        .collect();
    Ok(a)
}

/// Relative size below which a subdiagonal column tail counts as zero.
const ROUNDOFF_TAIL: f64 = 1e-13;

/// Householder triangularization of the leading `n×n` block of `A`.
///
/// Returns `(Q, R)` with `Q` orthogonal and `R = QA` computed by direct
/// multiplication. Each reflector maps its column onto a pivot carrying the
/// sign of the column's leading entry (nonnegative when that entry is zero),
/// so an already triangular `A` yields `Q = I`. Rank-deficient columns and
/// tails at roundoff level pass through untouched.
pub fn rotation(a: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    // working copy of the leading block
    let mut w: Vec<Vec<f64>> = a.iter().map(|row| row[..n.min(cols)].to_vec()).collect();

    for c in 0..n.min(cols) {
        let x0 = w[c][c];
        let tail: f64 = (c + 1..n).map(|i| w[i][c] * w[i][c]).sum();
        // a roundoff-level tail is already eliminated; reflecting it would flip axes
        if tail.sqrt() <= ROUNDOFF_TAIL * (x0 * x0 + tail).sqrt() {
            continue;
        }
        let rho = (x0 * x0 + tail).sqrt().copysign(if x0 == 0.0 { 1.0 } else { x0 });
        // v = x − ρ e_1, leading entry formed without cancellation
        let mut v = vec![0.0; n];
        v[c] = -tail / (x0 + rho);
        for i in c + 1..n {
            v[i] = w[i][c];
        }
        let vv: f64 = v[c..].iter().map(|t| t * t).sum();
        let apply = |m: &mut Vec<Vec<f64>>| {
            let width = m[0].len();
            #[allow(clippy::needless_range_loop)]
            for col in 0..width {
                let s: f64 = (c..n).map(|i| v[i] * m[i][col]).sum();
                let f = 2.0 * s / vv;
                for i in c..n {
                    m[i][col] -= f * v[i];
                }
            }
        };
        apply(&mut w);
        apply(&mut q);
    }

    let r = (0..n)
        .map(|alpha| {
            (0..cols)
                .map(|beta| (0..n).map(|g| q[alpha][g] * a[g][beta]).sum())
                .collect()
        })
        .collect();
    (q, r)
}

/// Rotated coordinates `y_α = Σ_γ q_{αγ} x_γ`, their `u_1²`-weighted means,
/// and the centered node values `z_α = y_α − y_α^(0)`.
pub fn centered_coordinates(grid: &Grid, q: &[Vec<f64>], u1: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = grid.dim();
    let nodes = grid.node_count();
    let mut offsets = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for row in q.iter().take(n) {
        let y: Vec<f64> = (0..nodes)
            .map(|p| (0..n).map(|g| row[g] * grid.coord(p, g)).sum())
            .collect();
        let y0 = grid.integrate(y.iter().zip(u1).map(|(yv, u)| yv * u * u));
        offsets.push(y0);
        z.push(y.into_iter().map(|v| v - y0).collect());
    }
    (offsets, z)
}

pub fn orthogonality_defect(q: &[Vec<f64>]) -> f64 {
    let n = q.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d: f64 = (0..n).map(|g| q[g][i] * q[g][j]).sum();
            worst = worst.max((d - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

pub fn triangular_defect(r: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (alpha, row) in r.iter().enumerate() {
        for v in row.iter().take(alpha) {
            worst = worst.max(v.abs());
        }
    }
    worst
}

/// Threshold beyond which a coefficient that should vanish is an error.
pub const TRIANGULAR_LIMIT: f64 = 1e-4;

/// Overlap coefficients `a_{αj} = ∫ z_α u_1 u_j` and the derived data.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralCoefficients {
    /// `a[α−1][j−1]`.
    pub a: Vec<Vec<f64>>,
    /// `b_{αj} = (λ_1 − λ_j) a_{αj} / 2`.
    pub b: Vec<Vec<f64>>,
    /// `‖z_α u_1‖²` by direct quadrature.
    pub znorms: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Largest `|a_{αj}|` over `j ≤ α`.
    pub triangular_max: f64,
}

pub fn overlap_coefficients(moments: &MomentData, spectrum: &Spectrum) -> Result<SpectralCoefficients> {
    let grid = spectrum.grid();
    let u1 = spectrum.u(1);
    let k = spectrum.len();
    let lambdas = spectrum.values().to_vec();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut znorms = Vec::new();
    let mut triangular_max: f64 = 0.0;
    for (alpha0, z) in moments.z.iter().enumerate() {
        let zu: Vec<f64> = z.iter().zip(u1).map(|(zv, u)| zv * u).collect();
        let row: Vec<f64> = (1..=k).map(|j| grid.inner(&zu, spectrum.u(j))).collect();
        for (j0, v) in row.iter().enumerate().take(alpha0 + 1) {
            triangular_max = triangular_max.max(v.abs());
            if v.abs() > TRIANGULAR_LIMIT {
                return Err(Error::TriangularViolation {
                    alpha: alpha0 + 1,
                    j: j0 + 1,
                    value: *v,
                });
            }
        }
        b.push(
            row.iter()
                .zip(&lambdas)
                .map(|(av, lj)| 0.5 * (lambdas[0] - lj) * av)
                .collect(),
        );
        znorms.push(grid.inner(&zu, &zu));
        a.push(row);
    }
    Ok(SpectralCoefficients {
        a,
        b,
        znorms,
        lambdas,
        triangular_max,
    })
}

impl SpectralCoefficients {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn modes(&self) -> usize {
        self.lambdas.len()
    }

    /// `a_{αj}`, 1-based.
    pub fn coef(&self, alpha: usize, j: usize) -> f64 {
        self.a[alpha - 1][j - 1]
    }

    fn lambda(&self, j: usize) -> f64 {
        self.lambdas[j - 1]
    }

    /// `Σ_{β ≤ min(n, j−1)} a_{βj}²`.
    pub fn lower_weight(&self, j: usize) -> f64 {
        (1..j.min(self.dim() + 1)).map(|beta| self.coef(beta, j).powi(2)).sum()
    }

    /// `Σ_{j ≤ K} a_{αj}²`, the truncated Parseval sum for `‖z_α u_1‖²`.
    pub fn parseval_partial(&self, alpha: usize, upto: usize) -> f64 {
        (1..=upto).map(|j| self.coef(alpha, j).powi(2)).sum()
    }

    /// `Σ_{j∈C} a_{αj}²` for each cluster `C` of the spectrum; these do not
    /// depend on the basis chosen inside a degenerate eigenspace.
    pub fn cluster_weights(&self, spectrum: &Spectrum, alpha: usize) -> Vec<(std::ops::RangeInclusive<usize>, f64)> {
        spectrum
            .clusters()
            .into_iter()
            .map(|c| {
                let w = c.clone().map(|j| self.coef(alpha, j).powi(2)).sum();
                (c, w)
            })
            .collect()
    }

    /// Truncated-norm bound for each `K < k`:
    /// `(λ_{K+1}−λ_1) Σ_{j≤K} a_{αj}²` against `1 + Σ_{j=α+1}^{K} (λ_{K+1}−λ_j) a_{αj}²`.
    pub fn truncated_norm_bound(&self, alpha: usize, upto: usize) -> (f64, f64) {
        let top = self.lambda(upto + 1);
        let lhs = (top - self.lambda(1)) * self.parseval_partial(alpha, upto);
        let rhs = 1.0
            + (alpha + 1..=upto)
                .map(|j| (top - self.lambda(j)) * self.coef(alpha, j).powi(2))
                .sum::<f64>();
        (lhs, rhs)
    }
}

/// Partial sums of `Σ_j (λ_j − λ_1) a_{αj}²`, one per coordinate.
#[derive(Debug, Clone, Serialize)]
pub struct SumRule {
    pub upto: usize,
    pub partial: Vec<f64>,
    /// Whether every coordinate's partial sums are nondecreasing in `K`.
    pub monotone: bool,
}

pub fn sum_rule(coeffs: &SpectralCoefficients, upto: usize) -> Result<SumRule> {
    if upto > coeffs.modes() {
        return Err(Error::InsufficientModes {
            needed: upto,
            available: coeffs.modes(),
        });
    }
    let l1 = coeffs.lambda(1);
    let mut partial = Vec::new();
    let mut monotone = true;
    for alpha in 1..=coeffs.dim() {
        let mut s = 0.0;
        for j in alpha + 1..=upto {
            let next = s + (coeffs.lambda(j) - l1) * coeffs.coef(alpha, j).powi(2);
            monotone &= next >= s;
            s = next;
        }
        partial.push(s);
    }
    Ok(SumRule {
        upto,
        partial,
        monotone,
    })
}

/// Moments of powers of the ground state.
#[derive(Debug, Clone, Serialize)]
pub struct PowerMomentData {
    pub t: f64,
    /// `d_j = ∫ u_1^t u_j`.
    pub d: Vec<f64>,
    /// `β_j = d_j / sqrt(c λ_1 ∫u_1^{2t})`, `c = (t−1)²/(2t−1)`; absent at `t = 1`.
    pub beta: Option<Vec<f64>>,
    /// `∫ u_1^{2t}`.
    pub int_2t: f64,
    /// `∫ u_1^{t+1}`.
    pub int_t1: f64,
    /// `B(t) = ∫u_1^{2t} / (∫u_1^{t+1})²`.
    pub b_of_t: f64,
    /// `c λ_1 ∫u_1^{2t}`.
    pub energy: f64,
}

pub fn power_factor(t: f64) -> f64 {
    (t - 1.0).powi(2) / (2.0 * t - 1.0)
}

pub fn power_moments(spectrum: &Spectrum, t: f64) -> Result<PowerMomentData> {
    if !(t > 0.5) || !t.is_finite() {
        return Err(Error::InvalidExponent(t));
    }
    let grid = spectrum.grid();
    let u1 = spectrum.u(1);
    // the ground state is nonnegative; clamp roundoff-level negatives
    let ut: Vec<f64> = u1.iter().map(|&u| u.max(0.0).powf(t)).collect();
    let d: Vec<f64> = (1..=spectrum.len()).map(|j| grid.inner(&ut, spectrum.u(j))).collect();
    let int_2t = grid.inner(&ut, &ut);
    let int_t1 = grid.inner(&ut, u1);
    let energy = power_factor(t) * spectrum.lambda(1) * int_2t;
    let beta = (energy > 0.0).then(|| {
        let s = energy.sqrt();
        d.iter().map(|x| x / s).collect()
    });
    Ok(PowerMomentData {
        t,
        d,
        beta,
        int_2t,
        int_t1,
        b_of_t: int_2t / (int_t1 * int_t1),
        energy,
    })
}

impl PowerMomentData {
    fn beta_or_err(&self) -> Result<&[f64]> {
        self.beta
            .as_deref()
            .ok_or_else(|| Error::Precondition("β is undefined at t = 1".into()))
    }

    /// `B(t)` rebuilt from the leading coefficient, `1 / (c λ_1 β_1²)`.
    pub fn b_from_leading(&self, lambda1: f64) -> Result<f64> {
        let beta = self.beta_or_err()?;
        Ok(1.0 / (power_factor(self.t) * lambda1 * beta[0] * beta[0]))
    }

    /// The two routes to the ground-state energy of `u_1^{t−1}`:
    /// `c λ_1 ∫u_1^{2t}` and `Σ_{j=2}^{k} (λ_j−λ_1) d_j²`.
    pub fn energy_routes(&self, spectrum: &Spectrum) -> (f64, f64) {
        let l1 = spectrum.lambda(1);
        let sum = (2..=self.d.len())
            .map(|j| (spectrum.lambda(j) - l1) * self.d[j - 1].powi(2))
            .sum();
        (self.energy, sum)
    }

    /// `Σ_{j=2}^{K} (λ_j−λ_1) β_j²` for `K = 2..=k`.
    pub fn weighted_partials(&self, spectrum: &Spectrum) -> Result<Vec<f64>> {
        let beta = self.beta_or_err()?;
        let l1 = spectrum.lambda(1);
        let mut s = 0.0;
        Ok((2..=beta.len())
            .map(|j| {
                s += (spectrum.lambda(j) - l1) * beta[j - 1].powi(2);
                s
            })
            .collect())
    }

    /// `c λ_1 Σ_{j≤K} β_j²` for `K = 1..=k`; tends to 1 from below.
    pub fn normalized_partials(&self, spectrum: &Spectrum) -> Result<Vec<f64>> {
        let beta = self.beta_or_err()?;
        let scale = power_factor(self.t) * spectrum.lambda(1);
        let mut s = 0.0;
        Ok(beta
            .iter()
            .map(|b| {
                s += b * b;
                scale * s
            })
            .collect())
    }

    /// `(λ_j−λ_1) β_j² + (λ_j−λ_1) Σ_{β<j} a_{βj}²` for `j = 2..=k`.
    pub fn mixed_terms(&self, spectrum: &Spectrum, coeffs: &SpectralCoefficients) -> Result<Vec<f64>> {
        let beta = self.beta_or_err()?;
        let l1 = spectrum.lambda(1);
        Ok((2..=beta.len())
            .map(|j| {
                let gap = spectrum.lambda(j) - l1;
                gap * beta[j - 1].powi(2) + gap * coeffs.lower_weight(j)
            })
            .collect())
    }

    /// `Σ_α 1/‖z_α u_1‖²` against `((t+1)²/(2t−1)) λ_1 B(t)`.
    pub fn inverse_norm_bound(&self, spectrum: &Spectrum, coeffs: &SpectralCoefficients) -> (f64, f64) {
        let lhs = coeffs.znorms.iter().map(|z| 1.0 / z).sum();
        let t = self.t;
        let rhs = (t + 1.0).powi(2) / (2.0 * t - 1.0) * spectrum.lambda(1) * self.b_of_t;
        (lhs, rhs)
    }
}

/// Exponent `t = 2σ/(σ+λ_1)` that optimizes the coordinate bound.
pub fn optimal_exponent(sigma: f64, lambda1: f64) -> f64 {
    2.0 * sigma / (sigma + lambda1)
}

/// Bracket values below this are clamped silently.
pub const BRACKET_QUIET: f64 = -1e-6;
/// Bracket values below this are errors.
pub const BRACKET_LIMIT: f64 = -1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct SigmaL {
    pub l: usize,
    pub value: f64,
    /// `[1 − (λ_j−λ_1) Σ_{α<j} a_{αj}²]` for `j = 2..=l`, before clamping.
    pub brackets: Vec<f64>,
    /// `j` values whose bracket was clamped below `-1e-6`.
    pub clamped: Vec<usize>,
    /// A degenerate cluster straddles `l`, so the value depends on the basis.
    pub basis_dependent: bool,
}

/// `σ_l = λ_1 + (λ_{l+1}−λ_1) / (1 + Σ_{j=2}^{l} (λ_{l+1}−λ_j)/(λ_j−λ_1) · bracket_j)`.
pub fn sigma_l(spectrum: &Spectrum, coeffs: &SpectralCoefficients, l: usize) -> Result<SigmaL> {
    if l == 0 || l + 1 > spectrum.len() {
        return Err(Error::IndexOutOfRange {
            index: l,
            min: 1,
            max: spectrum.len().saturating_sub(1),
        });
    }
    let l1 = spectrum.lambda(1);
    let top = spectrum.lambda(l + 1);
    let mut brackets = Vec::new();
    let mut clamped = Vec::new();
    let mut denom = 1.0;
    for j in 2..=l {
        let gap = spectrum.lambda(j) - l1;
        let raw = 1.0 - gap * coeffs.lower_weight(j);
        brackets.push(raw);
        if raw < BRACKET_LIMIT {
            return Err(Error::NegativeBracket { j, value: raw });
        }
        if raw < BRACKET_QUIET {
            clamped.push(j);
        }
        denom += (top - spectrum.lambda(j)) / gap * raw.max(0.0);
    }
    Ok(SigmaL {
        l,
        value: l1 + (top - l1) / denom,
        brackets,
        clamped,
        basis_dependent: spectrum.cluster_split_at(l),
    })
}

/// Both sides of the coordinate bound
/// `Σ_α (λ_{k+1}−λ_1) / (1 + Σ_{j=α+1}^{k} (λ_{k+1}−λ_j) a_{αj}²) ≤ 3λ_1 + λ_1²/σ_l`.
#[derive(Debug, Clone, Serialize)]
pub struct CoordinateBoundSides {
    pub k: usize,
    pub l: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub sigma: SigmaL,
    /// A degenerate cluster straddles `k`.
    pub basis_dependent: bool,
}

pub fn coordinate_bound_sides(
    spectrum: &Spectrum,
    coeffs: &SpectralCoefficients,
    k: usize,
    l: usize,
) -> Result<CoordinateBoundSides> {
    if k == 0 || k + 1 > spectrum.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            min: 1,
            max: spectrum.len().saturating_sub(1),
        });
    }
    let sigma = sigma_l(spectrum, coeffs, l)?;
    let l1 = spectrum.lambda(1);
    let top = spectrum.lambda(k + 1);
    let lhs = (1..=coeffs.dim())
        .map(|alpha| {
            let denom = 1.0
                + (alpha + 1..=k)
                    .map(|j| (top - spectrum.lambda(j)) * coeffs.coef(alpha, j).powi(2))
                    .sum::<f64>();
            (top - l1) / denom
        })
        .sum();
    let rhs = 3.0 * l1 + l1 * l1 / sigma.value;
    Ok(CoordinateBoundSides {
        k,
        l,
        lhs,
        rhs,
        sigma,
        basis_dependent: spectrum.cluster_split_at(k),
    })
}

/// Every derived quantity for one spectrum, with the truncated-form checks
/// evaluated. Produced by [`analyze`].
#[derive(Debug, Clone, Serialize)]
pub struct SpectralAnalysis {
    pub coefficients: SpectralCoefficients,
    pub rotation_orthogonality: f64,
    pub rotation_triangularity: f64,
    pub sum_rule: SumRule,
    /// Worst `lhs − rhs` of the truncated-norm bound over `α` and `K < k`.
    pub truncated_norm_excess: f64,
    /// Worst `Σ_{j≤k} a_{αj}² − ‖z_α u_1‖²` (Parseval from below).
    pub parseval_excess: f64,
    pub power: PowerMomentData,
    pub weighted_power_max: Option<f64>,
    pub normalized_power_max: Option<f64>,
    pub mixed_max: Option<f64>,
    pub inverse_norm: (f64, f64),
}

/// Build moments, coefficients, and power moments for exponent `t`.
pub fn analyze(spectrum: &Spectrum, t: f64) -> Result<SpectralAnalysis> {
    let moments = MomentData::compute(spectrum)?;
    let coefficients = overlap_coefficients(&moments, spectrum)?;
    let k = spectrum.len();
    let sum_rule = sum_rule(&coefficients, k)?;
    let mut truncated_norm_excess = f64::NEG_INFINITY;
    let mut parseval_excess = f64::NEG_INFINITY;
    for alpha in 1..=coefficients.dim() {
        for upto in 1..k {
            let (lhs, rhs) = coefficients.truncated_norm_bound(alpha, upto);
            truncated_norm_excess = truncated_norm_excess.max(lhs - rhs);
        }
        parseval_excess = parseval_excess.max(coefficients.parseval_partial(alpha, k) - coefficients.znorms[alpha - 1]);
    }
    let power = power_moments(spectrum, t)?;
    let max_of = |v: Result<Vec<f64>>| v.ok().and_then(|v| v.into_iter().reduce(f64::max));
    let weighted_power_max = max_of(power.weighted_partials(spectrum));
    let normalized_power_max = max_of(power.normalized_partials(spectrum));
    let mixed_max = max_of(power.mixed_terms(spectrum, &coefficients));
    let inverse_norm = power.inverse_norm_bound(spectrum, &coefficients);
    Ok(SpectralAnalysis {
        rotation_orthogonality: moments.orthogonality_defect(),
        rotation_triangularity: moments.triangular_defect(),
        coefficients,
        sum_rule,
        truncated_norm_excess,
        parseval_excess,
        power,
        weighted_power_max,
        normalized_power_max,
        mixed_max,
        inverse_norm,
    })
}
