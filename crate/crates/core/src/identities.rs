//! Algebraic identities over an increasing sequence `θ_1..θ_{m+2}` and a
//! real `(m+1)×(m+1)` matrix `ω`, evaluated two ways.
//!
//! With `θ = λ` and `ω = a` these are the rearrangements that turn the
//! coordinate bound into the ratio dichotomy. Bracket terms
//! `[1 − Σ_{p=i+1}^{j} (θ_p−θ_1) ω_{ip}²]` appear throughout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralCoefficients;

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn compensated(it: impl IntoIterator<Item = f64>) -> f64 {
    let mut c = Compensated::default();
    for x in it {
        c.add(x);
    }
    c.value()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityInstance {
    theta: Vec<f64>,
    omega: Vec<Vec<f64>>,
}

impl IdentityInstance {
    /// `theta` has length `m+2` with `m ≥ 1`, `omega` is `(m+1)×(m+1)`.
    ///
    /// `θ` must be nondecreasing with `θ_2 − θ_1` above `1e-9·|θ_1| + 1e-9`;
    /// ties above `θ_2` are allowed since they arise from degenerate spectra
    /// and never reach a denominator.
    pub fn new(theta: Vec<f64>, omega: Vec<Vec<f64>>) -> Result<Self> {
        if theta.len() < 3 {
            return Err(Error::Precondition(format!(
                "theta needs at least 3 entries, got {}",
                theta.len()
            )));
        }
        let size = theta.len() - 1;
        if omega.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: omega.len(),
            });
        }
        if let Some(row) = omega.iter().find(|r| r.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: row.len(),
            });
        }
        if theta.iter().chain(omega.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Precondition("non-finite entry".into()));
        }
        if theta.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Precondition("theta must be nondecreasing".into()));
        }
        if theta[1] - theta[0] < 1e-9 * theta[0].abs() + 1e-9 {
            return Err(Error::Precondition("theta_2 must exceed theta_1".into()));
        }
        Ok(IdentityInstance { theta, omega })
    }

    /// `θ = λ_1..λ_{m+2}`, `ω_{ip} = a_{ip}` for `i ≤ n`, zero rows beyond.
    pub fn from_spectrum(coeffs: &SpectralCoefficients, m: usize) -> Result<Self> {
        if coeffs.modes() < m + 2 {
            return Err(Error::InsufficientModes {
                needed: m + 2,
                available: coeffs.modes(),
            });
        }
        let theta = coeffs.lambdas[..m + 2].to_vec();
        let omega = (1..=m + 1)
            .map(|i| {
                (1..=m + 1)
                    .map(|p| if i <= coeffs.dim() { coeffs.coef(i, p) } else { 0.0 })
                    .collect()
            })
            .collect();
        Self::new(theta, omega)
    }

    pub fn m(&self) -> usize {
        self.theta.len() - 2
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.theta[i - 1]
    }

    pub fn omega(&self, i: usize, p: usize) -> f64 {
        self.omega[i - 1][p - 1]
    }

    /// `1 + Σ_{p=i+1}^{last} (θ_top − θ_p) ω_{ip}²`.
    fn weight(&self, i: usize, last: usize, top: usize) -> f64 {
        1.0 + compensated((i + 1..=last).map(|p| (self.theta(top) - self.theta(p)) * self.omega(i, p).powi(2)))
    }

    /// `1 − Σ_{p=i+1}^{last} (θ_p − θ_1) ω_{ip}²`.
    pub fn bracket(&self, i: usize, last: usize) -> f64 {
        1.0 - compensated((i + 1..=last).map(|p| (self.theta(p) - self.theta(1)) * self.omega(i, p).powi(2)))
    }

    /// `Σ_{i≤m} (θ_{m+2}−θ_1) / (1 + Σ_{p>i} (θ_{m+2}−θ_p) ω_{ip}²) − Σ_{i≤m} (θ_{i+1}−θ_1)`.
    pub fn layered_lhs(&self) -> f64 {
        let m = self.m();
        let top = self.theta(m + 2) - self.theta(1);
        compensated((1..=m).flat_map(|i| [top / self.weight(i, m + 1, m + 2), -(self.theta(i + 1) - self.theta(1))]))
    }

    /// `Σ_{j=1}^{m} G_j`.
    pub fn layered_rhs(&self) -> f64 {
        compensated((1..=self.m()).map(|j| self.layer(j)))
    }

    /// `D_{ij}`, the product of the three weights sharing row `i`.
    pub fn denominator(&self, i: usize, j: usize) -> f64 {
        let m = self.m();
        self.weight(i, i + j - 1, i + j) * self.weight(i, i + j, i + j + 1) * self.weight(i, m + 1, m + 2)
    }

    /// `G_j`, `1 ≤ j ≤ m`.
    pub fn layer(&self, j: usize) -> f64 {
        let m = self.m();
        assert!((1..=m).contains(&j), "layer index {j} outside 1..={m}");
        compensated((1..=m + 1 - j).map(|i| {
            let num = (self.theta(i + j + 1) - self.theta(i + j)) * self.bracket(i, i + j);
            num / (self.weight(i, i + j - 1, i + j) * self.weight(i, i + j, i + j + 1))
        }))
    }

    /// `F_j`, `1 ≤ j ≤ m+1`; satisfies `F_j − G_j = F_{j+1}` and `F_{m+1} = 0`.
    pub fn tail(&self, j: usize) -> f64 {
        let m = self.m();
        assert!((1..=m + 1).contains(&j), "tail index {j} outside 1..={}", m + 1);
        compensated((1..=m + 1 - j).map(|i| {
            let ij = i + j;
            let outer =
                compensated((ij + 1..=m + 1).map(|p| (self.theta(m + 2) - self.theta(p)) * self.omega(i, p).powi(2)));
            let num =
                (self.theta(m + 2) - self.theta(ij)) * self.bracket(i, ij) - (self.theta(ij) - self.theta(1)) * outer;
            num / (self.weight(i, ij - 1, ij) * self.weight(i, m + 1, m + 2))
        }))
    }

    fn regroup_factor(&self, s: usize) -> f64 {
        let t1 = self.theta(1);
        (self.theta(s + 1) - self.theta(s)) * (self.theta(2) - t1).powi(2)
            / ((self.theta(s + 1) - t1) * (self.theta(s) - t1))
    }

    /// Weighted bracket sum indexed by `(j, i)`.
    pub fn regrouped_lhs(&self) -> f64 {
        let m = self.m();
        compensated(
            (1..=m).flat_map(|j| (1..=m + 1 - j).map(move |i| self.regroup_factor(i + j) * self.bracket(i, i + j))),
        )
    }

    /// The same sum collected by `s = i + j`.
    pub fn regrouped_rhs(&self) -> f64 {
        let m = self.m();
        compensated((2..=m + 1).map(|s| self.regroup_factor(s) * compensated((1..s).map(|i| self.bracket(i, s)))))
    }

    /// `Σ_{j=2}^{i−1} (θ_i−θ_j)/(θ_j−θ_1) · [1 − (θ_j−θ_1) Σ_{k<j} ω_{kj}²]`, `1 ≤ i ≤ m+2`.
    pub fn partial_lhs(&self, i: usize) -> f64 {
        self.check_partial_index(i);
        let t1 = self.theta(1);
        compensated((2..i).map(|j| {
            let gap = self.theta(j) - t1;
            let col = compensated((1..j).map(|k| self.omega(k, j).powi(2)));
            (self.theta(i) - self.theta(j)) / gap * (1.0 - gap * col)
        }))
    }

    /// `Σ_{j=2}^{i−1} (θ_i−θ_1)(θ_{j+1}−θ_j)/((θ_{j+1}−θ_1)(θ_j−θ_1)) · Σ_{k<j} bracket(k, j)`.
    pub fn partial_rhs(&self, i: usize) -> f64 {
        self.check_partial_index(i);
        let t1 = self.theta(1);
        compensated((2..i).map(|j| {
            let f = (self.theta(i) - t1) * (self.theta(j + 1) - self.theta(j))
                / ((self.theta(j + 1) - t1) * (self.theta(j) - t1));
            f * compensated((1..j).map(|k| self.bracket(k, j)))
        }))
    }

    fn check_partial_index(&self, i: usize) {
        let top = self.m() + 2;
        assert!((1..=top).contains(&i), "index {i} outside 1..={top}");
    }

    /// Smallest bracket `[1 − Σ_{p=i+1}^{j} (θ_p−θ_1) ω_{ip}²]` over `i < j ≤ m+1`.
    pub fn min_bracket(&self) -> f64 {
        let m = self.m();
        (1..=m)
            .flat_map(|i| (i + 1..=m + 1).map(move |j| self.bracket(i, j)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest excess of `1 + Σ_{p=i+1}^{s−1} (θ_s−θ_p) ω_{ip}²` over
    /// `(θ_s−θ_1)/(θ_{i+1}−θ_1)`, for `i ≤ m` and `i+1 < s ≤ m+2`.
    pub fn chain_excess(&self) -> f64 {
        let m = self.m();
        let t1 = self.theta(1);
        (1..=m)
            .flat_map(|i| {
                (i + 2..=m + 2).map(move |s| self.weight(i, s - 1, s) - (self.theta(s) - t1) / (self.theta(i + 1) - t1))
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `|L − R| / (1 + |L|)`.
pub fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + lhs.abs())
}

/// Worst relative error of every identity on one instance.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct IdentityErrors {
    pub layered: f64,
    /// `F_j − G_j` against `F_{j+1}`, and `F_1` against the layered LHS.
    pub recursion: f64,
    pub regrouped: f64,
    pub partial: f64,
    /// Whether `F_{m+1}` evaluated to exactly zero.
    pub tail_vanishes: bool,
}

impl IdentityErrors {
    pub fn worst(&self) -> f64 {
        self.layered.max(self.recursion).max(self.regrouped).max(self.partial)
    }

    fn merge(&mut self, other: &IdentityErrors) {
        self.layered = self.layered.max(other.layered);
        self.recursion = self.recursion.max(other.recursion);
        self.regrouped = self.regrouped.max(other.regrouped);
        self.partial = self.partial.max(other.partial);
        self.tail_vanishes &= other.tail_vanishes;
    }
}

pub fn evaluate(inst: &IdentityInstance) -> IdentityErrors {
    let m = inst.m();
    let lhs = inst.layered_lhs();
    let mut recursion = relative_gap(inst.tail(1), lhs);
    for j in 1..=m {
        let fj = inst.tail(j);
        recursion = recursion.max(relative_gap(fj - inst.layer(j), inst.tail(j + 1)));
    }
    let partial = (1..=m + 2)
        .map(|i| relative_gap(inst.partial_lhs(i), inst.partial_rhs(i)))
        .fold(0.0, f64::max);
    IdentityErrors {
        layered: relative_gap(lhs, inst.layered_rhs()),
        recursion,
        regrouped: relative_gap(inst.regrouped_lhs(), inst.regrouped_rhs()),
        partial,
        tail_vanishes: inst.tail(m + 1) == 0.0,
    }
}

pub const TRIAL_TOLERANCE: f64 = 1e-10;
/// Minimum spacing of sampled `θ`; closer draws are rejected.
pub const MIN_GAP: f64 = 1e-3;

/// Draw `m` uniformly in `1..=m_max`, `θ` as sorted uniforms on `[0, 10]`,
/// `ω` uniform on `[−1, 1]`. Returns `None` when two `θ` fall within [`MIN_GAP`].
pub fn random_instance(rng: &mut impl Rng, m_max: usize) -> Option<IdentityInstance> {
    let m = rng.gen_range(1..=m_max.max(1));
    let mut theta: Vec<f64> = (0..m + 2).map(|_| rng.gen_range(0.0..10.0)).collect();
    theta.sort_by(f64::total_cmp);
    let omega = (0..m + 1)
        .map(|_| (0..m + 1).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    if theta.windows(2).any(|w| w[1] - w[0] < MIN_GAP) {
        return None;
    }
    IdentityInstance::new(theta, omega).ok()
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialSummary {
    pub seed: u64,
    pub trials: usize,
    pub m_max: usize,
    /// Draws rejected for violating the minimum gap.
    pub skipped: usize,
    /// Trials whose worst error exceeded the tolerance.
    pub failures: usize,
    pub tolerance: f64,
    pub worst: IdentityErrors,
    pub pass: bool,
}

/// Run `trials` accepted random instances from a ChaCha8 stream seeded with `seed`.
pub fn run_trials(seed: u64, trials: usize, m_max: usize) -> Result<TrialSummary> {
    if m_max == 0 {
        return Err(Error::Precondition("m_max must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = IdentityErrors {
        tail_vanishes: true,
        ..Default::default()
    };
    let (mut accepted, mut skipped, mut failures) = (0, 0, 0);
    while accepted < trials {
        let Some(inst) = random_instance(&mut rng, m_max) else {
            skipped += 1;
            continue;
        };
        accepted += 1;
        let e = evaluate(&inst);
        if e.worst() > TRIAL_TOLERANCE || !e.tail_vanishes {
            failures += 1;
        }
        worst.merge(&e);
    }
    Ok(TrialSummary {
        seed,
        trials,
        m_max,
        skipped,
        failures,
        tolerance: TRIAL_TOLERANCE,
        worst,
        pass: failures == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_omega(theta: Vec<f64>) -> IdentityInstance {
        let s = theta.len() - 1;
        IdentityInstance::new(theta, vec![vec![0.0; s]; s]).unwrap()
    }

    #[test]
    fn zero_matrix_telescopes() {
        let inst = zero_omega(vec![0.5, 1.25, 4.0]);
        assert!((inst.layered_lhs() - 2.75).abs() < 1e-15);
        assert!((inst.layered_rhs() - 2.75).abs() < 1e-15);

        let theta = vec![0.0, 1.0, 1.5, 3.0, 7.0, 7.5];
        let inst = zero_omega(theta.clone());
        let m = inst.m();
        let expect: f64 = (1..=m).map(|i| theta[m + 1] - theta[i]).sum();
        assert!((inst.layered_lhs() - expect).abs() < 1e-13);
        assert!((inst.layered_rhs() - expect).abs() < 1e-13);
        assert!(relative_gap(inst.regrouped_lhs(), inst.regrouped_rhs()) < 1e-14);
    }

    #[test]
    fn recursion_on_fixed_instance() {
        let inst = IdentityInstance::new(
            vec![0.3, 1.1, 2.0, 2.4, 5.0],
            vec![
                vec![0.2, -0.7, 0.4, 0.9],
                vec![0.1, 0.3, -0.5, 0.2],
                vec![-0.6, 0.8, 0.05, -0.3],
                vec![0.0, 0.4, 0.7, -1.0],
            ],
        )
        .unwrap();
        let m = inst.m();
        assert_eq!(inst.tail(m + 1), 0.0);
        for j in 1..=m {
            assert!(relative_gap(inst.tail(j) - inst.layer(j), inst.tail(j + 1)) < 1e-13);
        }
        assert!(relative_gap(inst.tail(1), inst.layered_lhs()) < 1e-13);
        let e = evaluate(&inst);
        assert!(e.worst() < 1e-13, "{e:?}");
        // D_ij is the product of the two layer weights and the outer weight
        let d = inst.denominator(1, 1);
        let w1 = 1.0;
        let w2 = 1.0 + (2.0 - 1.1) * 0.7f64.powi(2);
        let w3 = 1.0 + (5.0 - 1.1) * 0.49 + (5.0 - 2.0) * 0.16 + (5.0 - 2.4) * 0.81;
        assert!((d - w1 * w2 * w3).abs() < 1e-13);
    }

    #[test]
    fn partial_small_indices() {
        let inst = IdentityInstance::new(vec![0.0, 1.0, 3.0], vec![vec![0.0, 0.5], vec![0.0, 0.0]]).unwrap();
        for i in 1..=2 {
            assert_eq!(inst.partial_lhs(i), 0.0);
            assert_eq!(inst.partial_rhs(i), 0.0);
        }
        let expect = (3.0 - 1.0) / 1.0 * (1.0 - 0.25);
        assert!((inst.partial_lhs(3) - expect).abs() < 1e-15);
        assert!((inst.partial_rhs(3) - expect).abs() < 1e-15);
    }

    #[test]
    fn single_layer_regrouping() {
        let inst = IdentityInstance::new(vec![0.0, 2.0, 3.0], vec![vec![0.0, 0.3], vec![0.0, 0.0]]).unwrap();
        assert_eq!(inst.regrouped_lhs(), inst.regrouped_rhs());
    }

    #[test]
    fn randomized_trials_pass() {
        let s = run_trials(7, 2000, 6).unwrap();
        assert!(s.pass, "{s:?}");
        assert!(s.worst.worst() < TRIAL_TOLERANCE);
        assert!(s.worst.tail_vanishes);
    }

    #[test]
    fn trials_are_reproducible() {
        let a = run_trials(11, 300, 4).unwrap();
        let b = run_trials(11, 300, 4).unwrap();
        assert_eq!(a.skipped, b.skipped);
        assert_eq!(a.worst.worst().to_bits(), b.worst.worst().to_bits());
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(IdentityInstance::new(vec![1.0, 1.0, 2.0], vec![vec![0.0; 2]; 2]).is_err());
        assert!(IdentityInstance::new(vec![0.0, 2.0, 1.0], vec![vec![0.0; 2]; 2]).is_err());
        assert!(IdentityInstance::new(vec![0.0, 1.0, 2.0], vec![vec![0.0; 3]; 2]).is_err());
        assert!(IdentityInstance::new(vec![0.0, 1.0], vec![vec![0.0]]).is_err());
        // ties above θ_2 are accepted
        assert!(IdentityInstance::new(vec![0.0, 1.0, 1.0, 2.0], vec![vec![0.0; 3]; 3]).is_ok());
        assert!(run_trials(1, 1, 0).is_err());
    }
}
