//! Grid-refinement studies: eigenvalues over halving spacings, Richardson
//! extrapolation, empirical order, and the discretization allowance passed to
//! the inequality checks.

use std::sync::Arc;

use serde::Serialize;

use crate::domain::DomainSpec;
use crate::eigensolve::{smallest_k, Spectrum};
use crate::error::{Error, Result};
use crate::grid::rasterize;
use crate::sparse::assemble_laplacian;

/// Worker cap from `SPECLAB_THREADS`, defaulting to the available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("SPECLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Apply `f` to every item with at most [`thread_cap`] threads; output order
/// matches input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let cap = thread_cap().min(items.len()).max(1);
    if cap == 1 {
        return items.iter().map(&f).collect();
    }
    let mut out = Vec::with_capacity(items.len());
    for batch in items.chunks(cap) {
        std::thread::scope(|s| {
            let handles: Vec<_> = batch.iter().map(|it| s.spawn(|| f(it))).collect();
            out.extend(handles.into_iter().map(|h| h.join().expect("worker panicked")));
        });
    }
    out
}

/// Rasterize, assemble, and solve for the lowest `k` pairs.
pub fn solve_domain(spec: &DomainSpec, h: f64, k: usize, tol: f64) -> Result<Spectrum> {
    let grid = rasterize(spec, h)?;
    let matrix = assemble_laplacian(&grid);
    smallest_k(&matrix, Arc::new(grid), k, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub nodes: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeConvergence {
    pub index: usize,
    /// `(4λ_f − λ_m)/3` from the two finest grids.
    pub extrapolated: f64,
    /// `(λ_c − λ_m)/(λ_m − λ_f)` from the three finest grids.
    pub ratio: f64,
    /// `log2(ratio)`; absent when the differences change sign.
    pub order: Option<f64>,
    /// `|λ_f − λ_m| / (2^p − 1)`, `p` clamped to `[1, 2]`.
    pub error_estimate: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub domain: String,
    pub k: usize,
    pub rows: Vec<ConvergenceRow>,
    pub modes: Vec<ModeConvergence>,
}

/// Default multiple of the worst relative error used as allowance.
pub const ALLOWANCE_FACTOR: f64 = 10.0;

impl ConvergenceStudy {
    /// Largest estimated relative eigenvalue error over all modes.
    pub fn max_relative_error(&self) -> f64 {
        self.modes.iter().map(|m| m.relative_error).fold(0.0, f64::max)
    }

    /// `10 ×` [`Self::max_relative_error`].
    pub fn relative_allowance(&self) -> f64 {
        ALLOWANCE_FACTOR * self.max_relative_error()
    }

    pub fn finest(&self) -> &ConvergenceRow {
        self.rows.last().expect("study has rows")
    }

    /// `h,nodes,lambda_1,...` then a row of extrapolated values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,nodes");
        for j in 1..=self.k {
            out.push_str(&format!(",lambda_{j}"));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{:.10e},{}", r.h, r.nodes));
            for v in &r.values {
                out.push_str(&format!(",{v:.12e}"));
            }
            out.push('\n');
        }
        out.push_str("extrapolated,");
        for m in &self.modes {
            out.push_str(&format!(",{:.12e}", m.extrapolated));
        }
        out.push('\n');
        out
    }
}

fn check_spacings(spacings: &[f64]) -> Result<()> {
    if spacings.len() < 3 {
        return Err(Error::Precondition(format!(
            "convergence needs at least 3 spacings, got {}",
            spacings.len()
        )));
    }
    for w in spacings.windows(2) {
        if !((w[1] - w[0] / 2.0).abs() <= 1e-12 * w[0]) {
            return Err(Error::Precondition(format!(
                "each spacing must halve the previous one ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Richardson data for one mode from coarse, middle, and fine values.
pub fn richardson(index: usize, coarse: f64, middle: f64, fine: f64) -> ModeConvergence {
    let ratio = (coarse - middle) / (middle - fine);
    let order = (ratio > 0.0 && ratio.is_finite()).then(|| ratio.log2());
    let p = order.unwrap_or(1.0).clamp(1.0, 2.0);
    let error_estimate = (fine - middle).abs() / (2f64.powf(p) - 1.0);
    ModeConvergence {
        index,
        extrapolated: (4.0 * fine - middle) / 3.0,
        ratio,
        order,
        error_estimate,
        relative_error: error_estimate / fine.abs(),
    }
}

/// Solve on each spacing (coarse to fine, each half the previous) and analyze
/// the lowest `k` eigenvalues. Solves run concurrently.
pub fn convergence_study(spec: &DomainSpec, spacings: &[f64], k: usize, tol: f64) -> Result<ConvergenceStudy> {
    convergence_with_spectra(spec, spacings, k, tol).map(|(study, _)| study)
}

/// As [`convergence_study`], also returning every computed spectrum.
pub fn convergence_with_spectra(
    spec: &DomainSpec,
    spacings: &[f64],
    k: usize,
    tol: f64,
) -> Result<(ConvergenceStudy, Vec<Spectrum>)> {
    check_spacings(spacings)?;
    spec.validate()?;
    let spectra = parallel_map(spacings, |&h| solve_domain(spec, h, k, tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((study_from_spectra(spec.label(), &spectra), spectra))
}

/// Richardson analysis of already computed spectra ordered coarse to fine.
pub fn study_from_spectra(domain: String, spectra: &[Spectrum]) -> ConvergenceStudy {
    let k = spectra.iter().map(|s| s.len()).min().unwrap_or(0);
    let rows: Vec<ConvergenceRow> = spectra
        .iter()
        .map(|s| ConvergenceRow {
            h: s.grid().spacing(),
            nodes: s.grid().node_count(),
            values: s.values()[..k].to_vec(),
        })
        .collect();
    let n = rows.len();
    let modes = if n >= 3 {
        (0..k)
            .map(|j| {
                richardson(
                    j + 1,
                    rows[n - 3].values[j],
                    rows[n - 2].values[j],
                    rows[n - 1].values[j],
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    ConvergenceStudy { domain, k, rows, modes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn richardson_on_exact_quadratic() {
        let f = |h: f64| 10.0 + 3.0 * h * h;
        let m = richardson(1, f(0.4), f(0.2), f(0.1));
        assert!((m.extrapolated - 10.0).abs() < 1e-12);
        assert!((m.order.unwrap() - 2.0).abs() < 1e-12);
        assert!((m.ratio - 4.0).abs() < 1e-12);
        assert!((m.error_estimate - 3.0 * 0.01).abs() < 1e-12);
    }

    #[test]
    fn oscillating_differences_fall_back_to_first_order() {
        let m = richardson(1, 1.0, 2.0, 1.5);
        assert!(m.order.is_none());
        assert!((m.error_estimate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn square_is_second_order() {
        let spec = DomainSpec::Rectangle {
            width: 1.0,
            height: 1.0,
        };
        let st = convergence_study(&spec, &[1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0], 3, 1e-9).unwrap();
        let m = &st.modes[0];
        assert!((m.order.unwrap() - 2.0).abs() < 0.05);
        assert!((3.5..=4.5).contains(&m.ratio));
        let exact = 2.0 * PI * PI;
        assert!((m.extrapolated - exact).abs() / exact < (st.finest().values[0] - exact).abs() / exact);
        assert!(st.relative_allowance() > 0.0);
        assert_eq!(st.to_csv().lines().count(), 5);
    }

    #[test]
    fn spacing_contract() {
        let spec = DomainSpec::Interval { length: 1.0 };
        assert!(convergence_study(&spec, &[0.25, 0.125], 1, 1e-9).is_err());
        assert!(convergence_study(&spec, &[0.25, 0.1, 0.05], 1, 1e-9).is_err());
    }

    #[test]
    fn parallel_map_keeps_order() {
        let v: Vec<usize> = (0..17).collect();
        assert_eq!(parallel_map(&v, |x| x * 2), (0..17).map(|x| x * 2).collect::<Vec<_>>());
    }
}
