//! Closed-form reference spectra.
//!
//! Rectangles, boxes, and intervals separate; disks and balls reduce to
//! zeros of Bessel and spherical Bessel functions, found here by bisection
//! inside brackets supplied by zero interlacing
//! `j_{ν,s} < j_{ν+1,s} < j_{ν,s+1}`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModeLabel {
    Interval {
        p: usize,
    },
    Rectangle {
        p: usize,
        q: usize,
    },
    Box {
        p: usize,
        q: usize,
        r: usize,
    },
    /// Disk mode `J_m(j_{m,s} r)`; `m ≥ 1` modes come in cos/sin pairs.
    Bessel {
        m: usize,
        s: usize,
    },
    /// Ball mode `j_ℓ(z_{ℓ,s} r) Y_ℓ^μ`, multiplicity `2ℓ+1`.
    Spherical {
        l: usize,
        s: usize,
    },
}

/// Exact eigenvalues, sorted, repeated according to multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSpectrum {
    pub values: Vec<f64>,
    pub labels: Vec<ModeLabel>,
}

impl OracleSpectrum {
    fn from_modes(mut modes: Vec<(f64, ModeLabel)>, k: usize) -> Self {
        modes.sort_by(|a, b| a.0.total_cmp(&b.0));
        modes.truncate(k);
        let (values, labels) = modes.into_iter().unzip();
        OracleSpectrum { values, labels }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn interval_spectrum(length: f64, k: usize) -> OracleSpectrum {
    let modes = (1..=k)
        .map(|p| ((p as f64 * PI / length).powi(2), ModeLabel::Interval { p }))
        .collect();
    OracleSpectrum::from_modes(modes, k)
}

/// `π²(p²/a² + q²/b²)`, `p, q ≥ 1`, the `k` smallest.
pub fn rectangle_spectrum(a: f64, b: f64, k: usize) -> OracleSpectrum {
    // the k smallest modes all have p, q ≤ k
    let mut modes = Vec::with_capacity(k * k);
    for p in 1..=k {
        for q in 1..=k {
            let v = PI * PI * ((p * p) as f64 / (a * a) + (q * q) as f64 / (b * b));
            modes.push((v, ModeLabel::Rectangle { p, q }));
        }
    }
    OracleSpectrum::from_modes(modes, k)
}

pub fn box_spectrum(a: f64, b: f64, c: f64, k: usize) -> OracleSpectrum {
    let mut modes = Vec::with_capacity(k * k * k);
    for p in 1..=k {
        for q in 1..=k {
            for r in 1..=k {
                let v = PI * PI * ((p * p) as f64 / (a * a) + (q * q) as f64 / (b * b) + (r * r) as f64 / (c * c));
                modes.push((v, ModeLabel::Box { p, q, r }));
            }
        }
    }
    OracleSpectrum::from_modes(modes, k)
}

/// `j_{m,s}² / r²`, multiplicity two for `m ≥ 1`.
pub fn disk_spectrum(radius: f64, k: usize) -> Result<OracleSpectrum> {
    let table = ZeroTable::build(Family::Cylindrical, k)?;
    let mut modes = Vec::new();
    for (m, zeros) in table.rows.iter().enumerate() {
        for (s, &z) in zeros.iter().enumerate() {
            let v = (z / radius).powi(2);
            let label = ModeLabel::Bessel { m, s: s + 1 };
            modes.push((v, label));
            if m > 0 {
                modes.push((v, label));
            }
        }
    }
    Ok(OracleSpectrum::from_modes(modes, k))
}

/// `z_{ℓ,s}² / r²` with `z_{ℓ,s}` the zeros of the spherical Bessel
/// function `j_ℓ`, multiplicity `2ℓ+1`.
pub fn ball_spectrum(radius: f64, k: usize) -> Result<OracleSpectrum> {
    let table = ZeroTable::build(Family::Spherical, k)?;
    let mut modes = Vec::new();
    for (l, zeros) in table.rows.iter().enumerate() {
        for (s, &z) in zeros.iter().enumerate() {
            let v = (z / radius).powi(2);
            for _ in 0..2 * l + 1 {
                modes.push((v, ModeLabel::Spherical { l, s: s + 1 }));
            }
        }
    }
    Ok(OracleSpectrum::from_modes(modes, k))
}

/// Overlap `∫ (x − ½) u_1 u_j` of the unit-interval sine modes
/// `u_j = √2 sin(jπx)`: `−8j / (π²(j²−1)²)` for even `j`, zero for odd `j`.
pub fn interval_overlap_oracle(j: usize) -> Result<f64> {
    if j < 2 {
        return Err(Error::Precondition(format!("overlap index j = {j} must be at least 2")));
    }
    if j % 2 == 1 {
        return Ok(0.0);
    }
    let jf = j as f64;
    Ok(-8.0 * jf / (PI * PI * (jf * jf - 1.0).powi(2)))
}

/// Bessel function of the first kind `J_m(x)`, `x ≥ 0`.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x <= 12.0 {
        bessel_series(m, x)
    } else {
        bessel_miller(m, x)
    }
}

fn bessel_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut i = 0usize;
    loop {
        i += 1;
        term *= -q / (i as f64 * (i + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && i as f64 > half {
            break;
        }
        if i > 500 {
            break;
        }
    }
    sum
}

/// Backward recurrence from a high starting order, normalized with
/// `J_0 + 2 Σ J_{2i} = 1`.
fn bessel_miller(m: usize, x: f64) -> f64 {
    let top = (x as usize).max(m) + 30 + (40.0 * (x.max(m as f64))).sqrt() as usize;
    let start = top + top % 2;
    let (mut next, mut cur) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for order in (1..=start).rev() {
        let prev = 2.0 * order as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{order-1}
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
        let o = order - 1;
        if o == m {
            wanted = cur;
        }
        if o > 0 && o % 2 == 0 {
            norm += 2.0 * cur;
        }
    }
    norm += cur;
    wanted / norm
}

/// Spherical Bessel function `j_ℓ(x)`, `x > 0`.
pub fn spherical_bessel_j(l: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if l == 0 {
        return j0;
    }
    let j1 = s / (x * x) - c / x;
    if x > l as f64 {
        let (mut prev, mut cur) = (j0, j1);
        for n in 1..l {
            let next = (2 * n + 1) as f64 / x * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    // backward recurrence, normalized against whichever of j0, j1 is larger
    let start = l + 20 + (10.0 * x.max(1.0)).sqrt() as usize;
    let (mut next, mut cur) = (0.0f64, 1e-30f64);
    let mut wanted = 0.0;
    let mut at_one = 0.0;
    for n in (1..=start).rev() {
        let prev = (2 * n + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            wanted *= 1e-250;
            at_one *= 1e-250;
        }
        if n - 1 == l {
            wanted = cur;
        }
        if n - 1 == 1 {
            at_one = cur;
        }
    }
    if j0.abs() >= j1.abs() {
        wanted * j0 / cur
    } else {
        wanted * j1 / at_one
    }
}

/// `s`-th positive zero of `J_m`.
pub fn bessel_zero(m: usize, s: usize) -> Result<f64> {
    if s == 0 {
        return Err(Error::Precondition("zero index s starts at 1".into()));
    }
    zeros_of_order(Family::Cylindrical, m, s).map(|z| z[s - 1])
}

/// `s`-th positive zero of the spherical Bessel function `j_ℓ`.
pub fn spherical_bessel_zero(l: usize, s: usize) -> Result<f64> {
    if s == 0 {
        return Err(Error::Precondition("zero index s starts at 1".into()));
    }
    zeros_of_order(Family::Spherical, l, s).map(|z| z[s - 1])
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Cylindrical,
    Spherical,
}

impl Family {
    fn eval(self, order: usize, x: f64) -> f64 {
        match self {
            Family::Cylindrical => bessel_j(order, x),
            Family::Spherical => spherical_bessel_j(order, x),
        }
    }

    /// First `count` zeros of the order-0 function.
    fn base_zeros(self, count: usize) -> Result<Vec<f64>> {
        match self {
            // sin(x)/x vanishes at sπ
            Family::Spherical => Ok((1..=count).map(|s| s as f64 * PI).collect()),
            // j_{0,s} ∈ ((s − ½)π, sπ)
            Family::Cylindrical => (1..=count)
                .map(|s| bisect(|x| bessel_j(0, x), (s as f64 - 0.5) * PI, s as f64 * PI))
                .collect(),
        }
    }
}

/// Zeros `1..=count` of order `order`, built up from order 0 by interlacing.
fn zeros_of_order(family: Family, order: usize, count: usize) -> Result<Vec<f64>> {
    let mut row = family.base_zeros(count + order)?;
    for o in 1..=order {
        row = next_order(family, o, &row)?;
    }
    row.truncate(count);
    Ok(row)
}

/// Zeros of order `o` from the zeros of order `o − 1`; one fewer than given.
fn next_order(family: Family, o: usize, prev: &[f64]) -> Result<Vec<f64>> {
    prev.windows(2)
        .map(|w| bisect(|x| family.eval(o, x), w[0], w[1]))
        .collect()
}

fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::ConvergenceFailure(format!(
            "no sign change on [{lo}, {hi}] ({fa:e}, {fb:e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || b - a < 1e-14 * b.abs() {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Rows of zeros per order, enough to contain the `k` smallest modes.
struct ZeroTable {
    rows: Vec<Vec<f64>>,
}

impl ZeroTable {
    fn build(family: Family, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(ZeroTable { rows: Vec::new() });
        }
        // the k radial modes of order 0 bound the k-th eigenvalue; every
        // order whose first zero lies below that bound is kept
        let first = family.base_zeros(k)?;
        let bound = first[k - 1];
        // order m has first zero above m, so orders up to `bound` suffice
        let max_order = bound.ceil() as usize + 1;
        let mut row = family.base_zeros(k + max_order + 1)?;
        let mut rows = Vec::new();
        for o in 0..=max_order {
            if o > 0 {
                row = next_order(family, o, &row)?;
            }
            if row.is_empty() || row[0] > bound {
                break;
            }
            rows.push(row.iter().copied().filter(|&z| z <= bound).collect());
        }
        Ok(ZeroTable { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_examples() {
        let s = rectangle_spectrum(1.0, 1.0, 3);
        let pi2 = PI * PI;
        assert_eq!(s.values, vec![2.0 * pi2, 5.0 * pi2, 5.0 * pi2]);
        assert!((s.values[1] / s.values[0] - 2.5).abs() < 1e-15);
        let r = rectangle_spectrum(2.0, 1.0, 1);
        assert!((r.values[0] - 1.25 * pi2).abs() < 1e-12);
    }

    #[test]
    fn interval_and_box() {
        let s = interval_spectrum(1.0, 3);
        assert_eq!(s.values, vec![PI * PI, 4.0 * PI * PI, 9.0 * PI * PI]);
        let c = box_spectrum(1.0, 1.0, 1.0, 5);
        let pi2 = PI * PI;
        assert!((c.values[0] - 3.0 * pi2).abs() < 1e-12);
        assert!(c.values[1..4].iter().all(|v| (v - 6.0 * pi2).abs() < 1e-12));
        assert!((c.values[4] - 9.0 * pi2).abs() < 1e-12);
    }

    #[test]
    fn bessel_zero_values() {
        // bracketing of j_{0,1} in (2, 3) by direct sign check
        assert!(bessel_j(0, 2.0) > 0.0 && bessel_j(0, 3.0) < 0.0);
        assert!((bessel_zero(0, 1).unwrap() - 2.404_825_557_7).abs() < 1e-9);
        assert!((bessel_zero(1, 1).unwrap() - 3.831_705_970_2).abs() < 1e-9);
        let ratio = (bessel_zero(1, 1).unwrap() / bessel_zero(0, 1).unwrap()).powi(2);
        assert!((ratio - 2.5387).abs() < 1e-4);
        assert!(bessel_zero(0, 0).is_err());
    }

    #[test]
    fn bessel_series_and_recurrence_agree_at_switchover() {
        for m in 0..8 {
            let a = bessel_series(m, 12.0);
            let b = bessel_miller(m, 12.0);
            assert!((a - b).abs() < 1e-12, "m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn bessel_wronskian_identity() {
        // J_{m-1}(x) + J_{m+1}(x) = (2m/x) J_m(x)
        for &x in &[0.5, 3.0, 11.5, 12.5, 25.0, 40.0] {
            for m in 1..10 {
                let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
                let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
                assert!((lhs - rhs).abs() < 1e-12, "x={x} m={m}");
            }
        }
    }

    #[test]
    fn interlacing_holds() {
        let z0: Vec<f64> = (1..=4).map(|s| bessel_zero(0, s).unwrap()).collect();
        let z1: Vec<f64> = (1..=3).map(|s| bessel_zero(1, s).unwrap()).collect();
        for s in 0..3 {
            assert!(z0[s] < z1[s] && z1[s] < z0[s + 1]);
        }
        // large-order zero past the series range
        let z = bessel_zero(5, 4).unwrap();
        assert!(bessel_j(5, z).abs() < 1e-12 && z > 12.0);
    }

    #[test]
    fn disk_examples() {
        let s = disk_spectrum(1.0, 3).unwrap();
        assert!((s.values[0] - 5.7832).abs() < 1e-4);
        assert!((s.values[1] - 14.6820).abs() < 1e-4);
        assert_eq!(s.values[1], s.values[2]);
        let big = disk_spectrum(1.0, 12).unwrap();
        assert!(big.values.windows(2).all(|w| w[0] <= w[1]));
        // j_{2,1}² comes fourth and fifth
        assert!((big.values[3] - bessel_zero(2, 1).unwrap().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn ball_examples() {
        let s = ball_spectrum(1.0, 4).unwrap();
        assert!((s.values[0] - PI * PI).abs() < 1e-12);
        // ℓ = 1 triplet at 4.4934²
        assert!(s.values[1..4].iter().all(|v| (v.sqrt() - 4.493_409_457_9).abs() < 1e-9));
        let z = spherical_bessel_zero(2, 1).unwrap();
        assert!((z - 5.763_459_196_9).abs() < 1e-9);
        assert!(spherical_bessel_j(3, 2.0) > 0.0);
        assert!((spherical_bessel_j(3, 2.0) - 0.060_722_097_7).abs() < 1e-9);
    }

    #[test]
    fn interval_overlap_values() {
        assert!((interval_overlap_oracle(2).unwrap() + 16.0 / (9.0 * PI * PI)).abs() < 1e-15);
        assert!((interval_overlap_oracle(2).unwrap() + 0.180_127).abs() < 1e-6);
        assert_eq!(interval_overlap_oracle(3).unwrap(), 0.0);
        assert!(interval_overlap_oracle(1).is_err());
        let sum: f64 = (2..=30)
            .step_by(2)
            .map(|j| ((j * j - 1) as f64) * PI * PI * interval_overlap_oracle(j).unwrap().powi(2))
            .sum();
        assert!((0.999..=1.0).contains(&sum), "{sum}");
    }
}
