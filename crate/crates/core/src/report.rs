//! Run configuration, the commands behind the `speclab` binary, and their
//! machine-readable reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, Dichotomy, DichotomyAggregates, InequalityReport, Slack, SumConstant};
use crate::convergence::{self, ConvergenceStudy};
use crate::domain::{Bitmap, DomainSpec};
use crate::eigensolve::{SpectrumExport, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::identities::{self, TrialSummary};
use crate::oracle::{self, OracleSpectrum};
use crate::spectral::{self, optimal_exponent, SigmaL, SpectralAnalysis};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_M_MAX: usize = 6;
pub const DEFAULT_SPECTRUM_K: usize = 6;
/// Absolute slack for the truncated-form consistency checks.
pub const CONSISTENCY_SLACK: f64 = 1e-6;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// One run, readable from a JSON document and overridable from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    /// Exponent override; by default `2σ_l/(σ_l+λ_1)` with `l = n+1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Relative discretization allowance; by default from a three-grid study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(domain: DomainSpec, h: f64) -> Self {
        RunConfig {
            domain,
            h,
            k: None,
            l: None,
            i: None,
            t: None,
            slack: None,
            output: None,
            seed: DEFAULT_SEED,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn dim(&self) -> usize {
        self.domain.dimension()
    }
}

fn parse_numbers(args: &str, count: usize, name: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidDomain(format!("{name}: cannot parse '{args}'")))?;
    if v.len() != count {
        return Err(Error::InvalidDomain(format!(
            "{name} takes {count} parameter(s), got {}",
            v.len()
        )));
    }
    Ok(v)
}

/// Parse a domain name.
///
/// Shortcuts: `interval`, `square`, `cube`, `disk`, `ball`, `annulus`
/// (radii 0.5, 1), `lshape` (arm 1, thickness 0.5), `ellipse` (1, 0.5).
/// Parameterized: `interval:L`, `rectangle:w,h`, `box:w,h,d`, `disk:r`,
/// `ball:r`, `annulus:ri,ro`, `ellipse:a,b`, `lshape:arm,thickness`,
/// `bitmap:path.pgm,pixel_size`. A JSON object is parsed as a full spec.
pub fn parse_domain(text: &str) -> Result<DomainSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        let spec: DomainSpec = serde_json::from_str(text)?;
        spec.validate()?;
        return Ok(spec);
    }
    let (name, args) = match text.split_once(':') {
        Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a)),
        None => (text.to_ascii_lowercase(), None),
    };
    let spec = match (name.as_str(), args) {
        ("interval", None) => DomainSpec::Interval { length: 1.0 },
        ("interval", Some(a)) => DomainSpec::Interval {
            length: parse_numbers(a, 1, "interval")?[0],
        },
        ("square", None) => DomainSpec::Rectangle {
            width: 1.0,
            height: 1.0,
        },
        ("rectangle", Some(a)) => {
            let v = parse_numbers(a, 2, "rectangle")?;
            DomainSpec::Rectangle {
                width: v[0],
                height: v[1],
            }
        }
        ("cube", None) => DomainSpec::Box {
            width: 1.0,
            height: 1.0,
            depth: 1.0,
        },
        ("box", Some(a)) => {
            let v = parse_numbers(a, 3, "box")?;
            DomainSpec::Box {
                width: v[0],
                height: v[1],
                depth: v[2],
            }
        }
        ("disk", None) => DomainSpec::Disk { radius: 1.0 },
        ("disk", Some(a)) => DomainSpec::Disk {
            radius: parse_numbers(a, 1, "disk")?[0],
        },
        ("ball", None) => DomainSpec::Ball { radius: 1.0 },
        ("ball", Some(a)) => DomainSpec::Ball {
            radius: parse_numbers(a, 1, "ball")?[0],
        },
        ("annulus", None) => DomainSpec::Annulus {
            r_inner: 0.5,
            r_outer: 1.0,
        },
        ("annulus", Some(a)) => {
            let v = parse_numbers(a, 2, "annulus")?;
            DomainSpec::Annulus {
                r_inner: v[0],
                r_outer: v[1],
            }
        }
        ("ellipse", None) => DomainSpec::Ellipse {
            semi_a: 1.0,
            semi_b: 0.5,
        },
        ("ellipse", Some(a)) => {
            let v = parse_numbers(a, 2, "ellipse")?;
            DomainSpec::Ellipse {
                semi_a: v[0],
                semi_b: v[1],
            }
        }
        ("lshape", None) => DomainSpec::Lshape {
            arm: 1.0,
            thickness: 0.5,
        },
        ("lshape", Some(a)) => {
            let v = parse_numbers(a, 2, "lshape")?;
            DomainSpec::Lshape {
                arm: v[0],
                thickness: v[1],
            }
        }
        ("bitmap", Some(a)) => {
            let (path, size) = a
                .rsplit_once(',')
                .ok_or_else(|| Error::InvalidDomain("bitmap takes path,pixel_size".into()))?;
            let size = parse_numbers(size, 1, "bitmap")?[0];
            DomainSpec::Bitmap(Bitmap::from_pgm_path(path.trim(), size)?)
        }
        _ => return Err(Error::InvalidDomain(format!("unknown domain '{text}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

/// Parse `1/128` or a decimal.
pub fn parse_spacing(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || Error::InvalidSpacing(format!("cannot parse '{text}'"));
    let value = match text.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => text.parse().map_err(|_| bad())?,
    };
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidSpacing(format!(
            "h = {value} must be positive and finite"
        )));
    }
    Ok(value)
}

/// Comma-separated spacings, e.g. `1/32,1/64,1/128`.
pub fn parse_spacing_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_spacing).collect()
}

/// Write `prefix.json` and, when given, `prefix.csv`.
pub fn write_outputs(prefix: &Path, json: &impl Serialize, csv: Option<&str>) -> Result<()> {
    if let Some(parent) = prefix.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let with_ext = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(".");
        p.push(ext);
        PathBuf::from(p)
    };
    std::fs::write(with_ext("json"), serde_json::to_string_pretty(json)?)?;
    if let Some(csv) = csv {
        std::fs::write(with_ext("csv"), csv)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRun {
    pub spectrum: SpectrumExport,
    pub orthonormality_defect: f64,
    pub solves: usize,
    pub seconds: f64,
    #[serde(skip)]
    pub csv: String,
}

/// Solve for `k` (default 6) modes; optionally write CSV and JSON.
pub fn cmd_spectrum(config: &RunConfig) -> Result<SpectrumRun> {
    let start = Instant::now();
    let k = config.k.unwrap_or(DEFAULT_SPECTRUM_K);
    let s = convergence::solve_domain(&config.domain, config.h, k, DEFAULT_TOL)?;
    let mut csv = Vec::new();
    s.write_csv(&mut csv)?;
    let run = SpectrumRun {
        spectrum: s.to_export(&config.domain.label(), false),
        orthonormality_defect: s.orthonormality_defect(),
        solves: s.solves(),
        seconds: start.elapsed().as_secs_f64(),
        csv: String::from_utf8(csv).expect("csv is ascii"),
    };
    if let Some(prefix) = &config.output {
        write_outputs(prefix, &run, Some(&run.csv))?;
    }
    Ok(run)
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub check: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub domain: String,
    pub h: f64,
    pub nodes: usize,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub orthonormality_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub solve_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub spectrum: SpectrumSummary,
    /// Relative discretization allowance applied to every eigenvalue bound.
    pub slack: f64,
    pub convergence: Option<ConvergenceStudy>,
    pub reports: Vec<InequalityReport>,
    pub dichotomies: Vec<Dichotomy>,
    pub aggregates: Vec<DichotomyAggregates>,
    pub sigma: Vec<SigmaL>,
    pub analysis: Option<SpectralAnalysis>,
    pub skipped: Vec<Skipped>,
    pub timing: Timing,
    pub pass: bool,
}

impl RunReport {
    /// Every report, including both dichotomy branches and the aggregate orderings.
    pub fn all_reports(&self) -> Vec<&InequalityReport> {
        self.reports
            .iter()
            .chain(self.dichotomies.iter().flat_map(|d| [&d.branch1, &d.branch2]))
            .chain(self.aggregates.iter().map(|a| &a.report))
            .collect()
    }

    pub fn failures(&self) -> Vec<&InequalityReport> {
        let mut out: Vec<&InequalityReport> = self.reports.iter().filter(|r| !r.satisfied).collect();
        out.extend(self.aggregates.iter().map(|a| &a.report).filter(|r| !r.satisfied));
        for d in self.dichotomies.iter().filter(|d| !d.holds) {
            out.push(&d.branch2);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let owned: Vec<InequalityReport> = self.all_reports().into_iter().cloned().collect();
        bounds::reports_to_csv(&owned)
    }
}

fn consistency(name: &str, lhs: f64, rhs: f64) -> InequalityReport {
    InequalityReport::from_sides(name, lhs, rhs, Slack::Absolute(CONSISTENCY_SLACK))
}

fn route_agreement(name: &str, a: f64, b: f64, rel: f64) -> InequalityReport {
    let diff = (a - b).abs();
    InequalityReport::from_sides(name, diff, 0.0, Slack::Absolute(rel * (1.0 + a.abs())))
}

/// Run every applicable bound on one spectrum with `k ≥ n+2` modes.
///
/// Unless a slack is configured, the spectrum is solved at `4h`, `2h`, and
/// `h` and the allowance is ten times the worst Richardson error estimate.
pub fn cmd_check(config: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let n = config.dim();
    let k = config.k.unwrap_or(n + 2).max(n + 2);
    let mut skipped = Vec::new();

    let (spectrum, study, slack) = match config.slack {
        Some(s) => (
            convergence::solve_domain(&config.domain, config.h, k, DEFAULT_TOL)?,
            None,
            s,
        ),
        None => {
            let hs = [4.0 * config.h, 2.0 * config.h, config.h];
            match convergence::convergence_with_spectra(&config.domain, &hs, k, DEFAULT_TOL) {
                Ok((study, mut spectra)) => {
                    let slack = study.relative_allowance();
                    (spectra.pop().expect("three spectra"), Some(study), slack)
                }
                Err(Error::FeatureTooFine { .. }) | Err(Error::EmptyGrid) | Err(Error::InvalidSpacing(_)) => {
                    skipped.push(Skipped {
                        check: "convergence".into(),
                        reason: "coarser grids cannot resolve the domain; no discretization allowance".into(),
                    });
                    (
                        convergence::solve_domain(&config.domain, config.h, k, DEFAULT_TOL)?,
                        None,
                        0.0,
                    )
                }
                Err(e) => return Err(e),
            }
        }
    };
    let solve_seconds = start.elapsed().as_secs_f64();
    let sl = Slack::Relative(slack);
    let mut reports = Vec::new();

    if n == 2 {
        reports.push(bounds::check_ppw_ratio(&spectrum, sl)?);
        for c in SumConstant::ALL {
            reports.push(bounds::check_second_third_sum(&spectrum, c, sl)?);
        }
        reports.push(bounds::check_conditional_sum(&spectrum, sl)?);
    } else {
        skipped.push(Skipped {
            check: "planar ratio bounds".into(),
            reason: format!("defined for n = 2, domain has n = {n}"),
        });
    }
    reports.push(bounds::check_sum_bound(&spectrum, sl)?);
    reports.push(bounds::check_improved_sum_bound(&spectrum, sl)?);

    let indices: Vec<usize> = match config.i {
        Some(i) => {
            if i == 0 || i > n + 2 {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    min: 1,
                    max: n + 2,
                });
            }
            skipped.push(Skipped {
                check: "dichotomy".into(),
                reason: format!("restricted to i = {i} by configuration"),
            });
            vec![i]
        }
        None => (1..=n + 2).collect(),
    };
    let dichotomies = indices
        .iter()
        .map(|&i| bounds::check_ratio_dichotomy(&spectrum, i, sl))
        .collect::<Result<Vec<_>>>()?;

    let mut aggregates = Vec::new();
    let mut sigma = Vec::new();
    let analysis = {
        // exponent from σ_{n+1} unless overridden
        let t = match config.t {
            Some(t) => t,
            None => {
                let m = spectral::MomentData::compute(&spectrum)?;
                let c = spectral::overlap_coefficients(&m, &spectrum)?;
                let s = spectral::sigma_l(&spectrum, &c, n + 1)?;
                optimal_exponent(s.value, spectrum.lambda(1))
            }
        };
        spectral::analyze(&spectrum, t)?
    };
    let coeffs = &analysis.coefficients;

    for &i in &indices {
        if i == 1 {
            skipped.push(Skipped {
                check: format!("coordinate_bound(k={}, l=0)", n + 1),
                reason: "l = i - 1 = 0 has no sigma".into(),
            });
        } else {
            reports.push(bounds::check_coordinate_bound(&spectrum, coeffs, n + 1, i - 1, sl)?);
            sigma.push(spectral::sigma_l(&spectrum, coeffs, i - 1)?);
        }
        let agg = bounds::dichotomy_aggregates(&spectrum, coeffs, i, sl)?;
        reports.push(route_agreement(
            &format!("aggregate_b_routes[i={i}]"),
            agg.b_direct,
            agg.b_layered,
            1e-10,
        ));
        if let Some(cs) = agg.c_sigma {
            reports.push(route_agreement(
                &format!("aggregate_c_routes[i={i}]"),
                agg.c_formula,
                cs,
                1e-10,
            ));
        }
        aggregates.push(agg);
    }
    if let Some(l) = config.l {
        if l < spectrum.len() && l >= 1 {
            reports.push(bounds::check_coordinate_bound(&spectrum, coeffs, n + 1, l, sl)?);
        } else {
            skipped.push(Skipped {
                check: format!("coordinate_bound(k={}, l={l})", n + 1),
                reason: format!("l must lie in 1..={}", spectrum.len() - 1),
            });
        }
    }

    reports.push(InequalityReport::from_sides(
        "triangularity",
        coeffs.triangular_max,
        spectral::TRIANGULAR_LIMIT,
        Slack::NONE,
    ));
    let max_sum = analysis.sum_rule.partial.iter().cloned().fold(0.0, f64::max);
    let mut sum_rule = consistency("sum_rule", max_sum, 1.0);
    if !analysis.sum_rule.monotone {
        sum_rule.satisfied = false;
        sum_rule.notes.push("partial sums decrease".into());
    }
    reports.push(sum_rule);
    reports.push(consistency("truncated_norm", analysis.truncated_norm_excess, 0.0));
    reports.push(consistency("parseval", analysis.parseval_excess, 0.0));
    reports.push(consistency(
        "inverse_norm",
        analysis.inverse_norm.0,
        analysis.inverse_norm.1,
    ));
    match (
        analysis.weighted_power_max,
        analysis.normalized_power_max,
        analysis.mixed_max,
    ) {
        (Some(w), Some(nm), Some(mx)) => {
            reports.push(consistency("weighted_power", w, 1.0));
            reports.push(consistency("normalized_power", nm, 1.0));
            reports.push(consistency("mixed_coefficients", mx, 1.0));
        }
        _ => skipped.push(Skipped {
            check: "power coefficient bounds".into(),
            reason: "normalized power coefficients are undefined at t = 1".into(),
        }),
    }

    let mut report = RunReport {
        config: config.clone(),
        spectrum: SpectrumSummary {
            domain: config.domain.label(),
            h: config.h,
            nodes: spectrum.grid().node_count(),
            values: spectrum.values().to_vec(),
            residuals: spectrum.residuals().to_vec(),
            orthonormality_defect: spectrum.orthonormality_defect(),
        },
        slack,
        convergence: study,
        reports,
        dichotomies,
        aggregates,
        sigma,
        analysis: Some(analysis),
        skipped,
        timing: Timing {
            solve_seconds,
            total_seconds: 0.0,
        },
        pass: false,
    };
    report.pass = report.failures().is_empty();
    report.timing.total_seconds = start.elapsed().as_secs_f64();
    if let Some(prefix) = &config.output {
        write_outputs(prefix, &report, Some(&report.to_csv()))?;
    }
    Ok(report)
}

/// Randomized identity trials.
pub fn cmd_identities(seed: u64, trials: usize, m_max: usize) -> Result<TrialSummary> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    identities::run_trials(seed, trials, m_max)
}

/// Three or more halving spacings on one domain.
pub fn cmd_convergence(domain: &DomainSpec, spacings: &[f64], k: usize) -> Result<ConvergenceStudy> {
    convergence::convergence_study(domain, spacings, k, DEFAULT_TOL)
}

/// Closed-form spectrum for the separable and radial kinds.
pub fn cmd_oracle(domain: &DomainSpec, k: usize) -> Result<OracleSpectrum> {
    domain.validate()?;
    match *domain {
        DomainSpec::Interval { length } => Ok(oracle::interval_spectrum(length, k)),
        DomainSpec::Rectangle { width, height } => Ok(oracle::rectangle_spectrum(width, height, k)),
        DomainSpec::Box { width, height, depth } => Ok(oracle::box_spectrum(width, height, depth, k)),
        DomainSpec::Disk { radius } => oracle::disk_spectrum(radius, k),
        DomainSpec::Ball { radius } => oracle::ball_spectrum(radius, k),
        _ => Err(Error::Precondition(format!(
            "no closed-form spectrum for {}",
            domain.label()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_names() {
        assert_eq!(
            parse_domain("square").unwrap(),
            DomainSpec::Rectangle {
                width: 1.0,
                height: 1.0
            }
        );
        assert_eq!(
            parse_domain("annulus").unwrap(),
            DomainSpec::Annulus {
                r_inner: 0.5,
                r_outer: 1.0
            }
        );
        assert_eq!(
            parse_domain("lshape").unwrap(),
            DomainSpec::Lshape {
                arm: 1.0,
                thickness: 0.5
            }
        );
        assert_eq!(
            parse_domain("rectangle:2,1").unwrap(),
            DomainSpec::Rectangle {
                width: 2.0,
                height: 1.0
            }
        );
        assert_eq!(
            parse_domain(r#"{"kind":"disk","radius":2.0}"#).unwrap(),
            DomainSpec::Disk { radius: 2.0 }
        );
        assert!(parse_domain("hexagon").is_err());
        assert!(parse_domain("rectangle:2").is_err());
        assert!(parse_domain("annulus:1,0.5").is_err());
    }

    #[test]
    fn spacings() {
        assert_eq!(parse_spacing("1/128").unwrap(), 1.0 / 128.0);
        assert_eq!(parse_spacing("0.25").unwrap(), 0.25);
        assert!(parse_spacing("-1/4").is_err());
        assert!(parse_spacing("0").is_err());
        assert!(parse_spacing("x").is_err());
        assert_eq!(parse_spacing_list("1/8,1/16").unwrap(), vec![0.125, 0.0625]);
    }

    #[test]
    fn config_round_trip() {
        let mut c = RunConfig::new(DomainSpec::Disk { radius: 1.0 }, 1.0 / 64.0);
        c.k = Some(5);
        c.t = Some(1.5);
        let back = RunConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        let minimal = RunConfig::from_json(r#"{"domain":{"kind":"interval","length":1.0},"h":0.125}"#).unwrap();
        assert_eq!(minimal.seed, DEFAULT_SEED);
        assert_eq!(RunConfig::from_json(&minimal.to_json().unwrap()).unwrap(), minimal);
    }

    #[test]
    fn square_check_passes() {
        let c = RunConfig::new(
            DomainSpec::Rectangle {
                width: 1.0,
                height: 1.0,
            },
            1.0 / 32.0,
        );
        let r = cmd_check(&c).unwrap();
        assert!(r.pass, "{:?}", r.failures());
        assert_eq!(r.dichotomies.len(), 4);
        assert!(r.dichotomies.iter().all(|d| d.holds));
        assert!(r.skipped.iter().any(|s| s.check.contains("l=0")));
        assert!(r.slack > 0.0 && r.slack < 0.05);
        assert!(r.to_csv().lines().count() > 10);
    }

    #[test]
    fn interval_check_skips_planar_bounds() {
        let mut c = RunConfig::new(DomainSpec::Interval { length: 1.0 }, 1.0 / 64.0);
        c.slack = Some(0.0);
        let r = cmd_check(&c).unwrap();
        assert!(r.pass, "{:?}", r.failures());
        assert!(r.skipped.iter().any(|s| s.check == "planar ratio bounds"));
        assert!(r.convergence.is_none());
    }

    #[test]
    fn spectrum_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::new(
            DomainSpec::Rectangle {
                width: 1.0,
                height: 1.0,
            },
            1.0 / 16.0,
        );
        c.k = Some(3);
        c.output = Some(dir.path().join("out/square"));
        let run = cmd_spectrum(&c).unwrap();
        assert_eq!(run.csv.lines().count(), 4);
        let json = std::fs::read_to_string(dir.path().join("out/square.json")).unwrap();
        assert!(json.contains("\"eigenvalues\""));
        assert!(dir.path().join("out/square.csv").exists());
    }

    #[test]
    fn oracle_dispatch() {
        let o = cmd_oracle(
            &DomainSpec::Rectangle {
                width: 1.0,
                height: 1.0,
            },
            3,
        )
        .unwrap();
        assert_eq!(o.len(), 3);
        assert!(cmd_oracle(
            &DomainSpec::Lshape {
                arm: 1.0,
                thickness: 0.5
            },
            3
        )
        .is_err());
    }

    #[test]
    fn identities_command() {
        assert!(cmd_identities(1, 0, 6).is_err());
        assert!(cmd_identities(1, 1, 6).unwrap().pass);
    }
}
