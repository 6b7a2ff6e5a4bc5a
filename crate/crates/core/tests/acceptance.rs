//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance`. Exits nonzero if any
//! criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use speclab::bounds::{self, Slack, SumConstant};
use speclab::convergence::{convergence_study, solve_domain};
use speclab::identities::run_trials;
use speclab::oracle::interval_overlap_oracle;
use speclab::report::{cmd_check, RunConfig, RunReport};
use speclab::spectral::{self, MomentData};
use speclab::{assemble_laplacian, rasterize, residual, smallest_k, DomainSpec, Spectrum};

const TOL: f64 = 1e-10;

// tabulated Bessel zeros j_{0,1} and j_{1,1}
const J01: f64 = 2.404_825_557_695_773;
const J11: f64 = 3.831_705_970_207_512;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn square() -> DomainSpec {
    DomainSpec::Rectangle {
        width: 1.0,
        height: 1.0,
    }
}

fn disk() -> DomainSpec {
    DomainSpec::Disk { radius: 1.0 }
}

fn solve(spec: &DomainSpec, h: f64, k: usize) -> Spectrum {
    solve_domain(spec, h, k, TOL).expect("solve")
}

fn square_spectrum(sq: &Spectrum, elapsed: f64) -> Outcome {
    let exact = 2.0 * PI * PI;
    let l1 = rel(sq.lambda(1), exact);
    let ratio = sq.lambda(2) / sq.lambda(1);
    let t = Instant::now();
    let study = convergence_study(&square(), &[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0], 6, TOL).expect("study");
    let extrap = rel(study.modes[0].extrapolated, exact);
    let runtime = elapsed + t.elapsed().as_secs_f64();
    outcome(
        l1 <= 5e-3 && rel(ratio, 2.5) <= 5e-3 && extrap <= 2e-4 && runtime <= 60.0,
        format!(
            "lambda1 err {:.3e}, ratio {ratio:.6}, extrapolated err {extrap:.3e}, {runtime:.1} s",
            l1
        ),
    )
}

fn disk_ratio(dk: &Spectrum) -> Outcome {
    let ratio = dk.lambda(2) / dk.lambda(1);
    let ppw = bounds::check_ppw_ratio(dk, Slack::NONE).expect("ppw");
    outcome(
        rel(ratio, 2.539) <= 1e-2 && ppw.satisfied && ppw.margin >= 0.4,
        format!("ratio {ratio:.6}, margin {:.4}", ppw.margin),
    )
}

fn second_third_sum(sq: &Spectrum, dk: &Spectrum) -> Outcome {
    let s = (sq.lambda(2) + sq.lambda(3)) / sq.lambda(1);
    let all = SumConstant::ALL
        .iter()
        .all(|&c| bounds::check_second_third_sum(sq, c, Slack::NONE).is_ok_and(|r| r.satisfied));
    let d = (dk.lambda(2) + dk.lambda(3)) / dk.lambda(1);
    let oracle = 2.0 * J11 * J11 / (J01 * J01);
    outcome(
        rel(s, 5.0) <= 5e-3 && all && rel(d, oracle) <= 1e-2,
        format!("square {s:.6} (all constants {all}), disk {d:.6} vs {oracle:.6}"),
    )
}

fn check_runs() -> Vec<(String, RunReport)> {
    let cases = [
        ("square", square(), 1.0 / 128.0),
        ("disk", disk(), 1.0 / 128.0),
        (
            "annulus",
            DomainSpec::Annulus {
                r_inner: 0.5,
                r_outer: 1.0,
            },
            1.0 / 128.0,
        ),
        (
            "lshape",
            DomainSpec::Lshape {
                arm: 1.0,
                thickness: 0.5,
            },
            1.0 / 128.0,
        ),
        (
            "cube",
            DomainSpec::Box {
                width: 1.0,
                height: 1.0,
                depth: 1.0,
            },
            1.0 / 24.0,
        ),
        ("interval", DomainSpec::Interval { length: 1.0 }, 1.0 / 512.0),
    ];
    cases
        .into_iter()
        .map(|(name, spec, h)| {
            let mut c = RunConfig::new(spec, h);
            c.k = Some(12);
            (name.to_string(), cmd_check(&c).expect("check"))
        })
        .collect()
}

fn dichotomy(runs: &[(String, RunReport)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, r) in runs.iter().filter(|(n, _)| n != "interval") {
        let n = r.config.dim();
        let ok = r.dichotomies.len() == n + 2 && r.dichotomies.iter().all(|d| d.holds);
        pass &= ok;
        parts.push(format!(
            "{name} {} (slack {:.2e})",
            if ok { "ok" } else { "FAIL" },
            r.slack
        ));
    }
    outcome(pass, parts.join(", "))
}

fn coordinate_bound(sq: &Spectrum, dk: &Spectrum) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, s) in [("square", sq), ("disk", dk)] {
        let m = MomentData::compute(s).expect("moments");
        let c = spectral::overlap_coefficients(&m, s).expect("coefficients");
        for l in [1, 2] {
            let r = bounds::check_coordinate_bound(s, &c, 3, l, Slack::NONE).expect("bound");
            pass &= r.satisfied && r.margin > 0.0;
            parts.push(format!("{name}(3,{l}) margin {:.4}", r.margin));
            if l == 1 {
                let closed = 3.0 * s.lambda(1) + s.lambda(1).powi(2) / s.lambda(2);
                let e = rel(r.rhs, closed);
                pass &= e <= 1e-10;
                parts.push(format!("rhs err {e:.1e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn sum_rule() -> Outcome {
    let mut analytic = 0.0;
    let mut last = 0.0;
    let mut monotone = true;
    for j in (2..=30).step_by(2) {
        let a = interval_overlap_oracle(j).expect("oracle");
        analytic += ((j * j) as f64 - 1.0) * PI * PI * a * a;
        monotone &= analytic >= last;
        last = analytic;
    }
    let sq = solve(&square(), 1.0 / 64.0, 40);
    let m = MomentData::compute(&sq).expect("moments");
    let c = spectral::overlap_coefficients(&m, &sq).expect("coefficients");
    let rule = spectral::sum_rule(&c, 40).expect("sum rule");
    let in_range = rule.partial.iter().all(|&s| (0.99..=1.0).contains(&s));
    outcome(
        (0.999..=1.0).contains(&analytic) && monotone && in_range && rule.monotone,
        format!(
            "interval {analytic:.6}, square {:?}, monotone {}",
            rule.partial,
            monotone && rule.monotone
        ),
    )
}

fn identity_suite() -> Outcome {
    let t = Instant::now();
    let s = run_trials(20240601, 10_000, 6).expect("trials");
    let secs = t.elapsed().as_secs_f64();
    outcome(
        s.pass && s.worst.worst() <= 1e-10 && s.worst.tail_vanishes && secs <= 30.0,
        format!(
            "{} trials, worst {:.2e}, tail zero {}, {secs:.2} s",
            s.trials,
            s.worst.worst(),
            s.worst.tail_vanishes
        ),
    )
}

fn power_moments() -> Outcome {
    let s = solve(&DomainSpec::Interval { length: 1.0 }, 1.0 / 512.0, 30);
    let p = spectral::power_moments(&s, 2.0).expect("power moments");
    let (direct, expanded) = p.energy_routes(&s);
    let target = PI * PI / 2.0;
    // ∫u⁴ / (∫u³)² for u = √2 sin πx
    let b_exact = 1.5 / (128.0 / (9.0 * PI * PI));
    let partials = p.normalized_partials(&s).expect("partials");
    let below = partials.windows(2).all(|w| w[1] >= w[0]) && partials.iter().all(|&v| v <= 1.0);
    let last = *partials.last().expect("partials");
    outcome(
        rel(direct, target) <= 5e-3
            && rel(expanded, target) <= 5e-3
            && rel(p.b_of_t, 1.0409) <= 5e-3
            && rel(p.b_of_t, b_exact) <= 5e-3
            && below
            && last >= 0.99,
        format!(
            "routes {direct:.6} / {expanded:.6} vs {target:.6}, B(2) {:.6}, last partial {last:.6}",
            p.b_of_t
        ),
    )
}

fn consistency(runs: &[(String, RunReport)]) -> Outcome {
    const NAMES: [&str; 5] = [
        "truncated_norm",
        "weighted_power",
        "inverse_norm",
        "mixed_coefficients",
        "parseval",
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, r) in runs {
        let tri = r
            .analysis
            .as_ref()
            .map_or(f64::INFINITY, |a| a.coefficients.triangular_max);
        if name == "square" || name == "disk" {
            pass &= tri <= 1e-4;
        }
        let found: Vec<_> = r.reports.iter().filter(|x| NAMES.contains(&x.name.as_str())).collect();
        let ok = found.len() == NAMES.len() && found.iter().all(|x| x.satisfied);
        pass &= ok;
        parts.push(format!("{name} {} (tri {tri:.1e})", if ok { "ok" } else { "FAIL" }));
    }
    outcome(pass, parts.join(", "))
}

fn dense(spec: &DomainSpec, h: f64) -> Result<String, String> {
    let grid = rasterize(spec, h).map_err(|e| e.to_string())?;
    let n = grid.node_count();
    let m = assemble_laplacian(&grid);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for (j, v) in m.row(i) {
            d[(i, j)] = v;
        }
    }
    let mut exact: Vec<f64> = SymmetricEigen::new(d).eigenvalues.iter().copied().collect();
    exact.sort_by(f64::total_cmp);
    let k = n.min(12);
    let s = smallest_k(&m, Arc::new(grid), k, 1e-9).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for j in 0..k {
        let e = rel(s.values()[j], exact[j]);
        let r = residual(&m, s.values()[j], &s.functions()[j]).map_err(|e| e.to_string())?;
        if e > 1e-10 || r > 1e-8 * s.values()[j] {
            return Err(format!(
                "{} N={n} mode {} err {e:.1e} residual {r:.1e}",
                spec.label(),
                j + 1
            ));
        }
        worst = worst.max(e);
    }
    Ok(format!("N={n} {worst:.0e}"))
}

fn dense_equivalence() -> Outcome {
    let cases = [
        (DomainSpec::Interval { length: 1.0 }, 1.0 / 128.0),
        (square(), 1.0 / 20.0),
        (disk(), 1.0 / 10.0),
        (
            DomainSpec::Annulus {
                r_inner: 0.5,
                r_outer: 1.0,
            },
            1.0 / 10.0,
        ),
        (
            DomainSpec::Lshape {
                arm: 1.0,
                thickness: 0.5,
            },
            1.0 / 16.0,
        ),
        (
            DomainSpec::Ellipse {
                semi_a: 1.0,
                semi_b: 0.5,
            },
            1.0 / 12.0,
        ),
        (
            DomainSpec::Box {
                width: 1.0,
                height: 1.0,
                depth: 1.0,
            },
            1.0 / 8.0,
        ),
        (DomainSpec::Ball { radius: 1.0 }, 1.0 / 4.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (spec, h) in cases {
        match dense(&spec, h) {
            Ok(s) => parts.push(s),
            Err(s) => {
                pass = false;
                parts.push(s);
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn main() {
    let t = Instant::now();
    let sq = solve(&square(), 1.0 / 128.0, 6);
    let sq_secs = t.elapsed().as_secs_f64();
    let dk = solve(&disk(), 1.0 / 128.0, 6);
    let runs = check_runs();

    let results = [
        ("square spectrum", square_spectrum(&sq, sq_secs)),
        ("disk ratio", disk_ratio(&dk)),
        ("second plus third sum", second_third_sum(&sq, &dk)),
        ("ratio dichotomy", dichotomy(&runs)),
        ("coordinate bound", coordinate_bound(&sq, &dk)),
        ("sum rule", sum_rule()),
        ("identity suite", identity_suite()),
        ("power moments", power_moments()),
        ("pipeline consistency", consistency(&runs)),
        ("dense equivalence", dense_equivalence()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria pass ({:.1} s)",
        results.len() - failed,
        results.len(),
        t.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
