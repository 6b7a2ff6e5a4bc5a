//! Every ratio bound on several domains, with the discretization allowance
//! taken from a three-grid refinement study.
//!
//! `cargo run --release --example bound_catalog -- 1/64`

use speclab::report::{cmd_check, parse_spacing, RunConfig};
use speclab::DomainSpec;

fn main() -> speclab::Result<()> {
    let h = match std::env::args().nth(1) {
        Some(s) => parse_spacing(&s)?,
        None => 1.0 / 64.0,
    };
    let domains = [
        DomainSpec::Rectangle {
            width: 1.0,
            height: 1.0,
        },
        DomainSpec::Disk { radius: 1.0 },
        DomainSpec::Annulus {
            r_inner: 0.5,
            r_outer: 1.0,
        },
        DomainSpec::Lshape {
            arm: 1.0,
            thickness: 0.5,
        },
        DomainSpec::Ellipse {
            semi_a: 1.0,
            semi_b: 0.5,
        },
    ];
    for spec in domains {
        let report = cmd_check(&RunConfig::new(spec, h))?;
        println!(
            "\n{}  (N = {}, slack {:.2e}, {:.2}s)",
            report.spectrum.domain, report.spectrum.nodes, report.slack, report.timing.total_seconds
        );
        for r in report.all_reports() {
            if r.name.starts_with("dichotomy_ratio") || r.name.starts_with("aggregate_") {
                continue;
            }
            let cond = match r.condition_met {
                Some(false) => " (condition not met)",
                _ => "",
            };
            println!(
                "  {:<34} {:>12.6} <= {:<12.6} {}{cond}",
                r.name,
                r.lhs,
                r.rhs,
                if r.satisfied { "ok" } else { "FAIL" }
            );
        }
        let holds = report.dichotomies.iter().all(|d| d.holds);
        println!("  dichotomy holds for i = 1..={}: {holds}", report.dichotomies.len());
        for s in &report.skipped {
            println!("  skipped {}: {}", s.check, s.reason);
        }
    }
    Ok(())
}
