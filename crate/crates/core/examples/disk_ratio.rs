//! Ratio of the first two disk eigenvalues and its convergence under
//! refinement. The staircase boundary limits the rate below second order.

use speclab::bounds::{check_ppw_ratio, Slack};
use speclab::convergence::convergence_study;
use speclab::oracle::bessel_zero;
use speclab::DomainSpec;

fn main() -> speclab::Result<()> {
    let disk = DomainSpec::Disk { radius: 1.0 };
    let exact = (bessel_zero(1, 1)? / bessel_zero(0, 1)?).powi(2);

    let study = convergence_study(&disk, &[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0], 3, 1e-9)?;
    for row in &study.rows {
        println!(
            "h = 1/{:<4} N = {:<6} lambda1 = {:.6}  ratio = {:.6}",
            (1.0 / row.h).round(),
            row.nodes,
            row.values[0],
            row.values[1] / row.values[0]
        );
    }
    for m in &study.modes {
        println!(
            "mode {}: extrapolated {:.6}, order {:?}",
            m.index,
            m.extrapolated,
            m.order.map(|p| (p * 100.0).round() / 100.0)
        );
    }
    println!("exact ratio j11^2/j01^2 = {exact:.6}");

    let fine = speclab::convergence::solve_domain(&disk, 1.0 / 128.0, 2, 1e-9)?;
    let report = check_ppw_ratio(&fine, Slack::Relative(study.relative_allowance()))?;
    println!(
        "lambda2/lambda1 <= 3: lhs {:.6}, margin {:.4}, satisfied {}",
        report.lhs, report.margin, report.satisfied
    );
    Ok(())
}
