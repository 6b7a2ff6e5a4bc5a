//! Rotating coordinates so that the first-moment matrix becomes upper
//! triangular, then reading off the overlap coefficients and sum rule.

use speclab::convergence::solve_domain;
use speclab::spectral::{overlap_coefficients, sum_rule, MomentData};
use speclab::DomainSpec;

fn main() -> speclab::Result<()> {
    // the L-shape has no axis of symmetry along x or y, so Q is a genuine rotation
    let spec = DomainSpec::Lshape {
        arm: 1.0,
        thickness: 0.5,
    };
    let s = solve_domain(&spec, 1.0 / 64.0, 12, 1e-9)?;
    let md = MomentData::compute(&s)?;

    println!("moment matrix A (rows = coordinates, columns = modes 2..):");
    for row in &md.a {
        println!(
            "  {}",
            row.iter().map(|v| format!("{v:>9.5}")).collect::<Vec<_>>().join(" ")
        );
    }
    println!("rotation Q = {:?}", md.q);
    println!(
        "|Q^T Q - I| = {:.2e}, forbidden entries of R = {:.2e}",
        md.orthogonality_defect(),
        md.triangular_defect()
    );
    println!("weighted centers y0 = {:?}", md.offsets);

    let c = overlap_coefficients(&md, &s)?;
    println!("max |a_(alpha j)| for j <= alpha: {:.2e}", c.triangular_max);
    for alpha in 1..=c.dim() {
        println!("  alpha = {alpha}: cluster weights");
        for (range, w) in c.cluster_weights(&s, alpha) {
            if w > 1e-8 {
                println!("    modes {range:?}: {w:.6}");
            }
        }
    }
    let rule = sum_rule(&c, s.len())?;
    println!("sum rule partial sums {:?} (monotone: {})", rule.partial, rule.monotone);
    Ok(())
}
