//! Randomized two-route checks of the algebraic identities behind the
//! dichotomy, plus one instance built from a computed spectrum.

use speclab::convergence::solve_domain;
use speclab::identities::{evaluate, run_trials, IdentityInstance};
use speclab::spectral::analyze;
use speclab::DomainSpec;

fn main() -> speclab::Result<()> {
    let start = std::time::Instant::now();
    let summary = run_trials(20_240_601, 10_000, 6)?;
    println!(
        "{} trials ({} draws rejected), worst errors: layered {:.1e}, recursion {:.1e}, regrouped {:.1e}, partial {:.1e}",
        summary.trials,
        summary.skipped,
        summary.worst.layered,
        summary.worst.recursion,
        summary.worst.regrouped,
        summary.worst.partial
    );
    println!("tail term vanished exactly every time: {}", summary.worst.tail_vanishes);
    println!("elapsed {:.2}s, pass {}", start.elapsed().as_secs_f64(), summary.pass);

    let s = solve_domain(&DomainSpec::Disk { radius: 1.0 }, 1.0 / 48.0, 6, 1e-9)?;
    let an = analyze(&s, 1.5)?;
    let inst = IdentityInstance::from_spectrum(&an.coefficients, 2)?;
    let e = evaluate(&inst);
    println!("\ndisk instance: worst error {:.1e}", e.worst());
    println!("  smallest bracket {:.6}", inst.min_bracket());
    println!("  chain excess     {:.2e}", inst.chain_excess());
    for j in 1..=inst.m() {
        println!("  F_{j} = {:.8}  G_{j} = {:.8}", inst.tail(j), inst.layer(j));
    }
    Ok(())
}
