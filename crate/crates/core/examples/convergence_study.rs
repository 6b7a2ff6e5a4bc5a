//! Grid refinement on the square, disk, and L-shape with Richardson
//! extrapolation and observed order. Set SPECLAB_THREADS to cap workers.

use speclab::convergence::convergence_study;
use speclab::DomainSpec;

fn main() -> speclab::Result<()> {
    let spacings = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    for spec in [
        DomainSpec::Rectangle {
            width: 1.0,
            height: 1.0,
        },
        DomainSpec::Disk { radius: 1.0 },
        DomainSpec::Lshape {
            arm: 1.0,
            thickness: 0.5,
        },
    ] {
        let study = convergence_study(&spec, &spacings, 4, 1e-9)?;
        println!("\n{}", study.domain);
        print!("{}", study.to_csv());
        for m in &study.modes {
            println!(
                "  mode {}: ratio {:>7.3}, order {:>5}, error estimate {:.2e}",
                m.index,
                m.ratio,
                m.order.map_or("-".into(), |p| format!("{p:.2}")),
                m.error_estimate
            );
        }
        println!("  allowance for bound checks: {:.2e}", study.relative_allowance());
    }
    Ok(())
}
