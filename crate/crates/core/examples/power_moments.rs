//! Moments of powers of the ground state on the unit interval, checked
//! against closed forms for t = 2.

use std::f64::consts::PI;

use speclab::convergence::solve_domain;
use speclab::spectral::{analyze, optimal_exponent, power_moments, sigma_l};
use speclab::DomainSpec;

fn main() -> speclab::Result<()> {
    let s = solve_domain(&DomainSpec::Interval { length: 1.0 }, 1.0 / 512.0, 30, 1e-9)?;
    let pm = power_moments(&s, 2.0)?;
    let (energy, sum) = pm.energy_routes(&s);
    println!("t = 2");
    println!("  energy by quadrature  {energy:.8}");
    println!("  energy by mode sum    {sum:.8}");
    println!("  closed form pi^2/2    {:.8}", PI * PI / 2.0);
    println!(
        "  B(2) = {:.6} (from beta_1: {:.6})",
        pm.b_of_t,
        pm.b_from_leading(s.lambda(1))?
    );
    let partial = pm.normalized_partials(&s)?;
    for k in [1, 3, 5, 11, 21, 29] {
        println!("  normalized partial through j = {k:>2}: {:.8}", partial[k - 1]);
    }

    let an = analyze(&s, 2.0)?;
    for l in 1..=4 {
        let sig = sigma_l(&s, &an.coefficients, l)?;
        println!(
            "sigma_{l} = {:.6}, optimal t = {:.6}",
            sig.value,
            optimal_exponent(sig.value, s.lambda(1))
        );
    }
    Ok(())
}
