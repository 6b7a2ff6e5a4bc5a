//! Bessel zeros and the exact disk and ball spectra used as references.

use speclab::oracle::{ball_spectrum, bessel_j, bessel_zero, disk_spectrum, spherical_bessel_zero};

fn main() -> speclab::Result<()> {
    println!("zeros j_(m,s):");
    for m in 0..4 {
        let z: Vec<String> = (1..=4)
            .map(|s| bessel_zero(m, s).map(|v| format!("{v:.10}")))
            .collect::<Result<_, _>>()?;
        println!("  m = {m}: {}", z.join("  "));
    }
    println!("spherical zeros z_(l,s):");
    for l in 0..3 {
        let z: Vec<String> = (1..=3)
            .map(|s| spherical_bessel_zero(l, s).map(|v| format!("{v:.10}")))
            .collect::<Result<_, _>>()?;
        println!("  l = {l}: {}", z.join("  "));
    }
    println!("J_0 at its first zero: {:.2e}", bessel_j(0, bessel_zero(0, 1)?));

    let disk = disk_spectrum(1.0, 8)?;
    println!("\nunit disk:");
    for (v, label) in disk.values.iter().zip(&disk.labels) {
        println!("  {v:>12.6}  {label:?}");
    }
    println!("  lambda2/lambda1 = {:.6}", disk.values[1] / disk.values[0]);
    println!(
        "  (lambda2+lambda3)/lambda1 = {:.6}",
        (disk.values[1] + disk.values[2]) / disk.values[0]
    );

    let ball = ball_spectrum(1.0, 5)?;
    println!("\nunit ball: {:?}", ball.values);
    Ok(())
}
