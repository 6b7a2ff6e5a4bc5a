//! Eigenvalues of a domain given as a PGM occupancy image. The image here
//! is drawn in memory (a square with a notch), written out, and read back.

use speclab::bounds::{check_improved_sum_bound, check_ppw_ratio, Slack};
use speclab::convergence::solve_domain;
use speclab::{Bitmap, DomainSpec};

fn main() -> speclab::Result<()> {
    let (w, hgt) = (60, 60);
    let pixel = 1.0 / 60.0;
    let mut interior = vec![false; w * hgt];
    for row in 2..hgt - 2 {
        for col in 2..w - 2 {
            let notch = col > 25 && col < 35 && row > 30;
            interior[row * w + col] = !notch;
        }
    }
    let bitmap = Bitmap::new(w, hgt, pixel, interior)?;
    let path = std::env::temp_dir().join("speclab_notch.pgm");
    std::fs::write(&path, bitmap.to_pgm_bytes())?;
    let spec = DomainSpec::Bitmap(Bitmap::from_pgm_path(&path, pixel)?);

    let s = solve_domain(&spec, pixel, 4, 1e-9)?;
    println!("{} nodes, area {:.4}", s.grid().node_count(), s.grid().measure());
    for j in 1..=s.len() {
        println!("  lambda_{j} = {:.6}", s.lambda(j));
    }
    for r in [
        check_ppw_ratio(&s, Slack::NONE)?,
        check_improved_sum_bound(&s, Slack::NONE)?,
    ] {
        println!("{}: {:.5} <= {:.5} ({})", r.name, r.lhs, r.rhs, r.satisfied);
    }
    Ok(())
}
