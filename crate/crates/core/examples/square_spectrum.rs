//! Lowest eigenvalues of the unit square against the closed form.
//!
//! `cargo run --release --example square_spectrum`

use std::sync::Arc;

use speclab::oracle::rectangle_spectrum;
use speclab::{assemble_laplacian, rasterize, smallest_k, DomainSpec};

fn main() -> speclab::Result<()> {
    let spec = DomainSpec::Rectangle {
        width: 1.0,
        height: 1.0,
    };
    let grid = rasterize(&spec, 1.0 / 128.0)?;
    let matrix = assemble_laplacian(&grid);
    println!("{} interior nodes, {} nonzeros", grid.node_count(), matrix.nnz());

    let spectrum = smallest_k(&matrix, Arc::new(grid), 6, 1e-9)?;
    let exact = rectangle_spectrum(1.0, 1.0, 6);
    println!(
        "{:>3} {:>16} {:>16} {:>10} {:>10}",
        "j", "computed", "exact", "rel err", "residual"
    );
    for j in 1..=spectrum.len() {
        let (v, e) = (spectrum.lambda(j), exact.values[j - 1]);
        println!(
            "{j:>3} {v:>16.10} {e:>16.10} {:>10.2e} {:>10.2e}",
            (v - e).abs() / e,
            spectrum.residuals()[j - 1]
        );
    }
    println!("clusters: {:?}", spectrum.clusters());
    println!("lambda2/lambda1 = {:.6}", spectrum.lambda(2) / spectrum.lambda(1));
    Ok(())
}
