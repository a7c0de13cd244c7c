//! Generalized eigenvalues of every interface problem. Each high-contrast
//! channel crossing an interface contributes one eigenvalue of order 1/contrast.
//!
//! cargo run --release --example interface_spectrum

use hemdd::experiment::{benchmark_field, Benchmark};
use hemdd::prelude::*;

fn main() -> hemdd::Result<()> {
    let (n, hc) = (64, 16);
    for contrast in [1.0, 1e3, 1e6] {
        let mesh = Mesh::structured(n)?;
        let incs = benchmark_field(&Benchmark::channels(3, true).with_reach(4), n, hc, contrast)?;
        let field = CoefficientField::from_inclusions(&mesh, 1.0, &incs)?;
        let problem = Problem::new(mesh, field, hc)?;
        println!("contrast {contrast:e}");
        for (g, s) in problem.partition.interfaces().iter().zip(&problem.spectra).take(4) {
            let head: Vec<String> = s.eigenvalues.iter().take(5).map(|l| format!("{l:.2e}")).collect();
            let small = s.eigenvalues.iter().filter(|&&l| l < 1.0 / 32.0).count();
            println!("  interface {:>2} {:?}: {} below 1/32, lowest {}", g.id, g.orientation, small, head.join(" "));
        }
    }
    Ok(())
}
