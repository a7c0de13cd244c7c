//! Threshold-based enrichment: count the eigenfunctions picked per interface.
//!
//! cargo run --release --example adaptive_enrichment

use hemdd::experiment::{benchmark_field, Benchmark};
use hemdd::prelude::*;

fn main() -> hemdd::Result<()> {
    let (n, hc) = (64, 16);
    let mesh = Mesh::structured(n)?;
    let incs = benchmark_field(&Benchmark::channels(3, true).with_reach(4), n, hc, 1e6)?;
    let field = CoefficientField::from_inclusions(&mesh, 1.0, &incs)?;
    let problem = Problem::new(mesh, field, hc)?;
    let overlap = problem.partition.extend_overlap(&problem.mesh, 2);

    for tau in [1.0 / 64.0, 1.0 / 32.0, 0.2] {
        let coarse = problem.build_coarse(&CoarseSpec::shem_adaptive(tau, true))?;
        let r = problem.solve(Some(&coarse), &overlap, Mode::TwoLevel, &PcgOptions::default())?;
        let counts: Vec<String> = problem
            .partition
            .interfaces()
            .iter()
            .map(|g| format!("{}{}", coarse.enrichment[g.id], if g.orientation == hemdd::partition::Orientation::Vertical { "v" } else { "h" }))
            .collect();
        println!(
            "tau {tau:.4}: dim {:>3}, {} it, kappa {:.2}, lambda_m+1 {:.3e}\n  per interface {}",
            coarse.dim(),
            r.iterations,
            r.kappa_estimate,
            coarse.lambda_m_plus_1,
            counts.join(" ")
        );
    }
    Ok(())
}
