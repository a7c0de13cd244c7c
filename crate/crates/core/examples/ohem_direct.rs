//! The full discrete harmonic coarse space with nonoverlapping subdomains:
//! one PCG iteration regardless of the contrast.
//!
//! cargo run --release --example ohem_direct

use hemdd::experiment::{benchmark_field, Benchmark};
use hemdd::prelude::*;

fn main() -> hemdd::Result<()> {
    let (n, hc) = (32, 8);
    for contrast in [1.0, 1e3, 1e6] {
        let mesh = Mesh::structured(n)?;
        let incs = benchmark_field(&Benchmark::channels(2, true).with_reach(2), n, hc, contrast)?;
        let field = CoefficientField::from_inclusions(&mesh, 1.0, &incs)?;
        let problem = Problem::new(mesh, field, hc)?;
        let coarse = problem.build_coarse(&CoarseSpec::ohem())?;
        let disjoint = problem.partition.extend_overlap(&problem.mesh, 0);
        let r = problem.solve(Some(&coarse), &disjoint, Mode::TwoLevel, &PcgOptions::default())?;
        let exact = problem.direct_solve()?;
        println!(
            "contrast {contrast:>6.0e}: coarse dim {}, {} iteration, relres {:.1e}, energy error {:.1e}",
            coarse.dim(),
            r.iterations,
            r.final_relres,
            problem.energy_error(&r.solution, &exact)
        );
    }
    Ok(())
}
