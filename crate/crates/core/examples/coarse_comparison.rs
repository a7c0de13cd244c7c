//! Iterations and condition estimates of MS, SHEM and NSHEM across a contrast
//! ladder on three channel segments per vertical interface.
//!
//! cargo run --release --example coarse_comparison

use hemdd::experiment::{benchmark_field, Benchmark};
use hemdd::prelude::*;

fn main() -> hemdd::Result<()> {
    let (n, hc) = (64, 16);
    let specs = [
        CoarseSpec::ms(),
        CoarseSpec::shem(2),
        CoarseSpec::shem(3),
        CoarseSpec::nshem(GFamily::Alternating, 3),
        CoarseSpec::nshem(GFamily::Sine, 3),
        CoarseSpec::nshem(GFamily::Hierarchical, 3),
    ];
    print!("{:>8}", "contrast");
    for s in &specs {
        print!(" {:>16}", s.label());
    }
    println!();
    for contrast in [1.0, 1e2, 1e4, 1e6] {
        let mesh = Mesh::structured(n)?;
        let incs = benchmark_field(&Benchmark::channels(3, true).with_reach(4), n, hc, contrast)?;
        let field = CoefficientField::from_inclusions(&mesh, 1.0, &incs)?;
        let problem = Problem::new(mesh, field, hc)?;
        let overlap = problem.partition.extend_overlap(&problem.mesh, 2);
        print!("{contrast:>8.0e}");
        for s in &specs {
            let coarse = problem.build_coarse(s)?;
            let r = problem.solve(Some(&coarse), &overlap, Mode::TwoLevel, &PcgOptions::default())?;
            print!(" {:>16}", format!("{} ({:.2e})", r.iterations, r.kappa_estimate));
        }
        println!();
    }
    Ok(())
}
