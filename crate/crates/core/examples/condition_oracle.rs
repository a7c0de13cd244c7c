//! Compare the Lanczos condition estimate from PCG with the dense spectrum of
//! the preconditioned operator, one- and two-level.
//!
//! cargo run --release --example condition_oracle

use hemdd::experiment::{benchmark_field, Benchmark};
use hemdd::prelude::*;
use hemdd::schwarz::dense_preconditioned_spectrum;

fn main() -> hemdd::Result<()> {
    let (n, hc) = (32, 8);
    let mesh = Mesh::structured(n)?;
    let incs = benchmark_field(&Benchmark::channels(2, true).with_reach(2), n, hc, 1e4)?;
    let field = CoefficientField::from_inclusions(&mesh, 1.0, &incs)?;
    let problem = Problem::new(mesh, field, hc)?;
    let overlap = problem.partition.extend_overlap(&problem.mesh, 2);
    let a = &problem.system.a;

    let cases: Vec<(&str, Option<CoarseSpec>)> = vec![
        ("one-level", None),
        ("ms", Some(CoarseSpec::ms())),
        ("shem_2", Some(CoarseSpec::shem(2))),
    ];
    for (name, spec) in cases {
        let coarse = spec.map(|s| problem.build_coarse(&s)).transpose()?;
        let p = build_preconditioner(a, &overlap, coarse.as_ref(), Mode::TwoLevel)?;
        let report = pcg(a, &p, &problem.system.b, &PcgOptions::default())?;
        let spectrum = dense_preconditioned_spectrum(a, &p)?;
        let (lo, hi) = (spectrum[0], spectrum[spectrum.len() - 1]);
        let ritz = &report.ritz_values;
        println!(
            "{name:<10} {:>4} it  lanczos {:.4e}  oracle {:.4e}  ritz [{:.3e}, {:.3e}] within [{lo:.3e}, {hi:.3e}]",
            report.iterations,
            report.kappa_estimate,
            hi / lo,
            ritz[0],
            ritz[ritz.len() - 1]
        );
    }
    Ok(())
}
