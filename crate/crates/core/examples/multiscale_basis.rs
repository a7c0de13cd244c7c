//! Build the multiscale and spectrally enriched coarse spaces, check that every
//! basis function is discrete harmonic inside the subdomains, and measure the
//! stable decomposition constant on random functions.
//!
//! cargo run --release --example multiscale_basis

use hemdd::coarse::{harmonic_residual, verify_stable_decomposition};
use hemdd::experiment::{benchmark_field, Benchmark};
use hemdd::partition::PartitionOfUnity;
use hemdd::prelude::*;
use rand::{Rng, SeedableRng};

fn main() -> hemdd::Result<()> {
    let (n, hc) = (32, 8);
    let mesh = Mesh::structured(n)?;
    let incs = benchmark_field(&Benchmark::channels(2, true).with_reach(2), n, hc, 1e6)?;
    let field = CoefficientField::from_inclusions(&mesh, 1.0, &incs)?;
    let problem = Problem::new(mesh, field, hc)?;
    let overlap = problem.partition.extend_overlap(&problem.mesh, 2);
    let pou = PartitionOfUnity::new(&problem.mesh, &problem.partition, &overlap)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);

    for spec in [CoarseSpec::ms(), CoarseSpec::shem(1), CoarseSpec::shem(2)] {
        let coarse = problem.build_coarse(&spec)?;
        let worst = coarse
            .basis
            .iter()
            .map(|v| harmonic_residual(&problem.system.a, &problem.mesh, &problem.partition, v))
            .fold(0.0, f64::max);
        let mut ratio = 0.0f64;
        for _ in 0..10 {
            let u: Vec<f64> = (0..problem.system.size()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d = verify_stable_decomposition(&problem.context(), &problem.system.a, &coarse, &pou, &u)?;
            ratio = ratio.max(d.ratio);
        }
        println!(
            "{:<8} dim {:>3}  harmonic residual {worst:.1e}  lambda_m+1 {:.2e}  decomposition ratio {ratio:.3}",
            spec.label(),
            coarse.dim(),
            coarse.lambda_m_plus_1
        );
    }
    Ok(())
}
