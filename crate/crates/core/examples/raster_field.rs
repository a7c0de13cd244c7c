//! Coefficient from a CSV raster (top row first), as produced from an image or
//! a reservoir slice, solved with MS and adaptive SHEM.
//!
//! cargo run --release --example raster_field [path.csv]

use hemdd::prelude::*;

fn main() -> hemdd::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/layered.csv").to_string());
    let raster = Raster::load(&path)?;
    let mesh = Mesh::structured(64)?;
    let field = CoefficientField::from_raster(&mesh, &raster)?;
    println!("{path}: coefficient range [{:.3e}, {:.3e}]", field.min(), field.max());

    let problem = Problem::new(mesh, field, 16)?;
    let overlap = problem.partition.extend_overlap(&problem.mesh, 2);
    for spec in [CoarseSpec::ms(), CoarseSpec::shem_adaptive(1.0 / 32.0, true)] {
        let coarse = problem.build_coarse(&spec)?;
        let r = problem.solve(Some(&coarse), &overlap, Mode::TwoLevel, &PcgOptions::default())?;
        println!(
            "{:<10} dim {:>3}  {:>3} it  kappa {:.3e}",
            spec.label(),
            coarse.dim(),
            r.iterations,
            r.kappa_estimate
        );
    }
    Ok(())
}
