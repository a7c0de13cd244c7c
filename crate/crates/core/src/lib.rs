//! Two-level overlapping additive Schwarz preconditioners for high-contrast
//! elliptic problems `-div(alpha grad u) = f` on the unit square.
//!
//! The crate builds P1 finite element systems on structured triangulations,
//! decomposes the domain into square subdomains, and constructs a family of
//! discrete-harmonic coarse spaces:
//!
//! * `Ms`: multiscale hat functions with coefficient-weighted edge traces,
//! * `Shem`: multiscale hats enriched by harmonic lifts of interface
//!   eigenfunctions (fixed count per interface, or adaptive by threshold),
//! * `Nshem`: the same enrichment built from weighted 1D solves instead of
//!   eigenproblems (alternating, sine or hierarchical right-hand sides),
//! * `Ohem`: the full discrete harmonic space, which turns the nonoverlapping
//!   method into a direct solver.
//!
//! The preconditioners drive a conjugate gradient solver whose Lanczos
//! scalars yield condition number estimates, cross-checked by a dense oracle.
//!
//! ```no_run
//! use hemdd::prelude::*;
//!
//! let mesh = Mesh::structured(32)?;
//! let field = CoefficientField::uniform(&mesh, 1.0)?;
//! let problem = Problem::new(mesh, field, 8)?;
//! let coarse = problem.build_coarse(&CoarseSpec::shem(2))?;
//! let overlap = problem.partition.extend_overlap(&problem.mesh, 2);
//! let report = problem.solve(Some(&coarse), &overlap, Mode::TwoLevel, &PcgOptions::default())?;
//! println!("{} iterations, kappa ~ {:.2e}", report.iterations, report.kappa_estimate);
//! # Ok::<(), hemdd::Error>(())
//! ```

pub mod assembly;
pub mod coarse;
mod error;
pub mod experiment;
pub mod linalg;
pub mod mesh;
pub mod partition;
pub mod problem;
pub mod schwarz;

pub use error::{Error, Result};


/// Common imports for examples and downstream code.
pub mod prelude {
    pub use crate::assembly::{apply_dirichlet, assemble_load, assemble_stiffness, LinearSystem};
    pub use crate::coarse::{
        CoarseKind, CoarseSpace, CoarseSpec, CoarseType, Enrichment, GFamily, InterfaceSpectrum,
    };
    pub use crate::linalg::{DenseMatrix, SparseMatrix, SpdFactorization};
    pub use crate::mesh::{CoefficientField, Inclusion, Mesh, Raster, Rect};
    pub use crate::partition::{OverlapSet, Partition, PartitionOfUnity};
    pub use crate::problem::Problem;
    pub use crate::schwarz::{
        build_preconditioner, dense_condition_oracle, pcg, IdentityOperator, LinearOperator, Mode,
        PcgOptions, Preconditioner, SolveReport,
    };
    pub use crate::{Error, Result};
}
