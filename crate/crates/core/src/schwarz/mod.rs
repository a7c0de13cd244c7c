//! Two-level additive Schwarz preconditioning and PCG with condition estimates.

mod oracle;
mod pcg;
mod preconditioner;

pub use oracle::{dense_condition_oracle, dense_preconditioned_spectrum, ORACLE_MAX_DOFS};
pub use pcg::{lanczos_ritz_values, pcg, PcgOptions, SolveReport};
pub use preconditioner::{build_preconditioner, IdentityOperator, LinearOperator, Mode, Preconditioner};
