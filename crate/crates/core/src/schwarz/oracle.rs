//! Brute-force spectrum of the preconditioned operator for small systems.

use super::preconditioner::LinearOperator;
use crate::linalg::{symmetric_eigenvalues, DenseMatrix, SparseMatrix};
use crate::{Error, Result};

pub const ORACLE_MAX_DOFS: usize = 2000;

/// Ascending eigenvalues of `M^{-1} A`, computed from the similar symmetric
/// matrix `L^T M^{-1} L` with `A = L L^T`.
pub fn dense_preconditioned_spectrum(a: &SparseMatrix, p: &dyn LinearOperator) -> Result<Vec<f64>> {
    let n = a.n_rows();
    if n > ORACLE_MAX_DOFS {
        return Err(Error::usage(format!("condition oracle is limited to {ORACLE_MAX_DOFS} dofs, got {n}")));
    }
    if p.dim() != n {
        return Err(Error::usage("preconditioner size does not match the matrix"));
    }
    let l = a.to_dense().cholesky_lower()?;
    // W = M^{-1} L, column by column
    let mut w = DenseMatrix::zeros(n, n);
    for j in 0..n {
        w.set_column(j, &p.apply(&l.column(j)));
    }
    let s = l.transpose().matmul(&w)?;
    let mut sym = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = 0.5 * (s[(i, j)] + s[(j, i)]);
        }
    }
    symmetric_eigenvalues(&sym)
}

/// Exact `kappa(M^{-1} A) = lambda_max / lambda_min`.
pub fn dense_condition_oracle(a: &SparseMatrix, p: &dyn LinearOperator) -> Result<f64> {
    let ev = dense_preconditioned_spectrum(a, p)?;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if lo <= 0.0 {
        return Err(Error::Numerical("preconditioned operator has a nonpositive eigenvalue".into()));
    }
    Ok(hi / lo)
}
