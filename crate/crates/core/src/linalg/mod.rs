//! Numerical kernel: CSR storage, SPD direct solves and dense symmetric eigensolvers.

mod cholesky;
mod dense;
mod eigen;
mod sparse;

pub use cholesky::{reverse_cuthill_mckee, spd_factorize, spd_solve, SpdFactorization};
pub use dense::{axpy, dot, norm2, DenseMatrix};
pub use eigen::{
    dense_sym_generalized_eig, sym_tridiagonal_eigenvalues, symmetric_eigen, symmetric_eigenvalues,
    DenseSymEigResult,
};
pub use sparse::{SparseMatrix, SparseVector};
