//! Preconditioned conjugate gradients with Lanczos condition estimates.

use std::time::Instant;

use serde::Serialize;

use super::LinearOperator;
use crate::linalg::{axpy, dot, norm2, sym_tridiagonal_eigenvalues};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PcgOptions {
    pub tol: f64,
    pub maxit: usize,
}

impl Default for PcgOptions {
    fn default() -> Self {
        PcgOptions { tol: 1e-6, maxit: 2000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||r_i|| / ||r_0||`, starting with `1` for the initial residual.
    pub residual_history: Vec<f64>,
    pub kappa_estimate: f64,
    /// Ascending eigenvalues of the Lanczos tridiagonal.
    pub ritz_values: Vec<f64>,
    pub converged: bool,
    pub final_relres: f64,
    pub solution: Vec<f64>,
    /// Seconds.
    pub wall_time: f64,
    pub coarse_dim: usize,
    pub lambda_m_plus_1: f64,
    /// CG step lengths and direction updates; they define the Lanczos matrix.
    pub cg_alpha: Vec<f64>,
    pub cg_beta: Vec<f64>,
}

impl SolveReport {
    /// Condition estimate from the first `k` CG steps.
    pub fn kappa_after(&self, k: usize) -> Result<f64> {
        let k = k.min(self.cg_alpha.len());
        let ritz = lanczos_ritz_values(&self.cg_alpha[..k], &self.cg_beta[..k.saturating_sub(1)])?;
        Ok(ratio(&ritz))
    }
}

fn ratio(ritz: &[f64]) -> f64 {
    match (ritz.first(), ritz.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => (hi / lo).max(1.0),
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Eigenvalues of the Lanczos tridiagonal assembled from CG scalars
/// (`alphas.len() == betas.len() + 1`).
pub fn lanczos_ritz_values(alphas: &[f64], betas: &[f64]) -> Result<Vec<f64>> {
    let k = alphas.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    if betas.len() + 1 != k {
        return Err(Error::usage("Lanczos matrix needs one beta fewer than alphas"));
    }
    let diag: Vec<f64> = (0..k)
        .map(|j| {
            if j == 0 {
                1.0 / alphas[0]
            } else {
                1.0 / alphas[j] + betas[j - 1] / alphas[j - 1]
            }
        })
        .collect();
    let off: Vec<f64> = (0..k - 1).map(|j| betas[j].sqrt() / alphas[j]).collect();
    sym_tridiagonal_eigenvalues(&diag, &off)
}

/// Solves `A x = b` from a zero initial guess until `||r|| <= tol ||b||`.
/// Hitting `maxit` is reported through `converged = false`, not as an error.
pub fn pcg(a: &dyn LinearOperator, p: &dyn LinearOperator, b: &[f64], options: &PcgOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let n = a.dim();
    if b.len() != n || p.dim() != n {
        return Err(Error::usage(format!(
            "pcg: operator of size {n}, preconditioner {}, right-hand side {}",
            p.dim(),
            b.len()
        )));
    }
    let mut x = vec![0.0; n];
    let r0 = norm2(b);
    let mut report = SolveReport {
        iterations: 0,
        residual_history: vec![1.0],
        kappa_estimate: 1.0,
        ritz_values: Vec::new(),
        converged: true,
        final_relres: 0.0,
        solution: Vec::new(),
        wall_time: 0.0,
        coarse_dim: 0,
        lambda_m_plus_1: 0.0,
        cg_alpha: Vec::new(),
        cg_beta: Vec::new(),
    };
    if r0 == 0.0 {
        report.solution = x;
        report.wall_time = start.elapsed().as_secs_f64();
        return Ok(report);
    }

    let mut r = b.to_vec();
    let mut z = p.apply(&r);
    let mut rz = dot(&r, &z);
    let mut d = z.clone();
    let mut relres = 1.0;
    report.converged = false;
    for _ in 0..options.maxit {
        if !(rz > 0.0) {
            return Err(Error::Numerical(format!("preconditioner is not positive definite (r.z = {rz:e})")));
        }
        let q = a.apply(&d);
        let dq = dot(&d, &q);
        if !(dq > 0.0) {
            return Err(Error::Numerical(format!("operator is not positive definite (p.Ap = {dq:e})")));
        }
        let alpha = rz / dq;
        axpy(alpha, &d, &mut x);
        axpy(-alpha, &q, &mut r);
        report.cg_alpha.push(alpha);
        report.iterations += 1;
        relres = norm2(&r) / r0;
        report.residual_history.push(relres);
        if relres <= options.tol {
            report.converged = true;
            break;
        }
        z = p.apply(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        report.cg_beta.push(beta);
        rz = rz_new;
        for (di, zi) in d.iter_mut().zip(&z) {
            *di = zi + beta * *di;
        }
    }
    // the last beta has no matching alpha when maxit was reached
    report.cg_beta.truncate(report.cg_alpha.len().saturating_sub(1));
    report.ritz_values = lanczos_ritz_values(&report.cg_alpha, &report.cg_beta)?;
    report.kappa_estimate = ratio(&report.ritz_values);
    report.final_relres = relres;
    report.solution = x;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;
    use crate::schwarz::IdentityOperator;

    #[test]
    fn identity_system() {
        let a = SparseMatrix::identity(5);
        let r = pcg(&a, &IdentityOperator(5), &[1.0, 2.0, 3.0, 4.0, 5.0], &PcgOptions::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.kappa_estimate, 1.0);
        assert!(r.converged);
    }

    #[test]
    fn two_by_two_diagonal() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 4.0)]).unwrap();
        let r = pcg(&a, &IdentityOperator(2), &[1.0, 1.0], &PcgOptions::default()).unwrap();
        assert_eq!(r.iterations, 2);
        assert!((r.kappa_estimate - 4.0).abs() < 1e-12);
        assert!((r.solution[0] - 1.0).abs() < 1e-12 && (r.solution[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_rhs() {
        let a = SparseMatrix::identity(3);
        let r = pcg(&a, &IdentityOperator(3), &[0.0; 3], &PcgOptions::default()).unwrap();
        assert_eq!((r.iterations, r.kappa_estimate, r.converged), (0, 1.0, true));
    }

    #[test]
    fn maxit_flags_nonconvergence() {
        let n = 50;
        let t: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|i| {
                let mut v = vec![(i, i, 2.0)];
                if i > 0 {
                    v.push((i, i - 1, -1.0));
                    v.push((i - 1, i, -1.0));
                }
                v
            })
            .collect();
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let opts = PcgOptions { tol: 1e-10, maxit: 5 };
        let r = pcg(&a, &IdentityOperator(n), &vec![1.0; n], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
        assert_eq!(r.ritz_values.len(), 5);
        assert!(r.final_relres > 1e-10);
    }

    #[test]
    fn indefinite_operator_errors() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        assert!(pcg(&a, &IdentityOperator(2), &[0.0, 1.0], &PcgOptions::default()).is_err());
    }
}
