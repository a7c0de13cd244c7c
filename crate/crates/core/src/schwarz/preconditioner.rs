//! `M^{-1} r = R_0^T A_0^{-1} R_0 r + sum_i E_i A_i^{-1} E_i^T r`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::coarse::CoarseSpace;
use crate::linalg::{symmetric_eigenvalues, SparseMatrix, SparseVector, SpdFactorization};
use crate::partition::OverlapSet;
use crate::{Error, Result};

/// Symmetric linear map on dof vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, r: &[f64]) -> Vec<f64>;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows()];
        self.spmv_into(r, &mut y);
        y
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityOperator(pub usize);

impl LinearOperator for IdentityOperator {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        r.to_vec()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    TwoLevel,
    CoarseOnly,
    LocalOnly,
}

#[derive(Clone, Debug)]
struct CoarseSolver {
    basis: Vec<SparseVector>,
    factor: SpdFactorization,
}

#[derive(Clone, Debug)]
struct LocalSolver {
    dofs: Vec<usize>,
    factor: SpdFactorization,
}

#[derive(Clone, Debug)]
pub struct Preconditioner {
    n: usize,
    mode: Mode,
    coarse: Option<CoarseSolver>,
    locals: Vec<LocalSolver>,
}

const GRAM_CONDITION_LIMIT: f64 = 1e12;
const DENSE_GRAM_LIMIT: usize = 600;

fn sparse_dot(a: &SparseVector, b: &SparseVector) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.indices.len() && j < b.indices.len() {
        match a.indices[i].cmp(&b.indices[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a.values[i] * b.values[j];
                i += 1;
                j += 1;
            }
        }
    }
    s
}

/// Pairs `(i, j)`, `i >= j`, of basis vectors sharing a subdomain; every
/// other pair is orthogonal in both the Euclidean and the energy product.
fn coupled_pairs(coarse: &CoarseSpace) -> Vec<Vec<usize>> {
    let nsub = coarse.supports.iter().flatten().copied().max().map_or(0, |m| m + 1);
    let mut by_sub = vec![Vec::new(); nsub];
    for (i, subs) in coarse.supports.iter().enumerate() {
        for &s in subs {
            by_sub[s].push(i);
        }
    }
    (0..coarse.dim())
        .map(|j| {
            let set: BTreeSet<usize> = coarse.supports[j]
                .iter()
                .flat_map(|&s| by_sub[s].iter().copied())
                .filter(|&i| i >= j)
                .collect();
            set.into_iter().collect()
        })
        .collect()
}

fn symmetric_from_lower(n: usize, lower: Vec<(usize, usize, f64)>) -> Result<SparseMatrix> {
    let mut t = Vec::with_capacity(2 * lower.len());
    for (i, j, v) in lower {
        t.push((i, j, v));
        if i != j {
            t.push((j, i, v));
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

/// Condition number of the Jacobi-scaled Gram matrix `R_0 R_0^T`.
fn gram_condition(coarse: &CoarseSpace, pairs: &[Vec<usize>]) -> Result<f64> {
    let m = coarse.dim();
    let norms: Vec<f64> = coarse.basis.iter().map(|v| sparse_dot(v, v).sqrt()).collect();
    if let Some(i) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::Numerical(format!("coarse basis vector {i} is zero")));
    }
    let norms = &norms;
    let lower: Vec<(usize, usize, f64)> = pairs
        .iter()
        .enumerate()
        .flat_map(|(j, is)| {
            is.iter()
                .map(move |&i| (i, j, sparse_dot(&coarse.basis[i], &coarse.basis[j]) / (norms[i] * norms[j])))
        })
        .collect();
    let g = symmetric_from_lower(m, lower)?;
    if m <= DENSE_GRAM_LIMIT {
        let ev = symmetric_eigenvalues(&g.to_dense())?;
        let (lo, hi) = (ev[0], ev[m - 1]);
        return Ok(if lo <= 0.0 { f64::INFINITY } else { hi / lo });
    }
    // large spaces: power and inverse power iteration estimates
    let Ok(factor) = SpdFactorization::new(&g) else {
        return Ok(f64::INFINITY);
    };
    let rayleigh = |f: &dyn Fn(&[f64]) -> Vec<f64>| {
        let mut x: Vec<f64> = (0..m).map(|i| 1.0 + (i % 7) as f64 / 7.0).collect();
        let mut est = 0.0;
        for _ in 0..50 {
            let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= nx);
            let y = f(&x);
            est = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
            x = y;
        }
        est
    };
    let hi = rayleigh(&|x| {
        let mut y = vec![0.0; m];
        g.spmv_into(x, &mut y);
        y
    });
    let inv = rayleigh(&|x| factor.solve(x));
    Ok(hi * inv)
}

fn build_coarse_solver(a: &SparseMatrix, coarse: &CoarseSpace) -> Result<CoarseSolver> {
    let pairs = coupled_pairs(coarse);
    let cond = gram_condition(coarse, &pairs)?;
    if !(cond <= GRAM_CONDITION_LIMIT) {
        return Err(Error::Numerical(format!(
            "coarse basis is nearly linearly dependent (Gram condition {cond:.3e})"
        )));
    }
    let lower: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(j, is)| {
            let aj = a.apply(&coarse.basis[j].to_dense());
            is.iter()
                .map(|&i| (i, j, coarse.basis[i].dot_dense(&aj)))
                .collect::<Vec<_>>()
        })
        .collect();
    let a0 = symmetric_from_lower(coarse.dim(), lower)?;
    let factor = SpdFactorization::new(&a0).map_err(|e| e.with_context("coarse operator"))?;
    Ok(CoarseSolver {
        basis: coarse.basis.clone(),
        factor,
    })
}

pub fn build_preconditioner(
    a: &SparseMatrix,
    overlap: &OverlapSet,
    coarse: Option<&CoarseSpace>,
    mode: Mode,
) -> Result<Preconditioner> {
    let n = a.n_rows();
    if coarse.is_some_and(|c| c.basis.iter().any(|v| v.len != n)) {
        return Err(Error::usage("coarse basis vectors do not match the system size"));
    }
    let coarse = match (mode, coarse) {
        (Mode::CoarseOnly, None) => return Err(Error::usage("coarse-only mode needs a coarse space")),
        (Mode::LocalOnly, _) | (_, None) => None,
        (_, Some(c)) => Some(build_coarse_solver(a, c)?),
    };
    let locals = if mode == Mode::CoarseOnly {
        Vec::new()
    } else {
        overlap
            .sets
            .par_iter()
            .enumerate()
            .filter(|(_, dofs)| !dofs.is_empty())
            .map(|(s, dofs)| {
                if dofs.iter().any(|&d| d >= n) {
                    return Err(Error::usage(format!("overlap set {s} exceeds the system size")));
                }
                let factor = SpdFactorization::new(&a.submatrix(dofs, dofs))
                    .map_err(|e| e.with_context(format!("local block of subdomain {s}")))?;
                Ok(LocalSolver {
                    dofs: dofs.clone(),
                    factor,
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(Preconditioner {
        n,
        mode,
        coarse,
        locals,
    })
}

impl Preconditioner {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn coarse_dim(&self) -> usize {
        self.coarse.as_ref().map_or(0, |c| c.basis.len())
    }

    pub fn num_local_solves(&self) -> usize {
        self.locals.len()
    }
}

impl LinearOperator for Preconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.n, "residual length");
        let mut z = vec![0.0; self.n];
        if let Some(c) = &self.coarse {
            let mut y: Vec<f64> = c.basis.iter().map(|v| v.dot_dense(r)).collect();
            c.factor.solve_in_place(&mut y);
            for (v, yi) in c.basis.iter().zip(y) {
                v.add_to(yi, &mut z);
            }
        }
        let local: Vec<Vec<f64>> = self
            .locals
            .par_iter()
            .map(|l| {
                let mut x: Vec<f64> = l.dofs.iter().map(|&d| r[d]).collect();
                l.factor.solve_in_place(&mut x);
                x
            })
            .collect();
        // fixed subdomain order keeps the sum independent of the thread count
        for (l, x) in self.locals.iter().zip(local) {
            for (&d, xi) in l.dofs.iter().zip(x) {
                z[d] += xi;
            }
        }
        z
    }
}
