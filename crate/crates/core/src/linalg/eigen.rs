//! Dense symmetric eigensolvers: Householder tridiagonalization followed by the
//! implicit QL iteration (EISPACK `tred2`/`tql2` lineage).

use super::dense::DenseMatrix;
use crate::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenpairs of a (generalized) symmetric problem.
///
/// `eigenvalues` are ascending; `eigenvectors` holds one eigenvector per column.
/// Each column's first non-negligible component (above `1e-12` of its largest
/// magnitude) is positive.
#[derive(Clone, Debug)]
pub struct DenseSymEigResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl DenseSymEigResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }
}

/// Solves `A v = lambda B v` for symmetric `A` and positive diagonal `B`
/// by reduction to `B^{-1/2} A B^{-1/2}`. Eigenvectors are `B`-orthonormal.
pub fn dense_sym_generalized_eig(a: &DenseMatrix, b_diag: &[f64]) -> Result<DenseSymEigResult> {
    let n = a.rows();
    if !a.is_square() || b_diag.len() != n {
        return Err(Error::usage(format!(
            "generalized eigenproblem: A is {}x{}, B has {} diagonal entries",
            a.rows(),
            a.cols(),
            b_diag.len()
        )));
    }
    if let Some((i, b)) = b_diag.iter().enumerate().find(|(_, b)| !(**b > 0.0) || !b.is_finite()) {
        return Err(Error::usage(format!("B[{i}] = {b} is not positive")));
    }
    let scale: Vec<f64> = b_diag.iter().map(|b| 1.0 / b.sqrt()).collect();
    let mut c = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // symmetrize to guard against tiny input asymmetry
            c[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]) * scale[i] * scale[j];
        }
    }
    let mut eig = symmetric_eigen(&c)?;
    for k in 0..n {
        for i in 0..n {
            eig.eigenvectors[(i, k)] *= scale[i];
        }
    }
    fix_signs(&mut eig.eigenvectors);
    Ok(eig)
}

/// Full eigendecomposition of a dense symmetric matrix.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<DenseSymEigResult> {
    if !a.is_square() {
        return Err(Error::usage("eigendecomposition of a non-square matrix"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(DenseSymEigResult {
            eigenvalues: Vec::new(),
            eigenvectors: DenseMatrix::zeros(0, 0),
        });
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, true);
    shift_offdiagonal(&mut e);
    tql2(&mut d, &mut e, Some(&mut v))?;
    fix_signs(&mut v);
    Ok(DenseSymEigResult {
        eigenvalues: d,
        eigenvectors: v,
    })
}

/// Ascending eigenvalues of a dense symmetric matrix, without eigenvectors.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::usage("eigenvalues of a non-square matrix"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, false);
    shift_offdiagonal(&mut e);
    tql2(&mut d, &mut e, None)?;
    Ok(d)
}

/// Ascending eigenvalues of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (`off[i]` couples `i` and `i + 1`).
pub fn sym_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::usage("tridiagonal: off-diagonal must have n-1 entries"));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    tql2(&mut d, &mut e, None)?;
    Ok(d)
}

fn shift_offdiagonal(e: &mut [f64]) {
    let n = e.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
}

fn fix_signs(v: &mut DenseMatrix) {
    for k in 0..v.cols() {
        let col = v.column(k);
        let big = col.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if let Some(&lead) = col.iter().find(|x| x.abs() > 1e-12 * big) {
            if lead < 0.0 {
                for i in 0..v.rows() {
                    v[(i, k)] = -v[(i, k)];
                }
            }
        }
    }
}

/// Householder reduction to tridiagonal form. On return `d` is the diagonal,
/// `e[1..]` the subdiagonal, and `v` the accumulated transformation when
/// `accumulate` is set.
fn tred2(v: &mut DenseMatrix, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for i in 0..n {
            d[i] = v[(i, i)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on a symmetric tridiagonal matrix (`e[i]` couples `i`, `i+1`,
/// `e[n-1] = 0`). Eigenvalues end up ascending in `d`; rotations are applied to
/// the columns of `v` when given.
fn tql2(d: &mut [f64], e: &mut [f64], mut v: Option<&mut DenseMatrix>) -> Result<()> {
    let n = d.len();
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::EigenNoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let t = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * t;
                            v[(k, i)] = c * v[(k, i)] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            if let Some(v) = v.as_deref_mut() {
                for j in 0..n {
                    let t = v[(j, i)];
                    v[(j, i)] = v[(j, k)];
                    v[(j, k)] = t;
                }
            }
        }
    }
    Ok(())
}
