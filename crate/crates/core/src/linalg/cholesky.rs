//! Envelope (skyline) Cholesky factorization under a reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use super::dense::dot;
use super::sparse::SparseMatrix;
use crate::{Error, Result};

/// Pivots at or below this fraction of the original diagonal are rejected.
const PIVOT_TOLERANCE: f64 = 1e-14;

/// Read-only `P A P^T = L L^T` factorization of an SPD matrix.
#[derive(Clone, Debug)]
pub struct SpdFactorization {
    n: usize,
    /// new index -> original index
    perm: Vec<usize>,
    /// first column of the envelope in each (permuted) row
    first: Vec<usize>,
    /// offset of row i's envelope segment in `lvals`
    row_start: Vec<usize>,
    lvals: Vec<f64>,
}

impl SpdFactorization {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        if a.n_rows() != a.n_cols() {
            return Err(Error::usage("factorization of a non-square matrix"));
        }
        let n = a.n_rows();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first = vec![0; n];
        for (i, &old) in perm.iter().enumerate() {
            let (cols, _) = a.row(old);
            first[i] = cols.iter().map(|&c| inv[c]).filter(|&c| c <= i).min().unwrap_or(i);
        }
        let mut row_start = Vec::with_capacity(n + 1);
        row_start.push(0);
        for i in 0..n {
            row_start.push(row_start[i] + (i - first[i] + 1));
        }
        let mut lvals = vec![0.0; row_start[n]];
        let mut diag = vec![0.0; n];
        for (i, &old) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                if j <= i {
                    lvals[row_start[i] + j - first[i]] = v;
                }
                if j == i {
                    diag[i] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = lvals.split_at_mut(row_start[i]);
            let li = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let lj = &done[row_start[j]..row_start[j + 1]];
                let s = dot(&li[k0 - fi..j - fi], &lj[k0 - fj..j - fj]);
                li[j - fi] = (li[j - fi] - s) / lj[j - fj];
            }
            let s = dot(&li[..i - fi], &li[..i - fi]);
            let d = li[i - fi] - s;
            if !d.is_finite() || d <= PIVOT_TOLERANCE * diag[i].abs() {
                return Err(Error::NotSpd {
                    context: "sparse factorization".into(),
                    row: perm[i],
                });
            }
            li[i - fi] = d.sqrt();
        }

        Ok(SpdFactorization {
            n,
            perm,
            first,
            row_start,
            lvals,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.lvals.len()
    }

    fn lrow(&self, i: usize) -> &[f64] {
        &self.lvals[self.row_start[i]..self.row_start[i + 1]]
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n, "right-hand side length");
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let li = self.lrow(i);
            let s = dot(&li[..i - fi], &y[fi..i]);
            y[i] = (y[i] - s) / li[i - fi];
        }
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let li = self.lrow(i);
            y[i] /= li[i - fi];
            let yi = y[i];
            for (yk, &l) in y[fi..i].iter_mut().zip(&li[..i - fi]) {
                *yk -= l * yi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

pub fn spd_factorize(a: &SparseMatrix) -> Result<SpdFactorization> {
    SpdFactorization::new(a)
}

pub fn spd_solve(f: &SpdFactorization, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != f.dim() {
        return Err(Error::usage(format!(
            "spd_solve: factor has dimension {}, right-hand side has {} entries",
            f.dim(),
            b.len()
        )));
    }
    Ok(f.solve(b))
}

/// Reverse Cuthill-McKee ordering of the symmetric pattern of `a`
/// (returns new -> original).
pub fn reverse_cuthill_mckee(a: &SparseMatrix) -> Vec<usize> {
    let n = a.n_rows();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).0.iter().copied().filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        let start = pseudo_peripheral(seed, &adjacency, &degree);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(start: usize, adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::from([start]);
    let mut levels = vec![vec![start]];
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in &adjacency[v] {
                if seen.insert(w) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

fn pseudo_peripheral(seed: usize, adjacency: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut current = seed;
    let mut ecc = bfs_levels(current, adjacency).len();
    for _ in 0..8 {
        let levels = bfs_levels(current, adjacency);
        let candidate = *levels
            .last()
            .unwrap()
            .iter()
            .min_by_key(|&&w| (degree[w], w))
            .unwrap();
        let cand_ecc = bfs_levels(candidate, adjacency).len();
        if cand_ecc <= ecc {
            break;
        }
        current = candidate;
        ecc = cand_ecc;
    }
    current
}
