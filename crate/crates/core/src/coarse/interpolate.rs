//! The coarse interpolant `I_0 = I_ms + Pi_m (1 - I_ms)` and the stable
//! decomposition built on it.

use super::{CoarseContext, CoarseKind, CoarseSpace};
use crate::linalg::{SparseMatrix, SparseVector};
use crate::partition::PartitionOfUnity;
use crate::{Error, Result};

/// `I_0 u` for a dof vector `u`. Requires eigenfunction enrichment.
pub fn coarse_interpolate(ctx: &CoarseContext, coarse: &CoarseSpace, u: &[f64]) -> Result<Vec<f64>> {
    if !coarse.is_eigen_based() {
        return Err(Error::usage(
            "coarse interpolation needs eigenfunction enrichment, not a non-spectral space",
        ));
    }
    let mesh = ctx.mesh;
    if u.len() != mesh.num_dofs() {
        return Err(Error::usage(format!("vector of length {} for {} dofs", u.len(), mesh.num_dofs())));
    }
    let mut ims = vec![0.0; u.len()];
    for (v, tag) in coarse.basis.iter().zip(&coarse.tags) {
        if let CoarseKind::Vertex { node } = *tag {
            v.add_to(u[mesh.dof(node).unwrap()], &mut ims);
        }
    }
    let w: Vec<f64> = u.iter().zip(&ims).map(|(a, b)| a - b).collect();
    let mut out = ims;
    for (g, &m) in coarse.enrichment.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let trace: Vec<f64> = ctx.partition.interfaces()[g]
            .nodes
            .iter()
            .map(|&v| w[mesh.dof(v).unwrap()])
            .collect();
        for (k, c) in ctx.spectra[g].coefficients(&trace, m).into_iter().enumerate() {
            coarse.enrichment_vector(g, k + 1).add_to(c, &mut out);
        }
    }
    Ok(out)
}

/// Splitting `u = u_0 + sum u_i` with `u_0 = I_0 u` and `u_i = I_h(theta_i w)`.
#[derive(Clone, Debug)]
pub struct StableDecomposition {
    pub u0: Vec<f64>,
    pub parts: Vec<SparseVector>,
    /// `(a(u_0, u_0) + sum a(u_i, u_i)) / a(u, u)`.
    pub ratio: f64,
}

pub fn verify_stable_decomposition(
    ctx: &CoarseContext,
    a: &SparseMatrix,
    coarse: &CoarseSpace,
    pou: &PartitionOfUnity,
    u: &[f64],
) -> Result<StableDecomposition> {
    let u0 = coarse_interpolate(ctx, coarse, u)?;
    let w: Vec<f64> = u.iter().zip(&u0).map(|(a, b)| a - b).collect();
    let n = u.len();
    let parts: Vec<SparseVector> = pou
        .weights
        .iter()
        .map(|theta| {
            let (indices, values) = theta.iter().map(|&(d, t)| (d, t * w[d])).unzip();
            SparseVector { len: n, indices, values }
        })
        .collect();

    let mut sum = vec![0.0; n];
    for p in &parts {
        p.add_to(1.0, &mut sum);
    }
    let w_max = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let defect = sum.iter().zip(&w).fold(0.0f64, |m, (s, x)| m.max((s - x).abs()));
    if defect > 1e-12 * w_max.max(f64::MIN_POSITIVE) {
        return Err(Error::Numerical(format!("local parts do not sum to the remainder (defect {defect:e})")));
    }

    let energy = |x: &[f64]| a.bilinear(x, x);
    let total = energy(u);
    let local: f64 = parts.iter().map(|p| energy(&p.to_dense())).sum();
    let ratio = if total > 0.0 { (energy(&u0) + local) / total } else { 1.0 };
    Ok(StableDecomposition { u0, parts, ratio })
}
