//! Construction of the coarse basis vectors.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{
    select_adaptive, solve_interface_eigenproblem, CoarseContext, CoarseKind, CoarseSpace, CoarseSpec,
    CoarseType, Enrichment, GFamily,
};
use crate::linalg::{SparseMatrix, SparseVector};
use crate::mesh::Mesh;
use crate::partition::{Partition, TraceForms};
use crate::{Error, Result};

/// Glues skeleton values, extends them harmonically into `subdomains` and
/// returns the result over the interior dofs. Skeleton nodes not listed are zero.
fn lift(ctx: &CoarseContext, skeleton: &[(usize, f64)], subdomains: &[usize]) -> Result<SparseVector> {
    let mesh = ctx.mesh;
    let known: HashMap<usize, f64> = skeleton.iter().copied().collect();
    let mut entries = BTreeMap::new();
    for &(v, x) in skeleton {
        if let Some(d) = mesh.dof(v) {
            entries.insert(d, x);
        }
    }
    for &s in subdomains {
        let g: Vec<f64> = ctx
            .extender
            .boundary_nodes(s)
            .iter()
            .map(|v| known.get(v).copied().unwrap_or(0.0))
            .collect();
        let x = ctx.extender.extend(s, &g)?;
        for (&v, xi) in ctx.extender.interior_nodes(s).iter().zip(x) {
            entries.insert(mesh.dof(v).expect("subdomain interiors are interior"), xi);
        }
    }
    let (indices, values) = entries.into_iter().filter(|&(_, x)| x != 0.0).unzip();
    Ok(SparseVector {
        len: mesh.num_dofs(),
        indices,
        values,
    })
}

fn vertex_hat(ctx: &CoarseContext, vertex: usize) -> Result<(SparseVector, Vec<usize>)> {
    let mut skeleton = vec![(vertex, 1.0)];
    for g in ctx.partition.interfaces() {
        if !g.endpoints.contains(&vertex) {
            continue;
        }
        let forms = &ctx.forms[g.id];
        let (start, end) = if g.endpoints[0] == vertex { (1.0, 0.0) } else { (0.0, 1.0) };
        let trace = forms.solve(&vec![0.0; forms.dim()], start, end);
        skeleton.extend(g.nodes.iter().copied().zip(trace));
    }
    let subs = ctx.partition.owners(ctx.mesh, vertex);
    Ok((lift(ctx, &skeleton, &subs)?, subs))
}

fn interface_lift(ctx: &CoarseContext, interface: usize, trace: &[f64]) -> Result<(SparseVector, Vec<usize>)> {
    let g = &ctx.partition.interfaces()[interface];
    let skeleton: Vec<(usize, f64)> = g.nodes.iter().copied().zip(trace.iter().copied()).collect();
    let subs = vec![g.sub_lo, g.sub_hi];
    Ok((lift(ctx, &skeleton, &subs)?, subs))
}

/// Trace of the `k`-th non-spectral function: `Abar phi = B g^k`, zero at both ends.
pub fn nonspectral_trace(forms: &TraceForms, family: GFamily, k: usize) -> Vec<f64> {
    let m = forms.dim();
    let rhs: Vec<f64> = (1..=m)
        .map(|p| forms.weights[p - 1] * family.eval(k, p, m + 1))
        .collect();
    forms.solve(&rhs, 0.0, 0.0)
}

/// Multiscale hats, one per interior coarse vertex.
pub fn build_multiscale_basis(ctx: &CoarseContext) -> Result<Vec<SparseVector>> {
    ctx.partition
        .coarse_vertices()
        .par_iter()
        .map(|&v| vertex_hat(ctx, v).map(|(x, _)| x))
        .collect()
}

fn check_counts(ctx: &CoarseContext, counts: &[usize]) -> Result<()> {
    if counts.len() != ctx.partition.interfaces().len() {
        return Err(Error::usage("one enrichment count per interface is required"));
    }
    for (g, &m) in ctx.partition.interfaces().iter().zip(counts) {
        if m > g.len() {
            return Err(Error::usage(format!(
                "interface {} has {} modes, {m} requested",
                g.id,
                g.len()
            )));
        }
    }
    Ok(())
}

/// Harmonic lifts of the first `counts[g]` eigenfunctions of every interface.
pub fn build_spectral_basis(ctx: &CoarseContext, counts: &[usize]) -> Result<Vec<SparseVector>> {
    check_counts(ctx, counts)?;
    let tasks: Vec<(usize, usize)> = counts.iter().enumerate().flat_map(|(g, &m)| (0..m).map(move |k| (g, k))).collect();
    tasks
        .par_iter()
        .map(|&(g, k)| interface_lift(ctx, g, &ctx.spectra[g].eigenvectors[k]).map(|(x, _)| x))
        .collect()
}

/// Harmonic lifts of the weighted 1D solves with right-hand sides `g^1..g^m`.
pub fn build_nonspectral_basis(ctx: &CoarseContext, family: GFamily, counts: &[usize]) -> Result<Vec<SparseVector>> {
    check_counts(ctx, counts)?;
    let tasks: Vec<(usize, usize)> = counts.iter().enumerate().flat_map(|(g, &m)| (1..=m).map(move |k| (g, k))).collect();
    tasks
        .par_iter()
        .map(|&(g, k)| interface_lift(ctx, g, &nonspectral_trace(&ctx.forms[g], family, k)).map(|(x, _)| x))
        .collect()
}

/// The full discrete harmonic space.
pub fn build_ohem(ctx: &CoarseContext) -> Result<CoarseSpace> {
    build_coarse(ctx, &CoarseSpec::ohem())
}

fn unit_lambda1(forms: &TraceForms) -> Result<f64> {
    let mut unit = forms.clone();
    unit.segment_coeffs.iter_mut().for_each(|c| *c = 1.0);
    unit.coeff_lo.iter_mut().for_each(|c| *c = 1.0);
    unit.coeff_hi.iter_mut().for_each(|c| *c = 1.0);
    // six incident elements at every interior node of the structured mesh
    unit.weights.iter_mut().for_each(|w| *w = 6.0 / forms.h_sub);
    Ok(solve_interface_eigenproblem(&unit)?.eigenvalues.first().copied().unwrap_or(f64::INFINITY))
}

fn enrichment_counts(ctx: &CoarseContext, spec: &CoarseSpec) -> Result<Vec<usize>> {
    let interfaces = ctx.partition.interfaces();
    match (spec.kind, spec.enrichment) {
        (CoarseType::Ms, _) => Ok(vec![0; interfaces.len()]),
        (CoarseType::Ohem, _) => Ok(interfaces.iter().map(|g| g.len()).collect()),
        (_, Enrichment::Fixed(m)) => {
            let counts = vec![m; interfaces.len()];
            check_counts(ctx, &counts)?;
            Ok(counts)
        }
        (
            _,
            Enrichment::Adaptive {
                tau,
                min_one,
                laplacian_relative,
            },
        ) => {
            if !(tau > 0.0) {
                return Err(Error::usage("adaptive threshold must be positive"));
            }
            ctx.spectra
                .iter()
                .zip(ctx.forms)
                .map(|(s, f)| {
                    let t = if laplacian_relative { tau * unit_lambda1(f)? } else { tau };
                    Ok(select_adaptive(s, t, min_one))
                })
                .collect()
        }
    }
}

/// Builds the coarse space described by `spec`.
pub fn build_coarse(ctx: &CoarseContext, spec: &CoarseSpec) -> Result<CoarseSpace> {
    let counts = enrichment_counts(ctx, spec)?;
    let lambda_m_plus_1 = ctx
        .spectra
        .iter()
        .zip(&counts)
        .map(|(s, &m)| s.lambda_after(m))
        .fold(f64::INFINITY, f64::min);

    let vertices = ctx.partition.coarse_vertices();
    let mut tags: Vec<CoarseKind> = vertices.iter().map(|&node| CoarseKind::Vertex { node }).collect();
    let mut enrichment_offsets = Vec::with_capacity(counts.len());
    for (g, &m) in counts.iter().enumerate() {
        enrichment_offsets.push(tags.len());
        for k in 1..=m {
            tags.push(match spec.kind {
                CoarseType::Nshem(family) => CoarseKind::NonSpectral { family, interface: g, k },
                _ => CoarseKind::Spectral { interface: g, k },
            });
        }
    }

    let built: Vec<(SparseVector, Vec<usize>)> = tags
        .par_iter()
        .map(|tag| match *tag {
            CoarseKind::Vertex { node } => vertex_hat(ctx, node),
            CoarseKind::Spectral { interface, k } => interface_lift(ctx, interface, &ctx.spectra[interface].eigenvectors[k - 1]),
            CoarseKind::NonSpectral { family, interface, k } => {
                interface_lift(ctx, interface, &nonspectral_trace(&ctx.forms[interface], family, k))
            }
        })
        .collect::<Result<_>>()?;
    let (basis, supports) = built.into_iter().unzip();

    Ok(CoarseSpace {
        spec: *spec,
        basis,
        tags,
        supports,
        enrichment: counts,
        enrichment_offsets,
        num_vertices: vertices.len(),
        lambda_m_plus_1,
    })
}

/// Largest interior residual `|(A v)_j|` over dofs strictly inside a subdomain,
/// relative to `||A||_inf ||v||_inf`. `a` acts on interior dofs.
pub fn harmonic_residual(a: &SparseMatrix, mesh: &Mesh, partition: &Partition, v: &SparseVector) -> f64 {
    let x = v.to_dense();
    let y = a.spmv(&x).expect("sizes agree");
    let a_norm = (0..a.n_rows())
        .map(|i| a.row(i).1.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let v_norm = v.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if v_norm == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for s in 0..partition.num_subdomains() {
        for node in partition.interior_nodes(mesh, s) {
            worst = worst.max(y[mesh.dof(node).unwrap()].abs());
        }
    }
    worst / (a_norm * v_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{CoefficientField, Inclusion, Rect};
    use crate::problem::Problem;

    fn unit(n: usize, hc: usize) -> Problem {
        let mesh = Mesh::structured(n).unwrap();
        let field = CoefficientField::uniform(&mesh, 1.0).unwrap();
        Problem::new(mesh, field, hc).unwrap()
    }

    fn channels(n: usize, hc: usize, contrast: f64) -> Problem {
        let mesh = Mesh::structured(n).unwrap();
        let h = 1.0 / n as f64;
        let field = CoefficientField::from_inclusions(
            &mesh,
            1.0,
            &[
                Inclusion {
                    rect: Rect::new(0.0, 1.0, 3.0 * h, 5.0 * h),
                    value: contrast,
                },
                Inclusion {
                    rect: Rect::new(0.0, 1.0, 0.5 + 2.0 * h, 0.5 + 3.0 * h),
                    value: contrast,
                },
            ],
        )
        .unwrap();
        Problem::new(mesh, field, hc).unwrap()
    }

    #[test]
    fn unit_hats_have_linear_traces() {
        let p = unit(16, 4);
        let ctx = p.context();
        let hats = build_multiscale_basis(&ctx).unwrap();
        assert_eq!(hats.len(), 9);
        for (hat, &x) in hats.iter().zip(p.partition.coarse_vertices()) {
            assert_eq!(hat.get(p.mesh.dof(x).unwrap()), 1.0);
            for &y in p.partition.coarse_vertices() {
                if y != x {
                    assert_eq!(hat.get(p.mesh.dof(y).unwrap()), 0.0);
                }
            }
            for g in p.partition.interfaces().iter().filter(|g| g.endpoints.contains(&x)) {
                let from_start = g.endpoints[0] == x;
                for (i, &v) in g.nodes.iter().enumerate() {
                    let t = (i + 1) as f64 / 4.0;
                    let expect = if from_start { 1.0 - t } else { t };
                    assert!((hat.get(p.mesh.dof(v).unwrap()) - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn hats_sum_to_one_away_from_boundary() {
        let p = channels(16, 4, 1e4);
        let hats = build_multiscale_basis(&p.context()).unwrap();
        let mut sum = vec![0.0; p.mesh.num_dofs()];
        for h in &hats {
            h.add_to(1.0, &mut sum);
        }
        // subdomains (1,1), (2,1), (1,2), (2,2) avoid the outer boundary
        for s in [5, 6, 9, 10] {
            for v in p.partition.interior_nodes(&p.mesh, s) {
                assert!((sum[p.mesh.dof(v).unwrap()] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_coefficient_hats_match_unit_hats() {
        let a = unit(16, 4);
        let mesh = Mesh::structured(16).unwrap();
        let field = CoefficientField::uniform(&mesh, 250.0).unwrap();
        let b = Problem::new(mesh, field, 4).unwrap();
        let ha = build_multiscale_basis(&a.context()).unwrap();
        let hb = build_multiscale_basis(&b.context()).unwrap();
        for (x, y) in ha.iter().zip(&hb) {
            assert_eq!(x.indices, y.indices);
            for (p, q) in x.values.iter().zip(&y.values) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn high_contrast_segment_flattens_trace() {
        // a strip of coefficient 1e6 covering three segments of a vertical interface
        let mesh = Mesh::structured(16).unwrap();
        let h = 1.0 / 16.0;
        let field = CoefficientField::from_inclusions(
            &mesh,
            1.0,
            &[Inclusion {
                rect: Rect::new(0.0, 1.0, 5.0 * h, 7.0 * h),
                value: 1e6,
            }],
        )
        .unwrap();
        let p = Problem::new(mesh, field, 4).unwrap();
        let g = &p.partition.interfaces()[0];
        let trace = p.forms[g.id].solve(&[0.0; 3], 1.0, 0.0);
        let path: Vec<f64> = std::iter::once(1.0).chain(trace).chain(std::iter::once(0.0)).collect();
        for (s, w) in path.windows(2).enumerate() {
            if p.forms[g.id].segment_coeffs[s] == 1e6 {
                assert!((w[0] - w[1]).abs() <= 1e-4);
            }
        }
    }

    #[test]
    fn all_vectors_discrete_harmonic() {
        let p = channels(32, 8, 1e6);
        let ctx = p.context();
        for spec in [
            CoarseSpec::ms(),
            CoarseSpec::shem(2),
            CoarseSpec::nshem(GFamily::Alternating, 2),
            CoarseSpec::nshem(GFamily::Hierarchical, 3),
        ] {
            let c = build_coarse(&ctx, &spec).unwrap();
            for v in &c.basis {
                assert!(harmonic_residual(&p.system.a, &p.mesh, &p.partition, v) <= 1e-10);
            }
        }
    }

    #[test]
    fn enrichment_vanishes_at_vertices_and_outside() {
        let p = channels(16, 4, 100.0);
        let c = build_coarse(&p.context(), &CoarseSpec::shem(3)).unwrap();
        for (v, (tag, subs)) in c.basis.iter().zip(c.tags.iter().zip(&c.supports)) {
            if let CoarseKind::Spectral { .. } = tag {
                for &x in p.partition.coarse_vertices() {
                    assert_eq!(v.get(p.mesh.dof(x).unwrap()), 0.0);
                }
                for &d in &v.indices {
                    let node = p.mesh.dof_node(d);
                    assert!(subs.iter().any(|&s| p.partition.in_closure(&p.mesh, s, node)));
                }
            }
        }
    }

    #[test]
    fn dimensions() {
        let p = unit(8, 4);
        let ctx = p.context();
        let ohem = build_ohem(&ctx).unwrap();
        assert_eq!(ohem.dim(), 13);
        assert_eq!(ohem.lambda_m_plus_1, f64::INFINITY);
        let p = unit(32, 8);
        let ctx = p.context();
        let skeleton = p.partition.num_vertices() + p.partition.interfaces().iter().map(|g| g.len()).sum::<usize>();
        assert_eq!(build_ohem(&ctx).unwrap().dim(), skeleton);
        let s2 = build_coarse(&ctx, &CoarseSpec::shem(2)).unwrap();
        assert_eq!(s2.dim(), 9 + 24 * 2);
        assert_eq!(s2.enrichment_vector(3, 2), &s2.basis[9 + 3 * 2 + 1]);
        assert!(matches!(build_coarse(&ctx, &CoarseSpec::shem(8)), Err(Error::Usage(_))));
    }

    #[test]
    fn first_spectral_function_is_single_bump() {
        let p = unit(16, 8);
        let ctx = p.context();
        let c = build_coarse(&ctx, &CoarseSpec::shem(1)).unwrap();
        let g = &p.partition.interfaces()[0];
        let v = c.enrichment_vector(0, 1);
        let trace: Vec<f64> = g.nodes.iter().map(|&n| v.get(p.mesh.dof(n).unwrap())).collect();
        let mid = trace.len() / 2;
        assert!(trace.iter().all(|&x| x > 0.0));
        assert!(trace[..mid].windows(2).all(|w| w[0] < w[1]));
        assert!(trace[mid..].windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn first_nonspectral_traces_symmetric() {
        let p = unit(16, 8);
        for family in [GFamily::Alternating, GFamily::Sine, GFamily::Hierarchical] {
            let t = nonspectral_trace(&p.forms[0], family, 1);
            let m = t.len();
            for i in 0..m {
                assert!((t[i] - t[m - 1 - i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adaptive_counts_follow_threshold() {
        let p = channels(32, 8, 1e6);
        let ctx = p.context();
        let c = build_coarse(&ctx, &CoarseSpec::shem_adaptive(1.0 / 32.0, false)).unwrap();
        for (s, &m) in p.spectra.iter().zip(&c.enrichment) {
            assert_eq!(m, s.eigenvalues.iter().filter(|&&l| l <= 1.0 / 32.0).count());
        }
        let inf = build_coarse(&ctx, &CoarseSpec::shem_adaptive(f64::INFINITY, true)).unwrap();
        assert_eq!(inf.dim(), build_ohem(&ctx).unwrap().dim());
        let rel = CoarseSpec {
            kind: CoarseType::Shem,
            enrichment: Enrichment::Adaptive {
                tau: 0.5,
                min_one: false,
                laplacian_relative: true,
            },
        };
        // half of the unit-coefficient lambda_1 keeps only channel modes
        let c = build_coarse(&ctx, &rel).unwrap();
        assert!(c.enrichment.iter().any(|&m| m > 0));
        assert!(c.enrichment.iter().any(|&m| m == 0));
    }
}
