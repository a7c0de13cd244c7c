//! Discrete harmonic extension into subdomain interiors.

use rayon::prelude::*;

use crate::linalg::{SparseMatrix, SpdFactorization};
use crate::mesh::Mesh;
use crate::partition::Partition;
use crate::{Error, Result};

#[derive(Clone, Debug)]
struct LocalHarmonic {
    interior: Vec<usize>,
    boundary: Vec<usize>,
    a_ib: SparseMatrix,
    factor: SpdFactorization,
}

/// Per-subdomain factorizations of the interior block `A_II`, built once and
/// reused for every extension.
#[derive(Clone, Debug)]
pub struct HarmonicExtender {
    locals: Vec<LocalHarmonic>,
}

impl HarmonicExtender {
    /// `a_full` is the stiffness matrix over all mesh nodes.
    pub fn new(mesh: &Mesh, partition: &Partition, a_full: &SparseMatrix) -> Result<Self> {
        let locals = (0..partition.num_subdomains())
            .into_par_iter()
            .map(|s| {
                let interior = partition.interior_nodes(mesh, s);
                let boundary = partition.boundary_nodes(mesh, s);
                let a_ii = a_full.submatrix(&interior, &interior);
                let a_ib = a_full.submatrix(&interior, &boundary);
                let factor = SpdFactorization::new(&a_ii)
                    .map_err(|e| e.with_context(format!("interior block of subdomain {s}")))?;
                Ok(LocalHarmonic {
                    interior,
                    boundary,
                    a_ib,
                    factor,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HarmonicExtender { locals })
    }

    pub fn num_subdomains(&self) -> usize {
        self.locals.len()
    }

    pub fn interior_nodes(&self, s: usize) -> &[usize] {
        &self.locals[s].interior
    }

    /// Boundary nodes of subdomain `s`; `extend` expects values in this order.
    pub fn boundary_nodes(&self, s: usize) -> &[usize] {
        &self.locals[s].boundary
    }

    /// Interior values of the discrete harmonic function with boundary values `g`,
    /// i.e. the solution of `A_II x = -A_IB g`.
    pub fn extend(&self, s: usize, g: &[f64]) -> Result<Vec<f64>> {
        let local = &self.locals[s];
        if g.len() != local.boundary.len() {
            return Err(Error::usage(format!(
                "subdomain {s} has {} boundary nodes, got {} values",
                local.boundary.len(),
                g.len()
            )));
        }
        let mut x = local.a_ib.spmv(g)?;
        for v in &mut x {
            *v = -*v;
        }
        local.factor.solve_in_place(&mut x);
        Ok(x)
    }

    /// Overwrites the interior of subdomain `s` in a nodal vector with the
    /// harmonic extension of its boundary values.
    pub fn extend_nodal(&self, s: usize, nodal: &mut [f64]) {
        let local = &self.locals[s];
        let g: Vec<f64> = local.boundary.iter().map(|&v| nodal[v]).collect();
        let x = self.extend(s, &g).expect("boundary length matches by construction");
        for (&v, xi) in local.interior.iter().zip(x) {
            nodal[v] = xi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_stiffness, element_stiffness};
    use crate::mesh::{CoefficientField, Inclusion, Rect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(contrast: f64) -> (Mesh, CoefficientField, Partition, HarmonicExtender) {
        let mesh = Mesh::structured(16).unwrap();
        let field = CoefficientField::from_inclusions(
            &mesh,
            1.0,
            &[Inclusion {
                rect: Rect::new(0.1, 0.9, 0.3, 0.4),
                value: contrast,
            }],
        )
        .unwrap();
        let part = Partition::new(&mesh, 4).unwrap();
        let a = assemble_stiffness(&mesh, &field).unwrap();
        let ext = HarmonicExtender::new(&mesh, &part, &a).unwrap();
        (mesh, field, part, ext)
    }

    fn local_energy(mesh: &Mesh, field: &CoefficientField, part: &Partition, s: usize, u: &[f64]) -> f64 {
        part.subdomain_elements(mesh, s)
            .into_iter()
            .map(|e| {
                let t = mesh.triangles()[e];
                let k = element_stiffness(t.map(|v| mesh.vertices()[v]));
                let mut sum = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        sum += k[a][b] * u[t[a]] * u[t[b]];
                    }
                }
                field.value(e) * sum
            })
            .sum()
    }

    #[test]
    fn constants_are_harmonic() {
        let (_, _, _, ext) = setup(1e6);
        for s in 0..ext.num_subdomains() {
            let g = vec![1.0; ext.boundary_nodes(s).len()];
            for x in ext.extend(s, &g).unwrap() {
                assert!((x - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn energy_minimality() {
        let (mesh, field, part, ext) = setup(100.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = 5;
        let mut u = vec![0.0; mesh.num_nodes()];
        for &v in ext.boundary_nodes(s) {
            u[v] = rng.gen_range(-1.0..1.0);
        }
        ext.extend_nodal(s, &mut u);
        let e0 = local_energy(&mesh, &field, &part, s, &u);
        for _ in 0..100 {
            let mut w = u.clone();
            for &v in ext.interior_nodes(s) {
                w[v] += rng.gen_range(-0.5..0.5);
            }
            assert!(e0 <= local_energy(&mesh, &field, &part, s, &w) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn linearity() {
        let (_, _, _, ext) = setup(1e4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = 6;
        let nb = ext.boundary_nodes(s).len();
        let g1: Vec<f64> = (0..nb).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g2: Vec<f64> = (0..nb).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sum: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a + b).collect();
        let (x1, x2, x12) = (
            ext.extend(s, &g1).unwrap(),
            ext.extend(s, &g2).unwrap(),
            ext.extend(s, &sum).unwrap(),
        );
        for i in 0..x1.len() {
            assert!((x1[i] + x2[i] - x12[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_boundary_length() {
        let (_, _, _, ext) = setup(1.0);
        assert!(matches!(ext.extend(0, &[1.0]), Err(Error::Usage(_))));
    }
}
