//! P1 stiffness and load assembly with homogeneous Dirichlet elimination.

use crate::linalg::SparseMatrix;
use crate::mesh::{CoefficientField, Mesh};
use crate::{Error, Result};

/// Interior-node <-> degree-of-freedom maps.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub node_to_dof: Vec<Option<usize>>,
    pub dof_to_node: Vec<usize>,
}

impl DofMap {
    pub fn from_mesh(mesh: &Mesh) -> Self {
        let dof_to_node = mesh.interior_nodes();
        let mut node_to_dof = vec![None; mesh.num_nodes()];
        for (d, &v) in dof_to_node.iter().enumerate() {
            node_to_dof[v] = Some(d);
        }
        DofMap {
            node_to_dof,
            dof_to_node,
        }
    }

    pub fn len(&self) -> usize {
        self.dof_to_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dof_to_node.is_empty()
    }

    /// Embeds a dof vector into a node vector (zero on the boundary).
    pub fn to_nodes(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.node_to_dof.len()];
        for (d, &v) in self.dof_to_node.iter().enumerate() {
            out[v] = x[d];
        }
        out
    }

    pub fn to_dofs(&self, nodal: &[f64]) -> Vec<f64> {
        self.dof_to_node.iter().map(|&v| nodal[v]).collect()
    }
}

/// SPD system over interior nodes.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub dofs: DofMap,
}

impl LinearSystem {
    pub fn size(&self) -> usize {
        self.b.len()
    }
}

/// Element stiffness `area * grad(phi_a) . grad(phi_b)` of a P1 triangle.
pub(crate) fn element_stiffness(p: [[f64; 2]; 3]) -> [[f64; 3]; 3] {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let area = 0.5 * det.abs();
    // grad phi_k = (y_{k+1} - y_{k+2}, x_{k+2} - x_{k+1}) / det
    let grads: [[f64; 2]; 3] = std::array::from_fn(|k| {
        let (a, b) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det]
    });
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
        }
    }
    k
}

/// Stiffness matrix over all nodes, `A = sum_K alpha_K A_K`.
pub fn assemble_stiffness(mesh: &Mesh, field: &CoefficientField) -> Result<SparseMatrix> {
    if field.len() != mesh.num_elements() {
        return Err(Error::usage(format!(
            "coefficient field has {} values for {} elements",
            field.len(),
            mesh.num_elements()
        )));
    }
    let mut triplets = Vec::with_capacity(9 * mesh.num_elements());
    for (e, tri) in mesh.triangles().iter().enumerate() {
        let pts = tri.map(|v| mesh.vertices()[v]);
        let k = element_stiffness(pts);
        let alpha = field.value(e);
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((tri[a], tri[b], alpha * k[a][b]));
            }
        }
    }
    SparseMatrix::from_triplets(mesh.num_nodes(), mesh.num_nodes(), &triplets)
}

/// Load vector for constant `f`: each node receives `f` times a third of its
/// incident triangle areas (exact for constant data).
pub fn assemble_load(mesh: &Mesh, f: f64) -> Vec<f64> {
    let mut b = vec![0.0; mesh.num_nodes()];
    for (e, tri) in mesh.triangles().iter().enumerate() {
        let share = f * mesh.area(e) / 3.0;
        for &v in tri {
            b[v] += share;
        }
    }
    b
}

/// Removes boundary rows and columns.
pub fn apply_dirichlet(a_full: &SparseMatrix, b_full: &[f64], mesh: &Mesh) -> LinearSystem {
    let dofs = DofMap::from_mesh(mesh);
    let a = a_full.submatrix(&dofs.dof_to_node, &dofs.dof_to_node);
    let b = dofs.to_dofs(b_full);
    LinearSystem { a, b, dofs }
}

/// Assembles the Dirichlet system for a constant source.
pub fn assemble_system(mesh: &Mesh, field: &CoefficientField, f: f64) -> Result<(SparseMatrix, LinearSystem)> {
    let a_full = assemble_stiffness(mesh, field)?;
    let b_full = assemble_load(mesh, f);
    let system = apply_dirichlet(&a_full, &b_full, mesh);
    Ok((a_full, system))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdFactorization;
    use crate::mesh::{Inclusion, Rect};

    #[test]
    fn element_matrix_of_right_triangle() {
        // lower triangle (LL, LR, UR) with unit legs, gradients by hand:
        // LL (-1, 0), LR (1, -1), UR (0, 1)
        let k = element_stiffness([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let expect = [[0.5, -0.5, 0.0], [-0.5, 1.0, -0.5], [0.0, -0.5, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn five_point_stencil_for_unit_coefficient() {
        let m = Mesh::structured(2).unwrap();
        let a = assemble_stiffness(&m, &CoefficientField::uniform(&m, 1.0).unwrap()).unwrap();
        let c = m.node_id(1, 1);
        assert!((a.get(c, c) - 4.0).abs() < 1e-14);
        for (dc, dr) in [(0, 1), (2, 1), (1, 0), (1, 2)] {
            assert!((a.get(c, m.node_id(dc, dr)) + 1.0).abs() < 1e-14);
        }
        for (dc, dr) in [(0, 0), (2, 2), (0, 2), (2, 0)] {
            assert!(a.get(c, m.node_id(dc, dr)).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_in_coefficient() {
        let m = Mesh::structured(5).unwrap();
        let f = CoefficientField::from_inclusions(
            &m,
            1.0,
            &[Inclusion {
                rect: Rect::new(0.2, 0.6, 0.0, 0.4),
                value: 30.0,
            }],
        )
        .unwrap();
        let a = assemble_stiffness(&m, &f).unwrap();
        let a3 = assemble_stiffness(&m, &f.scaled(3.0)).unwrap();
        for (p, q) in a.values().iter().zip(a3.values()) {
            assert!((3.0 * p - q).abs() <= 1e-13 * q.abs().max(1.0));
        }
    }

    #[test]
    fn rows_sum_to_zero_and_symmetric() {
        let m = Mesh::structured(6).unwrap();
        let vals: Vec<f64> = (0..m.num_elements()).map(|e| 1.0 + (e % 7) as f64 * 10.0).collect();
        let a = assemble_stiffness(&m, &CoefficientField::from_values(vals).unwrap()).unwrap();
        assert!(a.is_symmetric());
        for i in 0..a.n_rows() {
            let s: f64 = a.row(i).1.iter().sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn load_vector() {
        let m = Mesh::structured(2).unwrap();
        assert!(assemble_load(&m, 0.0).iter().all(|&v| v == 0.0));
        let b = assemble_load(&m, 1.0);
        assert!((b[m.node_id(1, 1)] - 0.25).abs() < 1e-15);
        let m = Mesh::structured(9).unwrap();
        let total: f64 = assemble_load(&m, 2.5).iter().sum();
        assert!((total - 2.5).abs() < 1e-13);
    }

    #[test]
    fn smallest_system() {
        let m = Mesh::structured(2).unwrap();
        let (_, sys) = assemble_system(&m, &CoefficientField::uniform(&m, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!(sys.size(), 1);
        assert!((sys.a.get(0, 0) - 4.0).abs() < 1e-14);
        assert!((sys.b[0] - 0.25).abs() < 1e-15);
        let u = SpdFactorization::new(&sys.a).unwrap().solve(&sys.b);
        assert!((u[0] - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn square_symmetry_of_solution() {
        let m = Mesh::structured(4).unwrap();
        let (_, sys) = assemble_system(&m, &CoefficientField::uniform(&m, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!(sys.size(), 9);
        let u = SpdFactorization::new(&sys.a).unwrap().solve(&sys.b);
        let at = |c: usize, r: usize| u[(r - 1) * 3 + (c - 1)];
        for r in 1..=3 {
            for c in 1..=3 {
                let v = at(c, r);
                for w in [at(4 - c, r), at(c, 4 - r), at(r, c), at(4 - r, 4 - c)] {
                    assert!((v - w).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn high_contrast_stays_spd() {
        let m = Mesh::structured(8).unwrap();
        let f = CoefficientField::from_inclusions(
            &m,
            1.0,
            &[Inclusion {
                rect: Rect::new(0.0, 1.0, 0.4, 0.6),
                value: 1e6,
            }],
        )
        .unwrap();
        let (_, sys) = assemble_system(&m, &f, 1.0).unwrap();
        assert!(SpdFactorization::new(&sys.a).is_ok());
    }

    #[test]
    fn linear_functions_are_discrete_harmonic() {
        let m = Mesh::structured(7).unwrap();
        let a = assemble_stiffness(&m, &CoefficientField::uniform(&m, 1.0).unwrap()).unwrap();
        let u: Vec<f64> = m.vertices().iter().map(|p| 0.3 + 2.0 * p[0] - 1.5 * p[1]).collect();
        let r = a.spmv(&u).unwrap();
        for v in m.interior_nodes() {
            assert!(r[v].abs() < 1e-12);
        }
    }
}
