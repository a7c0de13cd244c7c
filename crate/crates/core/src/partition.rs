//! Square nonoverlapping subdomains, their interfaces, overlap extension,
//! weighted interface forms and the partition of unity.

use crate::linalg::DenseMatrix;
use crate::mesh::{CoefficientField, Mesh};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Shared edge along `x = const`, nodes ordered bottom to top.
    Vertical,
    /// Shared edge along `y = const`, nodes ordered left to right.
    Horizontal,
}

/// Open edge shared by two edge-adjacent subdomains.
#[derive(Clone, Debug, PartialEq)]
pub struct Interface {
    pub id: usize,
    /// Subdomain to the left of / below the edge.
    pub sub_lo: usize,
    /// Subdomain to the right of / above the edge.
    pub sub_hi: usize,
    pub orientation: Orientation,
    /// Interior nodes of the edge, from the lower-left endpoint on.
    pub nodes: Vec<usize>,
    /// Coarse vertices bounding the edge: `[lower-left, upper-right]`.
    pub endpoints: [usize; 2],
}

impl Interface {
    /// Endpoint, interior nodes, endpoint.
    pub fn full_path(&self) -> Vec<usize> {
        let mut path = Vec::with_capacity(self.nodes.len() + 2);
        path.push(self.endpoints[0]);
        path.extend(&self.nodes);
        path.push(self.endpoints[1]);
        path
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Decomposition of the structured mesh into `per_side^2` square subdomains of
/// `h_cells x h_cells` fine cells. Subdomain `(I, J)` has id `J * per_side + I`.
#[derive(Clone, Debug)]
pub struct Partition {
    n: usize,
    h_cells: usize,
    per_side: usize,
    interfaces: Vec<Interface>,
    coarse_vertices: Vec<usize>,
    h_sub: Vec<f64>,
}

impl Partition {
    pub fn new(mesh: &Mesh, h_cells: usize) -> Result<Partition> {
        let n = mesh.n();
        if h_cells == 0 || n % h_cells != 0 {
            return Err(Error::usage(format!(
                "{n} cells per side are not divisible into subdomains of {h_cells} cells"
            )));
        }
        let per_side = n / h_cells;
        if per_side < 2 {
            return Err(Error::usage("partition needs at least 2 subdomains per side"));
        }
        let mut interfaces = Vec::new();
        for jj in 0..per_side {
            for ii in 0..per_side {
                let s = jj * per_side + ii;
                if ii + 1 < per_side {
                    let col = (ii + 1) * h_cells;
                    let (r0, r1) = (jj * h_cells, (jj + 1) * h_cells);
                    interfaces.push(Interface {
                        id: interfaces.len(),
                        sub_lo: s,
                        sub_hi: s + 1,
                        orientation: Orientation::Vertical,
                        nodes: (r0 + 1..r1).map(|r| mesh.node_id(col, r)).collect(),
                        endpoints: [mesh.node_id(col, r0), mesh.node_id(col, r1)],
                    });
                }
                if jj + 1 < per_side {
                    let row = (jj + 1) * h_cells;
                    let (c0, c1) = (ii * h_cells, (ii + 1) * h_cells);
                    interfaces.push(Interface {
                        id: interfaces.len(),
                        sub_lo: s,
                        sub_hi: s + per_side,
                        orientation: Orientation::Horizontal,
                        nodes: (c0 + 1..c1).map(|c| mesh.node_id(c, row)).collect(),
                        endpoints: [mesh.node_id(c0, row), mesh.node_id(c1, row)],
                    });
                }
            }
        }
        let mut coarse_vertices = Vec::new();
        for jj in 1..per_side {
            for ii in 1..per_side {
                coarse_vertices.push(mesh.node_id(ii * h_cells, jj * h_cells));
            }
        }
        let mut part = Partition {
            n,
            h_cells,
            per_side,
            interfaces,
            coarse_vertices,
            h_sub: Vec::new(),
        };
        part.h_sub = (0..part.num_subdomains())
            .map(|s| {
                part.subdomain_elements(mesh, s)
                    .into_iter()
                    .filter(|&e| mesh.triangles()[e].iter().any(|&v| part.on_subdomain_boundary(mesh, s, v)))
                    .map(|e| mesh.diameter(e))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(part)
    }

    pub fn h_cells(&self) -> usize {
        self.h_cells
    }

    pub fn per_side(&self) -> usize {
        self.per_side
    }

    pub fn num_subdomains(&self) -> usize {
        self.per_side * self.per_side
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    /// Interior coarse vertices (cross points not on the outer boundary).
    pub fn coarse_vertices(&self) -> &[usize] {
        &self.coarse_vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.coarse_vertices.len()
    }

    /// Minimum diameter of the triangles touching the subdomain boundary.
    pub fn h_sub(&self, s: usize) -> f64 {
        self.h_sub[s]
    }

    /// `(I, J)` block coordinates of a subdomain.
    pub fn block(&self, s: usize) -> (usize, usize) {
        (s % self.per_side, s / self.per_side)
    }

    fn node_ranges(&self, s: usize) -> ((usize, usize), (usize, usize)) {
        let (ii, jj) = self.block(s);
        let h = self.h_cells;
        ((ii * h, (ii + 1) * h), (jj * h, (jj + 1) * h))
    }

    pub fn subdomain_of_element(&self, mesh: &Mesh, e: usize) -> usize {
        let (i, j) = mesh.element_cell(e);
        (j / self.h_cells) * self.per_side + i / self.h_cells
    }

    pub fn subdomain_elements(&self, mesh: &Mesh, s: usize) -> Vec<usize> {
        let ((c0, c1), (r0, r1)) = self.node_ranges(s);
        let mut out = Vec::with_capacity(2 * self.h_cells * self.h_cells);
        for j in r0..r1 {
            for i in c0..c1 {
                let sq = j * mesh.n() + i;
                out.push(2 * sq);
                out.push(2 * sq + 1);
            }
        }
        out
    }

    pub fn in_closure(&self, mesh: &Mesh, s: usize, node: usize) -> bool {
        let ((c0, c1), (r0, r1)) = self.node_ranges(s);
        let (c, r) = mesh.node_grid(node);
        (c0..=c1).contains(&c) && (r0..=r1).contains(&r)
    }

    pub fn on_subdomain_boundary(&self, mesh: &Mesh, s: usize, node: usize) -> bool {
        let ((c0, c1), (r0, r1)) = self.node_ranges(s);
        let (c, r) = mesh.node_grid(node);
        self.in_closure(mesh, s, node) && (c == c0 || c == c1 || r == r0 || r == r1)
    }

    /// Nodes strictly inside the subdomain, lexicographic.
    pub fn interior_nodes(&self, mesh: &Mesh, s: usize) -> Vec<usize> {
        let ((c0, c1), (r0, r1)) = self.node_ranges(s);
        (r0 + 1..r1)
            .flat_map(|r| (c0 + 1..c1).map(move |c| (c, r)))
            .map(|(c, r)| mesh.node_id(c, r))
            .collect()
    }

    /// Nodes on the subdomain boundary (including those on the outer boundary), lexicographic.
    pub fn boundary_nodes(&self, mesh: &Mesh, s: usize) -> Vec<usize> {
        let ((c0, c1), (r0, r1)) = self.node_ranges(s);
        (r0..=r1)
            .flat_map(|r| (c0..=c1).map(move |c| (c, r)))
            .filter(|&(c, r)| c == c0 || c == c1 || r == r0 || r == r1)
            .map(|(c, r)| mesh.node_id(c, r))
            .collect()
    }

    /// Subdomains whose closure contains the node.
    pub fn owners(&self, mesh: &Mesh, node: usize) -> Vec<usize> {
        let (c, r) = mesh.node_grid(node);
        let h = self.h_cells;
        let span = |x: usize| -> Vec<usize> {
            let mut v = Vec::with_capacity(2);
            if x % h == 0 && x > 0 {
                v.push(x / h - 1);
            }
            if x / h < self.per_side {
                v.push(x / h);
            }
            v
        };
        let mut out = Vec::new();
        for jj in span(r) {
            for ii in span(c) {
                out.push(jj * self.per_side + ii);
            }
        }
        out.sort_unstable();
        out
    }

    /// Interfaces on the boundary of subdomain `s`.
    pub fn interfaces_of(&self, s: usize) -> Vec<usize> {
        self.interfaces
            .iter()
            .filter(|g| g.sub_lo == s || g.sub_hi == s)
            .map(|g| g.id)
            .collect()
    }

    /// Interior nodes of the overlapping subdomains: each subdomain grown by
    /// `delta_layers` mesh cells in every direction, keeping nodes strictly
    /// inside the grown square and inside the domain.
    pub fn extend_overlap(&self, mesh: &Mesh, delta_layers: usize) -> OverlapSet {
        let n = self.n as isize;
        let d = delta_layers as isize;
        let sets = (0..self.num_subdomains())
            .map(|s| {
                let ((c0, c1), (r0, r1)) = self.node_ranges(s);
                let lo = |a: usize| (a as isize - d + 1).max(1) as usize;
                let hi = |b: usize| (b as isize + d - 1).min(n - 1) as usize;
                let (cl, ch, rl, rh) = (lo(c0), hi(c1), lo(r0), hi(r1));
                let mut dofs = Vec::new();
                if cl <= ch && rl <= rh {
                    for r in rl..=rh {
                        for c in cl..=ch {
                            dofs.push(mesh.dof(mesh.node_id(c, r)).expect("interior node"));
                        }
                    }
                }
                dofs
            })
            .collect();
        OverlapSet { delta_layers, sets }
    }
}

pub fn build_partition(mesh: &Mesh, h_cells: usize) -> Result<Partition> {
    Partition::new(mesh, h_cells)
}

/// Per-subdomain overlapping dof sets (sorted).
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapSet {
    pub delta_layers: usize,
    pub sets: Vec<Vec<usize>>,
}

impl OverlapSet {
    /// Arbitrary dof sets, e.g. a single set covering everything.
    pub fn from_sets(sets: Vec<Vec<usize>>) -> OverlapSet {
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        OverlapSet {
            delta_layers: 0,
            sets,
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Interface weights `beta_k`: coefficient summed over every element touching node `k`.
pub fn compute_beta(mesh: &Mesh, field: &CoefficientField, partition: &Partition) -> Vec<Vec<f64>> {
    partition
        .interfaces()
        .iter()
        .map(|g| g.nodes.iter().map(|&v| node_beta(mesh, field, v)).collect())
        .collect()
}

pub(crate) fn node_beta(mesh: &Mesh, field: &CoefficientField, node: usize) -> f64 {
    mesh.node_elements(node).iter().map(|&e| field.value(e)).sum()
}

/// Weighted interface forms of one interface.
///
/// The stiffness is the 1D P1 form on the edge's segments with coefficient
/// `max(alpha_lo, alpha_hi)` per segment, restricted to interior edge nodes;
/// the mass is `diag(beta_k / h_i)`.
#[derive(Clone, Debug)]
pub struct TraceForms {
    pub interface: usize,
    /// Segment length.
    pub h: f64,
    /// `h_i` of the lower/left subdomain.
    pub h_sub: f64,
    /// One-sided coefficients per segment (`len = M + 1`), from `sub_lo` and `sub_hi`.
    pub coeff_lo: Vec<f64>,
    pub coeff_hi: Vec<f64>,
    /// Per-segment `max(coeff_lo, coeff_hi)`.
    pub segment_coeffs: Vec<f64>,
    /// Diagonal of the mass form, `beta_k / h_i`.
    pub weights: Vec<f64>,
}

impl TraceForms {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn energy_with(&self, coeffs: &[f64], v: &[f64]) -> f64 {
        let m = self.dim();
        (0..=m)
            .map(|s| {
                let left = if s == 0 { 0.0 } else { v[s - 1] };
                let right = if s == m { 0.0 } else { v[s] };
                coeffs[s] * (right - left).powi(2) / self.h
            })
            .sum()
    }

    /// `abar(v, v)` for interior trace values (zero at both endpoints).
    pub fn energy(&self, v: &[f64]) -> f64 {
        self.energy_with(&self.segment_coeffs, v)
    }

    /// One-sided energies `(a_lo(v, v), a_hi(v, v))`.
    pub fn one_sided_energies(&self, v: &[f64]) -> (f64, f64) {
        (self.energy_with(&self.coeff_lo, v), self.energy_with(&self.coeff_hi, v))
    }

    /// `b(u, v)`.
    pub fn b_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weights.iter().zip(u).zip(v).map(|((w, a), b)| w * a * b).sum()
    }

    /// Stiffness as a dense `M x M` tridiagonal matrix.
    pub fn stiffness_dense(&self) -> DenseMatrix {
        let m = self.dim();
        let mut a = DenseMatrix::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = (self.segment_coeffs[i] + self.segment_coeffs[i + 1]) / self.h;
            if i + 1 < m {
                a[(i, i + 1)] = -self.segment_coeffs[i + 1] / self.h;
                a[(i + 1, i)] = -self.segment_coeffs[i + 1] / self.h;
            }
        }
        a
    }

    /// Solves `abar(phi, v) = rhs(v)` with prescribed endpoint values.
    pub fn solve(&self, rhs: &[f64], start: f64, end: f64) -> Vec<f64> {
        let m = self.dim();
        if m == 0 {
            return Vec::new();
        }
        let c = &self.segment_coeffs;
        let h = self.h;
        let mut diag: Vec<f64> = (0..m).map(|i| (c[i] + c[i + 1]) / h).collect();
        let off: Vec<f64> = (0..m - 1).map(|i| -c[i + 1] / h).collect();
        let mut r = rhs.to_vec();
        r[0] += c[0] / h * start;
        r[m - 1] += c[m] / h * end;
        // Thomas algorithm; the matrix is SPD so no pivoting is needed
        for i in 1..m {
            let w = off[i - 1] / diag[i - 1];
            diag[i] -= w * off[i - 1];
            r[i] -= w * r[i - 1];
        }
        let mut x = vec![0.0; m];
        x[m - 1] = r[m - 1] / diag[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = (r[i] - off[i] * x[i + 1]) / diag[i];
        }
        x
    }
}

pub fn build_trace_forms(
    mesh: &Mesh,
    field: &CoefficientField,
    partition: &Partition,
    interface: &Interface,
) -> TraceForms {
    let path = interface.full_path();
    let mut coeff_lo = Vec::with_capacity(path.len() - 1);
    let mut coeff_hi = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for e in mesh.edge_elements(w[0], w[1]) {
            let s = partition.subdomain_of_element(mesh, e);
            if s == interface.sub_lo {
                lo = field.value(e);
            } else if s == interface.sub_hi {
                hi = field.value(e);
            }
        }
        coeff_lo.push(lo);
        coeff_hi.push(hi);
    }
    let segment_coeffs = coeff_lo.iter().zip(&coeff_hi).map(|(a, b)| a.max(*b)).collect();
    let h_sub = partition.h_sub(interface.sub_lo);
    let weights = interface
        .nodes
        .iter()
        .map(|&v| node_beta(mesh, field, v) / h_sub)
        .collect();
    TraceForms {
        interface: interface.id,
        h: mesh.h(),
        h_sub,
        coeff_lo,
        coeff_hi,
        segment_coeffs,
        weights,
    }
}

/// Nodal partition of unity on interior dofs: a node in the closure of `k`
/// subdomains gets weight `1/k` in each of them (1 inside a subdomain, 1/2 on
/// an interface, 1/4 at a cross point).
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    /// Per subdomain, sorted `(dof, weight)` pairs with nonzero weight.
    pub weights: Vec<Vec<(usize, f64)>>,
}

impl PartitionOfUnity {
    pub fn new(mesh: &Mesh, partition: &Partition, overlap: &OverlapSet) -> Result<Self> {
        if overlap.delta_layers == 0 {
            return Err(Error::usage("partition of unity requires an overlap of at least one layer"));
        }
        let mut weights = vec![Vec::new(); partition.num_subdomains()];
        for node in mesh.interior_nodes() {
            let dof = mesh.dof(node).unwrap();
            let owners = partition.owners(mesh, node);
            let w = 1.0 / owners.len() as f64;
            for s in owners {
                weights[s].push((dof, w));
            }
        }
        Ok(PartitionOfUnity { weights })
    }

    pub fn value(&self, s: usize, dof: usize) -> f64 {
        let w = &self.weights[s];
        w.binary_search_by_key(&dof, |&(d, _)| d).map_or(0.0, |k| w[k].1)
    }
}
