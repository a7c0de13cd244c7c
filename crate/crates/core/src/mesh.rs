//! Structured triangulations of the unit square and piecewise constant
//! coefficient fields.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform triangulation of `(0,1)^2` with `n` cells per side.
///
/// Node `(col, row)` has id `row * (n + 1) + col` and sits at `(col h, row h)`.
/// Grid square `(i, j)` is split along its lower-left to upper-right diagonal
/// into element `2 (j n + i)` = (LL, LR, UR) and element `2 (j n + i) + 1` =
/// (LL, UR, UL).
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    n: usize,
    h: f64,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    on_boundary: Vec<bool>,
    node_elements: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn structured(n: usize) -> Result<Mesh> {
        if n < 2 {
            return Err(Error::usage(format!("mesh needs at least 2 cells per side, got {n}")));
        }
        let h = 1.0 / n as f64;
        let np = n + 1;
        let mut vertices = Vec::with_capacity(np * np);
        let mut on_boundary = Vec::with_capacity(np * np);
        for row in 0..np {
            for col in 0..np {
                vertices.push([col as f64 * h, row as f64 * h]);
                on_boundary.push(row == 0 || col == 0 || row == n || col == n);
            }
        }
        let id = |c: usize, r: usize| r * np + c;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (ll, lr, ur, ul) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([ll, lr, ur]);
                triangles.push([ll, ur, ul]);
            }
        }
        let mut node_elements = vec![Vec::new(); np * np];
        for (e, tri) in triangles.iter().enumerate() {
            for &v in tri {
                node_elements[v].push(e);
            }
        }
        Ok(Mesh {
            n,
            h,
            vertices,
            triangles,
            on_boundary,
            node_elements,
        })
    }

    /// Cells per side.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn num_nodes(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn node_id(&self, col: usize, row: usize) -> usize {
        row * (self.n + 1) + col
    }

    /// `(col, row)` of a node.
    pub fn node_grid(&self, id: usize) -> (usize, usize) {
        (id % (self.n + 1), id / (self.n + 1))
    }

    /// Grid square `(i, j)` containing an element.
    pub fn element_cell(&self, e: usize) -> (usize, usize) {
        let sq = e / 2;
        (sq % self.n, sq / self.n)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.on_boundary[node]
    }

    /// Elements incident to a node, in increasing id order.
    pub fn node_elements(&self, node: usize) -> &[usize] {
        &self.node_elements[node]
    }

    /// Elements containing both endpoints of a mesh edge.
    pub fn edge_elements(&self, a: usize, b: usize) -> Vec<usize> {
        self.node_elements[a]
            .iter()
            .copied()
            .filter(|&e| self.triangles[e].contains(&b))
            .collect()
    }

    pub fn centroid(&self, e: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[e];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]
    }

    pub fn area(&self, e: usize) -> f64 {
        let [a, b, c] = self.triangles[e];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1])).abs()
    }

    /// Longest edge of an element.
    pub fn diameter(&self, e: usize) -> f64 {
        let t = self.triangles[e];
        (0..3)
            .map(|k| {
                let (p, q) = (self.vertices[t[k]], self.vertices[t[(k + 1) % 3]]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max)
    }

    /// Interior nodes in lexicographic order; their position in this list is
    /// the degree-of-freedom index used by the assembled system.
    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&v| !self.on_boundary[v]).collect()
    }

    pub fn num_dofs(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    /// Degree of freedom of an interior node.
    pub fn dof(&self, node: usize) -> Option<usize> {
        if self.on_boundary[node] {
            return None;
        }
        let (c, r) = self.node_grid(node);
        Some((r - 1) * (self.n - 1) + (c - 1))
    }

    pub fn dof_node(&self, dof: usize) -> usize {
        let m = self.n - 1;
        self.node_id(dof % m + 1, dof / m + 1)
    }
}

/// Closed axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inclusion {
    pub rect: Rect,
    pub value: f64,
}

/// Square raster of positive cell values; `values[0]` is the top row.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    size: usize,
    values: Vec<f64>,
}

impl Raster {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Raster> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::usage("raster must have at least one row"));
        }
        if let Some(r) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::usage(format!(
                "raster row {} has {} values, expected {m}",
                r + 1,
                rows[r].len()
            )));
        }
        let values: Vec<f64> = rows.concat();
        if let Some(k) = values.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::usage(format!(
                "raster value at row {}, column {} is not positive: {}",
                k / m + 1,
                k % m + 1,
                values[k]
            )));
        }
        Ok(Raster { size: m, values })
    }

    /// Parses `m` lines of `m` comma-separated positive decimals.
    pub fn parse_csv(text: &str) -> Result<Raster> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(r, line)| {
                line.split(',')
                    .map(|tok| {
                        tok.trim().parse::<f64>().map_err(|_| {
                            Error::usage(format!("raster row {}: cannot parse {tok:?}", r + 1))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Raster::new(rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Raster> {
        Raster::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Value of the half-open cell containing `p`, points on the top or right
    /// edge of the domain fall in the last cell.
    pub fn sample(&self, p: [f64; 2]) -> f64 {
        let m = self.size;
        let cell = |t: f64| ((t * m as f64).floor().max(0.0) as usize).min(m - 1);
        let col = cell(p[0]);
        let row_from_bottom = cell(p[1]);
        self.values[(m - 1 - row_from_bottom) * m + col]
    }
}

/// Piecewise constant coefficient, one positive value per element.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    values: Vec<f64>,
}

impl CoefficientField {
    pub fn uniform(mesh: &Mesh, value: f64) -> Result<Self> {
        Self::from_inclusions(mesh, value, &[])
    }

    /// Background value, overridden by each inclusion containing the element
    /// centroid; the last listed inclusion wins.
    pub fn from_inclusions(mesh: &Mesh, background: f64, inclusions: &[Inclusion]) -> Result<Self> {
        if !(background > 0.0) || !background.is_finite() {
            return Err(Error::usage(format!("background coefficient {background} is not positive")));
        }
        let mut field = CoefficientField {
            values: vec![background; mesh.num_elements()],
        };
        field.overlay(mesh, inclusions)?;
        Ok(field)
    }

    pub fn from_raster(mesh: &Mesh, raster: &Raster) -> Result<Self> {
        Ok(CoefficientField {
            values: (0..mesh.num_elements())
                .map(|e| raster.sample(mesh.centroid(e)))
                .collect(),
        })
    }

    /// Applies inclusions on top of the current values.
    pub fn overlay(&mut self, mesh: &Mesh, inclusions: &[Inclusion]) -> Result<()> {
        if let Some(inc) = inclusions.iter().find(|i| !(i.value > 0.0) || !i.value.is_finite()) {
            return Err(Error::usage(format!("inclusion value {} is not positive", inc.value)));
        }
        for e in 0..mesh.num_elements() {
            let c = mesh.centroid(e);
            if let Some(inc) = inclusions.iter().rev().find(|i| i.rect.contains(c)) {
                self.values[e] = inc.value;
            }
        }
        Ok(())
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::usage("coefficient values must be positive"));
        }
        Ok(CoefficientField { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, e: usize) -> f64 {
        self.values[e]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        CoefficientField {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}
