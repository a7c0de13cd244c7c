//! Coarse spaces built from discrete harmonic extensions of skeleton data:
//! multiscale hats, spectral and non-spectral interface enrichments, and the
//! full harmonic space.

mod basis;
mod harmonic;
mod interface;
mod interpolate;

pub use basis::{
    build_coarse, build_multiscale_basis, build_nonspectral_basis, build_ohem, build_spectral_basis,
    harmonic_residual, nonspectral_trace,
};
pub use harmonic::HarmonicExtender;
pub use interface::{select_adaptive, solve_interface_eigenproblem, InterfaceSpectrum, ProjectionCheck};
pub use interpolate::{coarse_interpolate, verify_stable_decomposition, StableDecomposition};

use serde::{Deserialize, Serialize};

use crate::linalg::SparseVector;
use crate::mesh::Mesh;
use crate::partition::{Partition, TraceForms};

/// Right-hand sides `g^k` of the non-spectral enrichment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GFamily {
    /// `(-1)^j` on `(j/k, (j+1)/k]`, the first interval closed.
    Alternating,
    /// `sin(k pi t)`.
    Sine,
    /// Hats enumerated level by level: `k = 1` midpoint, `k = 2, 3` quarter points, ...
    Hierarchical,
}

impl GFamily {
    /// `g^k(t)` at the rational point `t = p / segments`.
    pub fn eval(self, k: usize, p: usize, segments: usize) -> f64 {
        assert!(k >= 1, "g^k is indexed from 1");
        let t = p as f64 / segments as f64;
        match self {
            GFamily::Alternating => {
                // interval index j with t in (j/k, (j+1)/k], computed exactly
                let j = (p * k).div_ceil(segments).saturating_sub(1);
                if j % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            GFamily::Sine => (k as f64 * std::f64::consts::PI * t).sin(),
            GFamily::Hierarchical => {
                let level = k.ilog2() + 1;
                let j = k - (1 << (level - 1)) + 1;
                let scale = (1u64 << level) as f64;
                let centre = (2 * j - 1) as f64 / scale;
                (1.0 - (t - centre).abs() * scale).max(0.0)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GFamily::Alternating => "alt",
            GFamily::Sine => "sin",
            GFamily::Hierarchical => "hier",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoarseType {
    Ms,
    Shem,
    Nshem(GFamily),
    Ohem,
}

impl CoarseType {
    /// Config name: `ms`, `shem`, `nshem-alt`, `nshem-sin`, `nshem-hier`, `ohem`.
    pub fn name(self) -> String {
        match self {
            CoarseType::Ms => "ms".into(),
            CoarseType::Shem => "shem".into(),
            CoarseType::Nshem(g) => format!("nshem-{}", g.name()),
            CoarseType::Ohem => "ohem".into(),
        }
    }

    pub fn parse(name: &str) -> Option<CoarseType> {
        Some(match name {
            "ms" => CoarseType::Ms,
            "shem" => CoarseType::Shem,
            "nshem-alt" => CoarseType::Nshem(GFamily::Alternating),
            "nshem-sin" => CoarseType::Nshem(GFamily::Sine),
            "nshem-hier" => CoarseType::Nshem(GFamily::Hierarchical),
            "ohem" => CoarseType::Ohem,
            _ => return None,
        })
    }
}

/// How many enrichment functions each interface receives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Enrichment {
    Fixed(usize),
    /// `m_ij = #{lambda_k <= tau}`; with `laplacian_relative` the threshold is
    /// `tau * lambda_1` of the same interface under a unit coefficient.
    Adaptive {
        tau: f64,
        min_one: bool,
        laplacian_relative: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoarseSpec {
    pub kind: CoarseType,
    pub enrichment: Enrichment,
}

impl CoarseSpec {
    pub fn ms() -> Self {
        CoarseSpec {
            kind: CoarseType::Ms,
            enrichment: Enrichment::Fixed(0),
        }
    }

    pub fn shem(m: usize) -> Self {
        CoarseSpec {
            kind: CoarseType::Shem,
            enrichment: Enrichment::Fixed(m),
        }
    }

    pub fn shem_adaptive(tau: f64, min_one: bool) -> Self {
        CoarseSpec {
            kind: CoarseType::Shem,
            enrichment: Enrichment::Adaptive {
                tau,
                min_one,
                laplacian_relative: false,
            },
        }
    }

    pub fn nshem(family: GFamily, m: usize) -> Self {
        CoarseSpec {
            kind: CoarseType::Nshem(family),
            enrichment: Enrichment::Fixed(m),
        }
    }

    pub fn ohem() -> Self {
        CoarseSpec {
            kind: CoarseType::Ohem,
            enrichment: Enrichment::Fixed(0),
        }
    }

    /// Short label such as `shem_3`, `shem_adapt`, `ms`.
    pub fn label(&self) -> String {
        match (self.kind, self.enrichment) {
            (CoarseType::Ms | CoarseType::Ohem, _) => self.kind.name(),
            (_, Enrichment::Fixed(m)) => format!("{}_{m}", self.kind.name()),
            (_, Enrichment::Adaptive { .. }) => format!("{}_adapt", self.kind.name()),
        }
    }
}

/// Origin of a coarse basis vector. `k` counts from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoarseKind {
    Vertex { node: usize },
    Spectral { interface: usize, k: usize },
    NonSpectral { family: GFamily, interface: usize, k: usize },
}

/// Coarse basis over the interior dofs.
#[derive(Clone, Debug)]
pub struct CoarseSpace {
    pub spec: CoarseSpec,
    pub basis: Vec<SparseVector>,
    pub tags: Vec<CoarseKind>,
    /// Subdomains whose closure carries each basis vector.
    pub supports: Vec<Vec<usize>>,
    /// `m_ij` per interface.
    pub enrichment: Vec<usize>,
    /// Index of the first enrichment vector of each interface.
    pub enrichment_offsets: Vec<usize>,
    pub num_vertices: usize,
    /// `min over interfaces of lambda^{m_ij + 1}`; infinite when every mode is in.
    pub lambda_m_plus_1: f64,
}

impl CoarseSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// True when every enrichment vector comes from an interface eigenfunction.
    pub fn is_eigen_based(&self) -> bool {
        !matches!(self.spec.kind, CoarseType::Nshem(_))
    }

    pub fn enrichment_vector(&self, interface: usize, k: usize) -> &SparseVector {
        assert!(k >= 1 && k <= self.enrichment[interface]);
        &self.basis[self.enrichment_offsets[interface] + k - 1]
    }

    pub fn vector_dense(&self, i: usize) -> Vec<f64> {
        self.basis[i].to_dense()
    }
}

/// Everything a coarse space is built from.
#[derive(Clone, Copy)]
pub struct CoarseContext<'a> {
    pub mesh: &'a Mesh,
    pub partition: &'a Partition,
    pub forms: &'a [TraceForms],
    pub spectra: &'a [InterfaceSpectrum],
    pub extender: &'a HarmonicExtender,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_values() {
        // 4 segments, t = 0, 1/4, ..., 1
        let g = |k, p| GFamily::Alternating.eval(k, p, 4);
        assert!((0..=4).all(|p| g(1, p) == 1.0));
        assert_eq!((0..=4).map(|p| g(2, p)).collect::<Vec<_>>(), vec![1.0, 1.0, 1.0, -1.0, -1.0]);
        // exact breakpoints at t = 1/3, 2/3 on 6 segments
        let g3: Vec<f64> = (0..=6).map(|p| GFamily::Alternating.eval(3, p, 6)).collect();
        assert_eq!(g3, vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn hierarchical_centres() {
        let h = |k, p| GFamily::Hierarchical.eval(k, p, 8);
        assert_eq!(h(1, 4), 1.0);
        assert_eq!(h(1, 0), 0.0);
        assert_eq!(h(1, 2), 0.5);
        assert_eq!(h(2, 2), 1.0);
        assert_eq!(h(3, 6), 1.0);
        assert_eq!(h(2, 4), 0.0);
        assert_eq!(h(4, 1), 1.0);
        assert_eq!(h(7, 7), 1.0);
    }

    #[test]
    fn sine_values() {
        assert!((GFamily::Sine.eval(1, 2, 4) - 1.0).abs() < 1e-15);
        assert!(GFamily::Sine.eval(2, 2, 4).abs() < 1e-15);
    }

    #[test]
    fn type_names_round_trip() {
        for t in [
            CoarseType::Ms,
            CoarseType::Shem,
            CoarseType::Nshem(GFamily::Alternating),
            CoarseType::Nshem(GFamily::Sine),
            CoarseType::Nshem(GFamily::Hierarchical),
            CoarseType::Ohem,
        ] {
            assert_eq!(CoarseType::parse(&t.name()), Some(t));
        }
        assert_eq!(CoarseType::parse("geneo"), None);
        assert_eq!(CoarseSpec::shem(3).label(), "shem_3");
        assert_eq!(CoarseSpec::shem_adaptive(0.03, true).label(), "shem_adapt");
    }
}
