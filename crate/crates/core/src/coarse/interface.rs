//! Generalized eigenproblems `Abar psi = lambda B psi` on the interfaces and
//! the spectral projection `Pi_m`.

use crate::linalg::dense_sym_generalized_eig;
use crate::partition::TraceForms;
use crate::Result;

/// Full eigenbasis of one interface, `B`-orthonormal, ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct InterfaceSpectrum {
    pub interface: usize,
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the trace of the `k`-th mode on the interface nodes.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Diagonal of `B`, kept to evaluate `b(., psi_k)`.
    pub weights: Vec<f64>,
}

pub fn solve_interface_eigenproblem(forms: &TraceForms) -> Result<InterfaceSpectrum> {
    let eig = dense_sym_generalized_eig(&forms.stiffness_dense(), &forms.weights)?;
    Ok(InterfaceSpectrum {
        interface: forms.interface,
        eigenvectors: (0..eig.len()).map(|k| eig.vector(k)).collect(),
        eigenvalues: eig.eigenvalues,
        weights: forms.weights.clone(),
    })
}

impl InterfaceSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `lambda_{m+1}`, or infinity once every mode is included.
    pub fn lambda_after(&self, m: usize) -> f64 {
        self.eigenvalues.get(m).copied().unwrap_or(f64::INFINITY)
    }

    /// `b(v, psi_k)` for the first `m` modes.
    pub fn coefficients(&self, v: &[f64], m: usize) -> Vec<f64> {
        self.eigenvectors[..m]
            .iter()
            .map(|psi| {
                psi.iter()
                    .zip(v)
                    .zip(&self.weights)
                    .map(|((p, x), w)| w * p * x)
                    .sum()
            })
            .collect()
    }

    /// `Pi_m v = sum_{k <= m} b(v, psi_k) psi_k`.
    pub fn project(&self, v: &[f64], m: usize) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (c, psi) in self.coefficients(v, m).into_iter().zip(&self.eigenvectors) {
            for (o, p) in out.iter_mut().zip(psi) {
                *o += c * p;
            }
        }
        out
    }
}

/// Number of eigenvalues at or below `tau`, raised to one when `min_one` is set.
pub fn select_adaptive(spectrum: &InterfaceSpectrum, tau: f64, min_one: bool) -> usize {
    let m = spectrum.eigenvalues.iter().filter(|&&l| l <= tau).count();
    if min_one && spectrum.dim() > 0 {
        m.max(1)
    } else {
        m
    }
}

/// Energies entering the projection estimates for one trace `v`.
#[derive(Clone, Copy, Debug)]
pub struct ProjectionCheck {
    /// `|v|^2` in the `Abar` seminorm.
    pub full: f64,
    /// `|Pi_m v|^2`.
    pub projected: f64,
    /// `|v - Pi_m v|^2`.
    pub remainder: f64,
    /// `||v - Pi_m v||_B^2`.
    pub remainder_b: f64,
    pub lambda_next: f64,
}

impl ProjectionCheck {
    pub fn evaluate(forms: &TraceForms, spectrum: &InterfaceSpectrum, m: usize, v: &[f64]) -> Self {
        let p = spectrum.project(v, m);
        let r: Vec<f64> = v.iter().zip(&p).map(|(a, b)| a - b).collect();
        ProjectionCheck {
            full: forms.energy(v),
            projected: forms.energy(&p),
            remainder: forms.energy(&r),
            remainder_b: forms.b_inner(&r, &r),
            lambda_next: spectrum.lambda_after(m),
        }
    }

    /// Relative excess of `|Pi_m v| <= |v|` (nonpositive when it holds).
    pub fn projection_excess(&self) -> f64 {
        (self.projected - self.full) / self.full
    }

    /// Relative excess of `|v - Pi_m v| <= |v|`.
    pub fn remainder_excess(&self) -> f64 {
        (self.remainder - self.full) / self.full
    }

    /// Relative excess of `||v - Pi_m v||_B^2 <= |v - Pi_m v|^2 / lambda_{m+1}`,
    /// measured against the right-hand side (or `|v|^2` if that side vanishes).
    pub fn approximation_excess(&self) -> f64 {
        if self.lambda_next.is_infinite() {
            return self.remainder_b / self.full;
        }
        let rhs = self.remainder / self.lambda_next;
        let scale = if self.remainder > 1e-12 * self.full {
            rhs
        } else {
            self.full / self.lambda_next
        };
        (self.remainder_b - rhs) / scale
    }

    /// `| |v|^2 - |Pi_m v|^2 - |v - Pi_m v|^2 | / |v|^2`.
    pub fn pythagoras_defect(&self) -> f64 {
        (self.full - self.projected - self.remainder).abs() / self.full
    }

    pub fn worst(&self) -> f64 {
        self.projection_excess()
            .max(self.remainder_excess())
            .max(self.approximation_excess())
            .max(self.pythagoras_defect())
    }
}
