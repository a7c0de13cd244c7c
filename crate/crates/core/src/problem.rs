//! A discretized model problem with its decomposition and interface data,
//! ready for coarse space construction and preconditioned solves.

use std::time::Instant;

use rayon::prelude::*;

use crate::assembly::{assemble_system, LinearSystem};
use crate::coarse::{
    build_coarse, solve_interface_eigenproblem, CoarseContext, CoarseSpace, CoarseSpec, HarmonicExtender,
    InterfaceSpectrum,
};
use crate::linalg::{SparseMatrix, SpdFactorization};
use crate::mesh::{CoefficientField, Mesh};
use crate::partition::{build_trace_forms, OverlapSet, Partition, TraceForms};
use crate::schwarz::{build_preconditioner, pcg, Mode, PcgOptions, SolveReport};
use crate::Result;

/// `-div(alpha grad u) = 1` on the unit square with zero boundary values.
#[derive(Clone, Debug)]
pub struct Problem {
    pub mesh: Mesh,
    pub field: CoefficientField,
    /// Stiffness over all mesh nodes.
    pub a_full: SparseMatrix,
    /// Dirichlet-reduced system over interior dofs.
    pub system: LinearSystem,
    pub partition: Partition,
    /// Interface forms, indexed like `partition.interfaces()`.
    pub forms: Vec<TraceForms>,
    pub spectra: Vec<InterfaceSpectrum>,
    pub extender: HarmonicExtender,
}

impl Problem {
    pub fn new(mesh: Mesh, field: CoefficientField, h_cells: usize) -> Result<Problem> {
        let partition = Partition::new(&mesh, h_cells)?;
        let (a_full, system) = assemble_system(&mesh, &field, 1.0)?;
        let forms: Vec<TraceForms> = partition
            .interfaces()
            .iter()
            .map(|g| build_trace_forms(&mesh, &field, &partition, g))
            .collect();
        let spectra = forms
            .par_iter()
            .map(solve_interface_eigenproblem)
            .collect::<Result<Vec<_>>>()?;
        let extender = HarmonicExtender::new(&mesh, &partition, &a_full)?;
        Ok(Problem {
            mesh,
            field,
            a_full,
            system,
            partition,
            forms,
            spectra,
            extender,
        })
    }

    pub fn context(&self) -> CoarseContext<'_> {
        CoarseContext {
            mesh: &self.mesh,
            partition: &self.partition,
            forms: &self.forms,
            spectra: &self.spectra,
            extender: &self.extender,
        }
    }

    pub fn build_coarse(&self, spec: &CoarseSpec) -> Result<CoarseSpace> {
        build_coarse(&self.context(), spec)
    }

    /// Preconditioned CG on the assembled system.
    pub fn solve(
        &self,
        coarse: Option<&CoarseSpace>,
        overlap: &OverlapSet,
        mode: Mode,
        options: &PcgOptions,
    ) -> Result<SolveReport> {
        let start = Instant::now();
        let p = build_preconditioner(&self.system.a, overlap, coarse, mode)?;
        let mut report = pcg(&self.system.a, &p, &self.system.b, options)?;
        report.wall_time = start.elapsed().as_secs_f64();
        report.coarse_dim = coarse.map_or(0, |c| c.dim());
        report.lambda_m_plus_1 = coarse.map_or(0.0, |c| c.lambda_m_plus_1);
        Ok(report)
    }

    /// Sparse direct solution of the assembled system.
    pub fn direct_solve(&self) -> Result<Vec<f64>> {
        let f = SpdFactorization::new(&self.system.a).map_err(|e| e.with_context("global stiffness"))?;
        Ok(f.solve(&self.system.b))
    }

    /// `|x - reference|_A / |reference|_A`.
    pub fn energy_error(&self, x: &[f64], reference: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(reference).map(|(a, b)| a - b).collect();
        let den = self.system.a.bilinear(reference, reference);
        (self.system.a.bilinear(&d, &d) / den).sqrt()
    }
}
