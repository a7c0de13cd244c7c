//! Cartesian sweeps over coarse type, enrichment count, overlap and contrast.

use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentConfig;
use crate::coarse::{CoarseType, Enrichment};
use crate::problem::Problem;
use crate::schwarz::{Mode, SolveReport};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub kind: CoarseType,
    pub m: usize,
    pub delta: usize,
    pub contrast: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub method: String,
    /// Enrichment count per interface, `adapt` for threshold selection.
    pub m: String,
    pub contrast: f64,
    pub delta: usize,
    pub coarse_dim: usize,
    pub iterations: usize,
    pub kappa_estimate: f64,
    pub lambda_m_plus_1: f64,
    pub final_relres: f64,
    pub converged: bool,
    /// Set when the point failed; the sweep continues with the next one.
    pub error: Option<String>,
}

fn uses_m(cfg: &ExperimentConfig, kind: CoarseType) -> bool {
    matches!(kind, CoarseType::Shem | CoarseType::Nshem(_)) && cfg.coarse.adaptive.is_none()
}

/// Points in output order: type, then `m`, then overlap, then contrast.
/// Types without a fixed count (ms, ohem, adaptive) take a single `m`.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<SweepPoint> {
    let s = &cfg.sweep;
    let types = if s.types.is_empty() { vec![cfg.coarse.kind] } else { s.types.clone() };
    let ms = if s.m.is_empty() { vec![cfg.coarse.m] } else { s.m.clone() };
    let deltas = if s.delta.is_empty() { vec![cfg.delta_layers] } else { s.delta.clone() };
    let contrasts = cfg.contrasts();
    let mut points = Vec::new();
    for &kind in &types {
        let m_axis = if uses_m(cfg, kind) { ms.clone() } else { vec![0] };
        for &m in &m_axis {
            for &delta in &deltas {
                for &contrast in &contrasts {
                    points.push(SweepPoint { kind, m, delta, contrast });
                }
            }
        }
    }
    points
}

fn blank_row(cfg: &ExperimentConfig, p: &SweepPoint) -> ResultRow {
    let spec = cfg.coarse_spec(p.kind, p.m);
    let m = match (p.kind, spec.enrichment) {
        (CoarseType::Ohem, _) => (cfg.h_cells - 1).to_string(),
        (_, Enrichment::Adaptive { .. }) => "adapt".to_string(),
        (_, Enrichment::Fixed(m)) => m.to_string(),
    };
    ResultRow {
        method: p.kind.name(),
        m,
        contrast: p.contrast,
        delta: p.delta,
        coarse_dim: 0,
        iterations: 0,
        kappa_estimate: f64::NAN,
        lambda_m_plus_1: f64::NAN,
        final_relres: f64::NAN,
        converged: false,
        error: None,
    }
}

/// Builds the coarse space and solves one point.
pub fn run_point(cfg: &ExperimentConfig, problem: &Problem, p: &SweepPoint) -> Result<(ResultRow, SolveReport)> {
    let coarse = problem.build_coarse(&cfg.coarse_spec(p.kind, p.m))?;
    let overlap = problem.partition.extend_overlap(&problem.mesh, p.delta);
    let report = problem.solve(Some(&coarse), &overlap, Mode::TwoLevel, &cfg.solver)?;
    let row = ResultRow {
        coarse_dim: coarse.dim(),
        iterations: report.iterations,
        kappa_estimate: report.kappa_estimate,
        lambda_m_plus_1: coarse.lambda_m_plus_1,
        final_relres: report.final_relres,
        converged: report.converged,
        ..blank_row(cfg, p)
    };
    Ok((row, report))
}

/// Runs every sweep point. Problems are assembled once per contrast; points
/// run in parallel but rows come back in sweep order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    let points = sweep_points(cfg);
    let mut contrasts: Vec<f64> = Vec::new();
    for p in &points {
        if !contrasts.contains(&p.contrast) {
            contrasts.push(p.contrast);
        }
    }
    let problems: Vec<std::result::Result<Problem, String>> = contrasts
        .par_iter()
        .map(|&c| cfg.build_problem(c).map_err(|e| e.to_string()))
        .collect();
    points
        .par_iter()
        .map(|p| {
            let idx = contrasts.iter().position(|&c| c == p.contrast).unwrap();
            let result = match &problems[idx] {
                Ok(problem) => run_point(cfg, problem, p).map(|(row, _)| row).map_err(|e| e.to_string()),
                Err(msg) => Err(msg.clone()),
            };
            result.unwrap_or_else(|msg| ResultRow {
                error: Some(msg),
                ..blank_row(cfg, p)
            })
        })
        .collect()
}
