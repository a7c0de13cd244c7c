//! Randomized invariant checks on a configured problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ExperimentConfig;
use crate::coarse::{coarse_interpolate, harmonic_residual, verify_stable_decomposition, CoarseSpec, ProjectionCheck};
use crate::linalg::dot;
use crate::partition::PartitionOfUnity;
use crate::schwarz::{build_preconditioner, dense_condition_oracle, pcg, LinearOperator, Mode, ORACLE_MAX_DOFS};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail,
    }
}

fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Runs the invariant suite at the largest configured contrast. Eigen-based
/// checks use the configured coarse space, or `shem` with the same count when
/// the configured one is non-spectral.
pub fn run_checks(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let contrast = cfg.contrasts().into_iter().fold(1.0, f64::max);
    let problem = cfg.build_problem(contrast)?;
    let ctx = problem.context();
    let mut out = Vec::new();

    // interface forms and projections
    let mut worst_equiv = f64::NEG_INFINITY;
    let mut worst_proj = 0.0f64;
    for (forms, spectrum) in problem.forms.iter().zip(&problem.spectra) {
        for _ in 0..200 {
            let v = random_vec(forms.dim(), &mut rng);
            let e = forms.energy(&v);
            let (lo, hi) = forms.one_sided_energies(&v);
            worst_equiv = worst_equiv.max((e - (lo + hi)) / e).max((lo + hi - 2.0 * e) / e);
            let m = rng.gen_range(0..=spectrum.dim());
            worst_proj = worst_proj.max(ProjectionCheck::evaluate(forms, spectrum, m, &v).worst());
        }
    }
    out.push(outcome(
        "coefficient equivalence",
        worst_equiv <= 1e-12,
        format!("max relative excess {worst_equiv:.2e}"),
    ));
    out.push(outcome(
        "interface projection estimates",
        worst_proj <= 1e-10,
        format!("max relative excess {worst_proj:.2e}"),
    ));

    let spec = cfg.base_spec();
    let coarse = problem.build_coarse(&spec)?;
    let worst_harm = coarse
        .basis
        .iter()
        .map(|v| harmonic_residual(&problem.system.a, &problem.mesh, &problem.partition, v))
        .fold(0.0, f64::max);
    out.push(outcome(
        "coarse basis discrete harmonic",
        worst_harm <= 1e-10,
        format!("{} vectors, max scaled residual {worst_harm:.2e}", coarse.dim()),
    ));

    let eigen = if coarse.is_eigen_based() {
        coarse.clone()
    } else {
        let m = coarse.enrichment.iter().copied().max().unwrap_or(0);
        problem.build_coarse(&CoarseSpec::shem(m))?
    };
    let u = random_vec(problem.system.size(), &mut rng);
    let once = coarse_interpolate(&ctx, &eigen, &u)?;
    let twice = coarse_interpolate(&ctx, &eigen, &once)?;
    let scale = once.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let idem = once.iter().zip(&twice).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
    out.push(outcome("coarse interpolant idempotent", idem <= 1e-10, format!("max defect {idem:.2e}")));

    let delta = cfg.delta_layers.max(1);
    let overlap = problem.partition.extend_overlap(&problem.mesh, delta);
    let pou = PartitionOfUnity::new(&problem.mesh, &problem.partition, &overlap)?;
    let pou_defect = (0..problem.system.size())
        .map(|d| {
            let s: f64 = (0..problem.partition.num_subdomains()).map(|i| pou.value(i, d)).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max);
    out.push(outcome("partition of unity", pou_defect == 0.0, format!("max defect {pou_defect:e}")));

    let bound = 100.0 * (1.0 + 1.0 / eigen.lambda_m_plus_1);
    let mut worst_ratio = 0.0f64;
    for _ in 0..20 {
        let u = random_vec(problem.system.size(), &mut rng);
        let d = verify_stable_decomposition(&ctx, &problem.system.a, &eigen, &pou, &u)?;
        worst_ratio = worst_ratio.max(d.ratio);
    }
    out.push(outcome(
        "stable decomposition",
        worst_ratio <= bound,
        format!("max ratio {worst_ratio:.3e}, bound {bound:.3e}"),
    ));

    let overlap = problem.partition.extend_overlap(&problem.mesh, cfg.delta_layers);
    let prec = build_preconditioner(&problem.system.a, &overlap, Some(&coarse), Mode::TwoLevel)?;
    let (r1, r2) = (random_vec(problem.system.size(), &mut rng), random_vec(problem.system.size(), &mut rng));
    let (a, b) = (dot(&r1, &prec.apply(&r2)), dot(&r2, &prec.apply(&r1)));
    let asym = (a - b).abs() / a.abs().max(b.abs());
    out.push(outcome("preconditioner symmetric", asym <= 1e-12, format!("relative asymmetry {asym:.2e}")));

    let report = pcg(&problem.system.a, &prec, &problem.system.b, &cfg.solver)?;
    let direct = problem.direct_solve()?;
    let err = problem.energy_error(&report.solution, &direct);
    out.push(outcome(
        "solution matches direct solve",
        report.converged && err <= 1e-5,
        format!("{} iterations, relative energy error {err:.2e}", report.iterations),
    ));
    let bound = 100.0 * (1.0 + 1.0 / coarse.lambda_m_plus_1);
    out.push(outcome(
        "condition bound",
        !coarse.is_eigen_based() || report.kappa_estimate <= bound,
        format!("kappa {:.3e}, bound {bound:.3e}", report.kappa_estimate),
    ));
    if problem.system.size() <= ORACLE_MAX_DOFS {
        let exact = dense_condition_oracle(&problem.system.a, &prec)?;
        let rel = (report.kappa_estimate - exact).abs() / exact;
        out.push(outcome(
            "condition estimate vs oracle",
            rel <= 0.05,
            format!("estimate {:.4e}, oracle {exact:.4e}", report.kappa_estimate),
        ));
    }
    Ok(out)
}
