//! Acceptance criteria. Each test prints one PASS/FAIL line (visible with
//! `--nocapture`); the shared channel suite is built once.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use hemdd::coarse::{verify_stable_decomposition, CoarseSpace, ProjectionCheck};
use hemdd::experiment::{benchmark_field, Benchmark};
use hemdd::partition::{Orientation, PartitionOfUnity};
use hemdd::prelude::*;
use hemdd::schwarz::ORACLE_MAX_DOFS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONTRASTS: [f64; 4] = [1.0, 1e2, 1e4, 1e6];

fn channels(n: usize, hc: usize, count: usize, contrast: f64) -> Problem {
    let mesh = Mesh::structured(n).unwrap();
    let incs = benchmark_field(&Benchmark::channels(count, true).with_reach(hc / 4), n, hc, contrast).unwrap();
    let field = CoefficientField::from_inclusions(&mesh, 1.0, &incs).unwrap();
    Problem::new(mesh, field, hc).unwrap()
}

fn unit(n: usize, hc: usize) -> Problem {
    let mesh = Mesh::structured(n).unwrap();
    let field = CoefficientField::uniform(&mesh, 1.0).unwrap();
    Problem::new(mesh, field, hc).unwrap()
}

/// One solved configuration of the suite.
struct Run {
    label: String,
    contrast: f64,
    dofs: usize,
    report: SolveReport,
    coarse: CoarseSpace,
    oracle: Option<f64>,
    stable_ratio: Option<f64>,
    energy_error: f64,
}

fn run(problem: &Problem, spec: &CoarseSpec, delta: usize, contrast: f64, name: &str, rng: &mut ChaCha8Rng) -> Run {
    let coarse = problem.build_coarse(spec).unwrap();
    let overlap = problem.partition.extend_overlap(&problem.mesh, delta);
    let report = problem
        .solve(Some(&coarse), &overlap, Mode::TwoLevel, &PcgOptions::default())
        .unwrap();
    let dofs = problem.system.size();
    let oracle = (dofs <= ORACLE_MAX_DOFS).then(|| {
        let p = build_preconditioner(&problem.system.a, &overlap, Some(&coarse), Mode::TwoLevel).unwrap();
        dense_condition_oracle(&problem.system.a, &p).unwrap()
    });
    let stable_ratio = (coarse.is_eigen_based() && delta >= 1).then(|| {
        let pou = PartitionOfUnity::new(&problem.mesh, &problem.partition, &overlap).unwrap();
        (0..20)
            .map(|_| {
                let u: Vec<f64> = (0..dofs).map(|_| rng.gen_range(-1.0..1.0)).collect();
                verify_stable_decomposition(&problem.context(), &problem.system.a, &coarse, &pou, &u)
                    .unwrap()
                    .ratio
            })
            .fold(0.0, f64::max)
    });
    let direct = problem.direct_solve().unwrap();
    let energy_error = problem.energy_error(&report.solution, &direct);
    Run {
        label: format!("{name} n={} {} δ={delta}", problem.mesh.n(), spec.label()),
        contrast,
        dofs,
        report,
        coarse,
        oracle,
        stable_ratio,
        energy_error,
    }
}

fn report(name: &str, pass: bool, detail: String) {
    println!("{name}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn find<'a>(runs: &'a [Run], label: &str, contrast: f64) -> &'a Run {
    runs.iter()
        .find(|r| r.label.contains(label) && r.contrast == contrast)
        .unwrap_or_else(|| panic!("no run {label} at {contrast:e}"))
}

struct Suite {
    runs: Vec<Run>,
    shem_elapsed: Duration,
    crossed_enrichment: Vec<usize>,
}

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut runs = Vec::new();

        // n=64, H=16h, δ=2h, 3 channel segments per vertical interface
        let start = Instant::now();
        let big: Vec<(f64, Problem)> = CONTRASTS.iter().map(|&c| (c, channels(64, 16, 3, c))).collect();
        for (c, p) in &big {
            for spec in [CoarseSpec::shem(3), CoarseSpec::shem(2)] {
                runs.push(run(p, &spec, 2, *c, "channels", &mut rng));
            }
        }
        let shem_elapsed = start.elapsed();
        for (c, p) in &big {
            for spec in [
                CoarseSpec::ms(),
                CoarseSpec::nshem(GFamily::Alternating, 3),
                CoarseSpec::nshem(GFamily::Sine, 3),
            ] {
                runs.push(run(p, &spec, 2, *c, "channels", &mut rng));
            }
        }
        let p6 = &big[3].1;
        runs.push(run(p6, &CoarseSpec::shem_adaptive(1.0 / 32.0, true), 2, 1e6, "channels", &mut rng));
        let adapt = runs.last().unwrap();
        let crossed_enrichment = p6
            .partition
            .interfaces()
            .iter()
            .filter(|g| g.orientation == Orientation::Vertical)
            .map(|g| adapt.coarse.enrichment[g.id])
            .collect();

        // oracle-sized suite: n=32, H=8h, 2 segments per vertical interface
        for &c in &CONTRASTS {
            let p = channels(32, 8, 2, c);
            for spec in [
                CoarseSpec::ms(),
                CoarseSpec::shem(1),
                CoarseSpec::shem(2),
                CoarseSpec::nshem(GFamily::Hierarchical, 2),
            ] {
                runs.push(run(&p, &spec, 2, c, "small", &mut rng));
            }
        }
        runs.push(run(&unit(16, 4), &CoarseSpec::ms(), 2, 1.0, "unit", &mut rng));
        runs.push(run(&channels(32, 8, 2, 1e6), &CoarseSpec::ohem(), 0, 1e6, "direct", &mut rng));

        for r in &runs {
            println!(
                "  {:<30} contrast {:>5.0e}: it {:>4} kappa {:>9.3e} oracle {:>10} lambda {:>9.3e} ratio {:>9} err {:.1e}",
                r.label,
                r.contrast,
                r.report.iterations,
                r.report.kappa_estimate,
                r.oracle.map_or("-".into(), |o| format!("{o:.3e}")),
                r.coarse.lambda_m_plus_1,
                r.stable_ratio.map_or("-".into(), |o| format!("{o:.2e}")),
                r.energy_error
            );
        }
        Suite {
            runs,
            shem_elapsed,
            crossed_enrichment,
        }
    })
}

#[test]
fn ohem_without_overlap_is_a_direct_solver() {
    let start = Instant::now();
    let p = channels(32, 8, 2, 1e6);
    let ohem = p.build_coarse(&CoarseSpec::ohem()).unwrap();
    let disjoint = p.partition.extend_overlap(&p.mesh, 0);
    let r = p.solve(Some(&ohem), &disjoint, Mode::TwoLevel, &PcgOptions::default()).unwrap();
    let elapsed = start.elapsed();
    report(
        "ohem direct solve",
        r.iterations == 1
            && r.final_relres <= 1e-6
            && (r.kappa_estimate - 1.0).abs() <= 1e-8
            && elapsed < Duration::from_secs(5),
        format!(
            "contrast 1e6: {} iteration(s), relres {:.2e}, kappa {:.10}, {:.2}s",
            r.iterations,
            r.final_relres,
            r.kappa_estimate,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn interface_projection_estimates_hold() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut count = 0;
    for p in [unit(32, 8), channels(32, 8, 2, 1e6)] {
        for (forms, spectrum) in p.forms.iter().zip(&p.spectra) {
            for _ in 0..200 {
                let v: Vec<f64> = (0..forms.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for m in 0..=spectrum.dim() {
                    worst = worst.max(ProjectionCheck::evaluate(forms, spectrum, m, &v).worst());
                    count += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        "projection estimates",
        worst <= 1e-10 && elapsed < Duration::from_secs(10),
        format!("{count} trace/m pairs, worst relative excess {worst:.2e}, {:.2}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn shem_robust_with_enough_modes_only() {
    let s = suite();
    let k3: Vec<f64> = CONTRASTS.iter().map(|&c| find(&s.runs, "shem_3", c).report.kappa_estimate).collect();
    let k2: Vec<f64> = CONTRASTS.iter().map(|&c| find(&s.runs, "shem_2", c).report.kappa_estimate).collect();
    let lo = k3.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = k3.iter().cloned().fold(0.0, f64::max);
    report(
        "shem contrast robustness",
        hi / lo < 2.0 && hi <= 50.0 && k2[3] >= 100.0 * k2[0] && s.shem_elapsed < Duration::from_secs(120),
        format!(
            "SHEM_3 kappa {:?}, SHEM_2 kappa {:?}, {:.1}s",
            k3.iter().map(|k| format!("{k:.3}")).collect::<Vec<_>>(),
            k2.iter().map(|k| format!("{k:.3e}")).collect::<Vec<_>>(),
            s.shem_elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn multiscale_space_degrades_with_contrast() {
    let s = suite();
    let k4 = find(&s.runs, "channels n=64 ms", 1e4).report.kappa_estimate;
    let k6 = find(&s.runs, "channels n=64 ms", 1e6).report.kappa_estimate;
    let q = k6 / k4;
    report(
        "ms degradation",
        (10.0..=1000.0).contains(&q),
        format!("kappa 1e4 {k4:.3e}, 1e6 {k6:.3e}, ratio {q:.1}"),
    );
}

#[test]
fn nonspectral_enrichment_tracks_spectral() {
    let s = suite();
    let mut diffs = Vec::new();
    for &c in &CONTRASTS {
        let base = find(&s.runs, "shem_3", c).report.iterations as i64;
        for l in ["nshem-alt_3", "nshem-sin_3"] {
            diffs.push(find(&s.runs, l, c).report.iterations as i64 - base);
        }
    }
    report(
        "nshem vs shem",
        diffs.iter().all(|d| d.abs() <= 5),
        format!("iteration differences to SHEM_3 {diffs:?}"),
    );
}

#[test]
fn lanczos_estimate_matches_oracle() {
    let s = suite();
    let mut worst = 0.0f64;
    let mut count = 0;
    for r in s.runs.iter().filter(|r| r.dofs <= ORACLE_MAX_DOFS) {
        let o = r.oracle.unwrap();
        worst = worst.max((r.report.kappa_estimate - o).abs() / o);
        count += 1;
    }
    report(
        "lanczos vs oracle",
        count > 0 && worst <= 0.05,
        format!("{count} configurations, worst relative gap {worst:.3e}"),
    );
}

#[test]
fn condition_and_decomposition_bounds() {
    let s = suite();
    let mut ok = true;
    let (mut worst_k, mut worst_s) = (0.0f64, 0.0f64);
    for r in s.runs.iter().filter(|r| r.coarse.is_eigen_based()) {
        let bound = 100.0 * (1.0 + 1.0 / r.coarse.lambda_m_plus_1);
        worst_k = worst_k.max(r.report.kappa_estimate / bound);
        ok &= r.report.kappa_estimate <= bound;
        if let Some(ratio) = r.stable_ratio {
            worst_s = worst_s.max(ratio / bound);
            ok &= ratio <= bound;
        }
    }
    report(
        "condition bound",
        ok,
        format!("max kappa/bound {worst_k:.3e}, max decomposition ratio/bound {worst_s:.3e}"),
    );
}

#[test]
fn adaptive_selection_counts_channels() {
    let s = suite();
    let ka = find(&s.runs, "shem_adapt", 1e6).report.kappa_estimate;
    let ks = find(&s.runs, "shem_3", 1e6).report.kappa_estimate;
    let picked: BTreeSet<usize> = s.crossed_enrichment.iter().copied().collect();
    report(
        "adaptive shem",
        s.crossed_enrichment.iter().all(|&m| m == 3) && ka <= 2.0 * ks,
        format!("modes on crossed interfaces {picked:?}, kappa {ka:.3} vs SHEM_3 {ks:.3}"),
    );
}

#[test]
fn converged_runs_match_direct_solve() {
    let s = suite();
    let converged: Vec<&Run> = s.runs.iter().filter(|r| r.report.converged).collect();
    let worst = converged.iter().map(|r| r.energy_error).fold(0.0, f64::max);
    report(
        "solution accuracy",
        !converged.is_empty() && worst <= 1e-5,
        format!("worst relative energy error {worst:.2e} over {} converged runs", converged.len()),
    );
}
