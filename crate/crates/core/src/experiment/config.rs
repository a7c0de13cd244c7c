//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::fields::{benchmark_field, Benchmark};
use crate::coarse::{CoarseSpec, CoarseType, Enrichment};
use crate::mesh::{CoefficientField, Inclusion, Mesh, Raster, Rect};
use crate::problem::Problem;
use crate::schwarz::PcgOptions;
use crate::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mesh: RawMesh,
    partition: RawPartition,
    #[serde(default)]
    alpha: RawAlpha,
    coarse: RawCoarse,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    sweep: RawSweep,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPartition {
    #[serde(rename = "H_cells")]
    h_cells: usize,
    #[serde(default)]
    delta_layers: usize,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAlpha {
    background: Option<f64>,
    contrast: Option<f64>,
    #[serde(default)]
    inclusions: Vec<RawInclusion>,
    raster_path: Option<PathBuf>,
    benchmark: Option<Benchmark>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInclusion {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    value: InclusionValue,
}

/// Inclusion coefficient: a number, or `"contrast"` for `contrast * background`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InclusionValue {
    Fixed(f64),
    Named(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoarse {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    m: usize,
    adaptive: Option<RawAdaptive>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdaptive {
    tau: f64,
    #[serde(default = "yes")]
    min_one: bool,
    #[serde(default)]
    laplacian_relative: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tol: Option<f64>,
    maxit: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default)]
    contrast: Vec<f64>,
    #[serde(default)]
    m: Vec<usize>,
    #[serde(default)]
    delta: Vec<usize>,
    #[serde(default, rename = "type")]
    types: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigInclusion {
    pub rect: Rect,
    pub value: InclusionValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaConfig {
    pub background: f64,
    pub contrast: f64,
    pub inclusions: Vec<ConfigInclusion>,
    pub raster_path: Option<PathBuf>,
    pub benchmark: Option<Benchmark>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub tau: f64,
    pub min_one: bool,
    pub laplacian_relative: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarseConfig {
    pub kind: CoarseType,
    pub m: usize,
    pub adaptive: Option<AdaptiveConfig>,
}

/// Sweep axes; an empty list means "the base value only".
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SweepConfig {
    pub contrast: Vec<f64>,
    pub m: Vec<usize>,
    pub delta: Vec<usize>,
    pub types: Vec<CoarseType>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub h_cells: usize,
    pub delta_layers: usize,
    pub alpha: AlphaConfig,
    pub coarse: CoarseConfig,
    pub solver: PcgOptions,
    pub sweep: SweepConfig,
}

fn parse_type(name: &str, field: &str) -> Result<CoarseType> {
    CoarseType::parse(name).ok_or_else(|| {
        Error::config(format!(
            "{field}: unknown coarse type {name:?} (expected ms, shem, nshem-alt, nshem-sin, nshem-hier or ohem)"
        ))
    })
}

fn check_contrast(c: f64, field: &str) -> Result<()> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::config(format!("{field}: contrast {c} must be a finite value >= 1")));
    }
    Ok(())
}

/// Parses and validates a JSON config, filling defaults
/// (`tol = 1e-6`, `maxit = 2000`, `min_one = true`).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;

    let n = raw.mesh.n;
    if n < 2 {
        return Err(Error::config(format!("mesh.n: need at least 2 cells per side, got {n}")));
    }
    let h_cells = raw.partition.h_cells;
    if h_cells == 0 || n % h_cells != 0 {
        return Err(Error::config(format!(
            "partition.H_cells: {h_cells} does not divide mesh.n = {n}"
        )));
    }
    if n / h_cells < 2 {
        return Err(Error::config(format!(
            "partition.H_cells: {h_cells} leaves fewer than 2 subdomains per side"
        )));
    }

    let background = raw.alpha.background.unwrap_or(1.0);
    if !(background > 0.0) || !background.is_finite() {
        return Err(Error::config(format!("alpha.background: {background} is not positive")));
    }
    let contrast = raw.alpha.contrast.unwrap_or(1.0);
    check_contrast(contrast, "alpha.contrast")?;
    let mut inclusions = Vec::with_capacity(raw.alpha.inclusions.len());
    for (i, inc) in raw.alpha.inclusions.into_iter().enumerate() {
        if !(inc.x0 < inc.x1 && inc.y0 < inc.y1) {
            return Err(Error::config(format!("alpha.inclusions[{i}]: empty rectangle")));
        }
        match &inc.value {
            InclusionValue::Fixed(v) if !(*v > 0.0) || !v.is_finite() => {
                return Err(Error::config(format!("alpha.inclusions[{i}].value: {v} is not positive")));
            }
            InclusionValue::Named(s) if s != "contrast" => {
                return Err(Error::config(format!(
                    "alpha.inclusions[{i}].value: expected a number or \"contrast\", got {s:?}"
                )));
            }
            _ => {}
        }
        inclusions.push(ConfigInclusion {
            rect: Rect::new(inc.x0, inc.x1, inc.y0, inc.y1),
            value: inc.value,
        });
    }
    if let Some(b) = &raw.alpha.benchmark {
        b.validate()?;
    }

    let kind = parse_type(&raw.coarse.kind, "coarse.type")?;
    let adaptive = match raw.coarse.adaptive {
        Some(a) => {
            if !(a.tau > 0.0) {
                return Err(Error::config(format!("coarse.adaptive.tau: {} must be positive", a.tau)));
            }
            Some(AdaptiveConfig {
                tau: a.tau,
                min_one: a.min_one,
                laplacian_relative: a.laplacian_relative,
            })
        }
        None => None,
    };
    let modes = h_cells - 1;
    for (m, field) in std::iter::once((raw.coarse.m, "coarse.m")).chain(raw.sweep.m.iter().map(|&m| (m, "sweep.m"))) {
        if m > modes {
            return Err(Error::config(format!(
                "{field}: {m} exceeds the {modes} modes available per interface"
            )));
        }
    }

    let tol = raw.solver.tol.unwrap_or(1e-6);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::config(format!("solver.tol: {tol} must lie in (0, 1)")));
    }
    let maxit = raw.solver.maxit.unwrap_or(2000);
    if maxit == 0 {
        return Err(Error::config("solver.maxit: must be at least 1"));
    }

    for &c in &raw.sweep.contrast {
        check_contrast(c, "sweep.contrast")?;
    }
    let types = raw
        .sweep
        .types
        .iter()
        .map(|t| parse_type(t, "sweep.type"))
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentConfig {
        n,
        h_cells,
        delta_layers: raw.partition.delta_layers,
        alpha: AlphaConfig {
            background,
            contrast,
            inclusions,
            raster_path: raw.alpha.raster_path,
            benchmark: raw.alpha.benchmark,
        },
        coarse: CoarseConfig { kind, m: raw.coarse.m, adaptive },
        solver: PcgOptions { tol, maxit },
        sweep: SweepConfig {
            contrast: raw.sweep.contrast,
            m: raw.sweep.m,
            delta: raw.sweep.delta,
            types,
        },
    })
}

/// Reads a config file; a relative `raster_path` is resolved against the file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(r) = &cfg.alpha.raster_path {
        if r.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.alpha.raster_path = Some(base.join(r));
        }
    }
    Ok(cfg)
}

impl ExperimentConfig {
    /// Contrast values of the sweep, or the base contrast.
    pub fn contrasts(&self) -> Vec<f64> {
        if self.sweep.contrast.is_empty() {
            vec![self.alpha.contrast]
        } else {
            self.sweep.contrast.clone()
        }
    }

    /// Coefficient field at a given contrast: raster (or background), then the
    /// benchmark geometry, then explicit inclusions, later ones winning.
    pub fn coefficient_field(&self, mesh: &Mesh, contrast: f64) -> Result<CoefficientField> {
        let a = &self.alpha;
        let high = contrast * a.background;
        let mut field = match &a.raster_path {
            Some(p) => CoefficientField::from_raster(mesh, &Raster::load(p)?)?,
            None => CoefficientField::uniform(mesh, a.background)?,
        };
        if let Some(b) = &a.benchmark {
            field.overlay(mesh, &benchmark_field(b, self.n, self.h_cells, high)?)?;
        }
        let explicit: Vec<Inclusion> = a
            .inclusions
            .iter()
            .map(|i| Inclusion {
                rect: i.rect,
                value: match i.value {
                    InclusionValue::Fixed(v) => v,
                    InclusionValue::Named(_) => high,
                },
            })
            .collect();
        field.overlay(mesh, &explicit)?;
        Ok(field)
    }

    pub fn build_problem(&self, contrast: f64) -> Result<Problem> {
        let mesh = Mesh::structured(self.n)?;
        let field = self.coefficient_field(&mesh, contrast)?;
        Problem::new(mesh, field, self.h_cells)
    }

    /// Coarse space for a given type and enrichment count; the config's
    /// adaptive block, when present, replaces the fixed count.
    pub fn coarse_spec(&self, kind: CoarseType, m: usize) -> CoarseSpec {
        let enrichment = match (kind, self.coarse.adaptive) {
            (CoarseType::Shem | CoarseType::Nshem(_), Some(a)) => Enrichment::Adaptive {
                tau: a.tau,
                min_one: a.min_one,
                laplacian_relative: a.laplacian_relative,
            },
            (CoarseType::Shem | CoarseType::Nshem(_), None) => Enrichment::Fixed(m),
            _ => Enrichment::Fixed(0),
        };
        CoarseSpec { kind, enrichment }
    }

    pub fn base_spec(&self) -> CoarseSpec {
        self.coarse_spec(self.coarse.kind, self.coarse.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"mesh":{"n":8},"partition":{"H_cells":4,"delta_layers":2},"coarse":{"type":"ms"}}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.solver, PcgOptions { tol: 1e-6, maxit: 2000 });
        assert_eq!(c.alpha.background, 1.0);
        assert_eq!(c.coarse.kind, CoarseType::Ms);
        assert_eq!(c.contrasts(), vec![1.0]);
        let a = parse_config(
            r#"{"mesh":{"n":8},"partition":{"H_cells":4},"coarse":{"type":"shem","adaptive":{"tau":0.03125}}}"#,
        )
        .unwrap();
        assert!(a.coarse.adaptive.unwrap().min_one);
    }

    fn err(text: &str) -> String {
        match parse_config(text) {
            Err(Error::Config(msg)) => msg,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn validation_names_fields() {
        assert!(err(&MINIMAL.replace("\"H_cells\":4", "\"H_cells\":3")).contains("H_cells"));
        assert!(err(&MINIMAL.replace("}}", "},\"solver\":{\"tol\":0}}"))
            .contains("solver.tol"));
        assert!(err(&MINIMAL.replace("\"ms\"", "\"geneo\"")).contains("coarse.type"));
        assert!(err(&MINIMAL.replace("\"ms\"", "\"shem\",\"m\":4")).contains("coarse.m"));
        assert!(err(&MINIMAL.replace("\"coarse\"", "\"alpha\":{\"contrast\":0.5},\"coarse\"")).contains("alpha.contrast"));
        assert!(err(&MINIMAL.replace("\"coarse\"", "\"sweep\":{\"contrast\":[1,0.1]},\"coarse\"")).contains("sweep.contrast"));
        assert!(err(&MINIMAL.replace("\"coarse\"", "\"colour\":1,\"coarse\"")).contains("colour"));
        assert!(err("{not json").len() > 0);
    }

    #[test]
    fn contrast_inclusions() {
        let text = r#"{"mesh":{"n":8},"partition":{"H_cells":4},"coarse":{"type":"ms"},
            "alpha":{"background":2.0,"contrast":100,
                     "inclusions":[{"x0":0,"x1":1,"y0":0,"y1":0.25,"value":"contrast"},
                                   {"x0":0,"x1":1,"y0":0.75,"y1":1,"value":7}]}}"#;
        let c = parse_config(text).unwrap();
        let mesh = Mesh::structured(8).unwrap();
        let f = c.coefficient_field(&mesh, 100.0).unwrap();
        assert_eq!(f.value(0), 200.0);
        assert_eq!(f.value(mesh.num_elements() - 1), 7.0);
        assert_eq!(f.min(), 2.0);
        let bad = text.replace("\"contrast\"}", "\"high\"}");
        assert!(parse_config(&bad).is_err());
    }
}
