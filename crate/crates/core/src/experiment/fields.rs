//! Parameterized benchmark coefficient geometries.

use serde::{Deserialize, Serialize};

use crate::mesh::{Inclusion, Rect};
use crate::{Error, Result};

/// Benchmark geometry selector as it appears under `alpha.benchmark`.
///
/// * `channels`: `count` horizontal strips of height `2h` spanning the domain.
///   Globally they are centred at `k / (count + 1)`; with `per_band` every
///   horizontal band of subdomains gets its own `count` strips, so each
///   vertical interface is crossed `count` times. With `floating` the strips
///   stop half a subdomain short of the left and right walls, so they are not
///   pinned by the Dirichlet condition.
/// * `inclusions-crossing`: in every band, one rectangle per entry of `sizes`
///   (`s` cells tall, `2s` wide) centred on each vertical interface, separated
///   by equal gaps; defaults to sizes 1, 2, 3.
/// * `checker`: every other subdomain block at high coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Benchmark {
    pub name: String,
    #[serde(default)]
    pub count: usize,
    #[serde(default)]
    pub per_band: bool,
    #[serde(default)]
    pub reach: usize,
    #[serde(default)]
    pub sizes: Vec<usize>,
}

impl Benchmark {
    pub fn channels(count: usize, per_band: bool) -> Self {
        Benchmark {
            name: "channels".into(),
            count,
            per_band,
            reach: 0,
            sizes: Vec::new(),
        }
    }

    pub fn with_reach(mut self, cells: usize) -> Self {
        self.reach = cells;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.name.as_str() {
            "channels" | "checker" => Ok(()),
            "inclusions-crossing" if self.sizes.contains(&0) => {
                Err(Error::config("alpha.benchmark.sizes: sizes must be positive"))
            }
            "inclusions-crossing" => Ok(()),
            other => Err(Error::config(format!(
                "alpha.benchmark.name: unknown benchmark {other:?} (expected channels, inclusions-crossing or checker)"
            ))),
        }
    }
}

/// Inclusions of the named geometry at coefficient `value`.
pub fn benchmark_field(b: &Benchmark, n: usize, h_cells: usize, value: f64) -> Result<Vec<Inclusion>> {
    b.validate().map_err(|e| match e {
        Error::Config(msg) => Error::Usage(msg),
        other => other,
    })?;
    let h = 1.0 / n as f64;
    let bands = n / h_cells;
    if 2 * b.reach > h_cells {
        return Err(Error::usage(format!(
            "channel reach {} exceeds half a subdomain ({} cells)",
            b.reach, h_cells
        )));
    }
    let spans: Vec<(f64, f64)> = if b.reach == 0 {
        vec![(0.0, 1.0)]
    } else {
        (1..bands)
            .map(|col| {
                let x = (col * h_cells) as f64 * h;
                (x - b.reach as f64 * h, x + b.reach as f64 * h)
            })
            .collect()
    };
    let strips = |row: usize, out: &mut Vec<Inclusion>| {
        for &(x0, x1) in &spans {
            out.push(Inclusion {
                rect: Rect::new(x0, x1, row as f64 * h, (row + 2) as f64 * h),
                value,
            });
        }
    };
    let mut out = Vec::new();
    match b.name.as_str() {
        "channels" if b.per_band => {
            for band in 0..bands {
                let gap = h_cells.saturating_sub(2 * b.count) / (b.count + 1);
                for k in 0..b.count {
                    strips(band * h_cells + gap + k * (2 + gap), &mut out);
                }
            }
        }
        "channels" => {
            for k in 1..=b.count {
                let centre = ((k * n) as f64 / (b.count + 1) as f64).round() as usize;
                strips(centre.clamp(1, n - 1) - 1, &mut out);
            }
        }
        "inclusions-crossing" => {
            let sizes = if b.sizes.is_empty() { vec![1, 2, 3] } else { b.sizes.clone() };
            let used: usize = sizes.iter().sum();
            let gap = h_cells.saturating_sub(used) / (sizes.len() + 1);
            if gap == 0 {
                return Err(Error::usage(format!(
                    "inclusion sizes {sizes:?} do not fit separated into a band of {h_cells} cells"
                )));
            }
            for band in 0..bands {
                for col in 1..bands {
                    let x = (col * h_cells) as f64 * h;
                    let mut y0 = band * h_cells + gap;
                    for &s in &sizes {
                        out.push(Inclusion {
                            rect: Rect::new(x - s as f64 * h, x + s as f64 * h, y0 as f64 * h, (y0 + s) as f64 * h),
                            value,
                        });
                        y0 += s + gap;
                    }
                }
            }
        }
        "checker" => {
            let w = h_cells as f64 * h;
            for jj in 0..bands {
                for ii in 0..bands {
                    if (ii + jj) % 2 == 1 {
                        out.push(Inclusion {
                            rect: Rect::new(ii as f64 * w, (ii + 1) as f64 * w, jj as f64 * w, (jj + 1) as f64 * w),
                            value,
                        });
                    }
                }
            }
        }
        _ => unreachable!("validated above"),
    }
    Ok(out)
}
