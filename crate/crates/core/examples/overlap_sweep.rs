//! Multiscale coarse space at contrast 1e6 with growing overlap, via the
//! config-driven sweep runner. Once the overlap swallows the channel segments
//! the iteration count collapses.
//!
//! cargo run --release --example overlap_sweep

use hemdd::experiment::{emit_report, parse_config, run_sweep, Format};

const CONFIG: &str = r#"{
  "mesh": {"n": 64},
  "partition": {"H_cells": 16, "delta_layers": 2},
  "alpha": {"contrast": 1e6,
            "benchmark": {"name": "channels", "count": 3, "per_band": true, "reach": 4}},
  "coarse": {"type": "ms"},
  "sweep": {"delta": [1, 2, 4, 6, 8, 12, 16]}
}"#;

fn main() -> hemdd::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let rows = run_sweep(&cfg);
    print!("{}", emit_report(&rows, Format::Csv));
    println!();
    print!("{}", emit_report(&rows, Format::Markdown));
    Ok(())
}
