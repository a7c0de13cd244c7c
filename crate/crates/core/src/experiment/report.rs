//! CSV and markdown rendering of result rows.

use std::fmt::Write;
use std::str::FromStr;

use super::ResultRow;
use crate::coarse::InterfaceSpectrum;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::Usage(format!("unknown format {other:?} (csv or markdown)"))),
        }
    }
}

pub const CSV_HEADER: &str = "method,m,contrast,delta,coarse_dim,iterations,kappa,lambda_m_plus_1,final_relres,converged";

/// Three significant digits in the `3.64e6` style.
fn sci(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.2e}")
    }
}

fn csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let converged = if r.error.is_some() { "error" } else if r.converged { "true" } else { "false" };
        writeln!(
            out,
            "{},{},{:e},{},{},{},{},{},{},{}",
            r.method,
            r.m,
            r.contrast,
            r.delta,
            r.coarse_dim,
            r.iterations,
            sci(r.kappa_estimate),
            sci(r.lambda_m_plus_1),
            sci(r.final_relres),
            converged
        )
        .unwrap();
    }
    out
}

fn column_key(r: &ResultRow, many_deltas: bool) -> String {
    let mut key = match r.m.as_str() {
        _ if r.method == "ms" || r.method == "ohem" => r.method.clone(),
        m => format!("{}_{m}", r.method),
    };
    if many_deltas {
        write!(key, " δ={}", r.delta).unwrap();
    }
    key
}

/// Contrast by method table with `#it. (kappa)` cells; `*` marks runs that
/// did not converge.
fn markdown(rows: &[ResultRow]) -> String {
    let many_deltas = rows.iter().any(|r| r.delta != rows[0].delta);
    let mut columns: Vec<String> = Vec::new();
    let mut contrasts: Vec<f64> = Vec::new();
    for r in rows {
        let k = column_key(r, many_deltas);
        if !columns.contains(&k) {
            columns.push(k);
        }
        if !contrasts.contains(&r.contrast) {
            contrasts.push(r.contrast);
        }
    }
    let mut out = String::from("| contrast |");
    for c in &columns {
        write!(out, " {c} |").unwrap();
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(columns.len()));
    out.push('\n');
    for &c in &contrasts {
        write!(out, "| {c:e} |").unwrap();
        for col in &columns {
            let cell = rows
                .iter()
                .find(|r| r.contrast == c && &column_key(r, many_deltas) == col)
                .map(|r| match &r.error {
                    Some(_) => "error".to_string(),
                    None => format!(
                        "{}{} ({})",
                        r.iterations,
                        if r.converged { "" } else { "*" },
                        sci(r.kappa_estimate)
                    ),
                })
                .unwrap_or_default();
            write!(out, " {cell} |").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn emit_report(rows: &[ResultRow], format: Format) -> String {
    match format {
        Format::Csv => csv(rows),
        Format::Markdown if rows.is_empty() => "| contrast |\n|---|\n".into(),
        Format::Markdown => markdown(rows),
    }
}

/// `interface_id,k,lambda` rows, `k` counting from 1.
pub fn spectrum_csv(spectra: &[InterfaceSpectrum]) -> String {
    let mut out = String::from("interface_id,k,lambda\n");
    for s in spectra {
        for (k, l) in s.eigenvalues.iter().enumerate() {
            writeln!(out, "{},{},{:e}", s.interface, k + 1, l).unwrap();
        }
    }
    out
}
