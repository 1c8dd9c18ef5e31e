use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use thiserror::Error;

#[derive(Debug, Args)]
pub struct DiffArgs {
    /// Baseline results.csv.
    pub a: PathBuf,
    /// Candidate results.csv.
    pub b: PathBuf,
    /// Largest tolerated relative delta; exceeding it exits with code 3.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("grid mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read(path: &Path) -> Result<Table, DiffError> {
    let err = |source| DiffError::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let header = r.headers().map_err(err)?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    Ok(Table { header, rows })
}

/// Relative delta with `max(|a|, |b|)` as scale; NaN on both sides counts as equal.
fn relative(a: f64, b: f64) -> f64 {
    if a.is_nan() && b.is_nan() || a == b {
        0.0
    } else if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn run(args: &DiffArgs) -> Result<ExitCode, DiffError> {
    let a = read(&args.a)?;
    let b = read(&args.b)?;
    if a.header != b.header {
        return Err(DiffError::Mismatch("headers differ".into()));
    }
    if a.rows.len() != b.rows.len() {
        return Err(DiffError::Mismatch(format!("{} rows vs {} rows", a.rows.len(), b.rows.len())));
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "scenario,T_in_K,column,a,b,abs_delta,rel_delta")?;
    let mut worst = 0.0_f64;
    for (i, (ra, rb)) in a.rows.iter().zip(&b.rows).enumerate() {
        if ra.len() < 2 || ra[..2] != rb[..2] {
            return Err(DiffError::Mismatch(format!(
                "row {}: `{}` vs `{}`",
                i + 1,
                ra.get(..2).map(|k| k.join(",")).unwrap_or_default(),
                rb.get(..2).map(|k| k.join(",")).unwrap_or_default()
            )));
        }
        for (j, col) in a.header.iter().enumerate().skip(2) {
            let (Some(sa), Some(sb)) = (ra.get(j), rb.get(j)) else {
                return Err(DiffError::Mismatch(format!("row {} is short", i + 1)));
            };
            let (Ok(va), Ok(vb)) = (sa.parse::<f64>(), sb.parse::<f64>()) else {
                if sa != sb {
                    worst = f64::INFINITY;
                }
                continue;
            };
            let rel = relative(va, vb);
            worst = worst.max(rel);
            writeln!(out, "{},{},{col},{va},{vb},{},{rel}", ra[0], ra[1], (va - vb).abs())?;
        }
    }
    eprintln!("largest relative delta: {worst}");
    Ok(match args.threshold {
        Some(t) if worst > t => ExitCode::from(3),
        _ => ExitCode::SUCCESS,
    })
}
