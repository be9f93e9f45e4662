//! Deterministic result artifacts: CSV tables (fixed column order,
//! 17-significant-digit floats), a JSON-lines mirror, a parse-back reader,
//! and the run manifest.
//!
//! In single-thread mode the drivers' wall times are redacted to zero before
//! emission, making every artifact byte-reproducible for one config.

use crate::driver::ResultRow;
use crate::error::{QpError, Result};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

pub const CSV_COLUMNS: [&str; 13] = [
    "case",
    "N",
    "L",
    "e_N",
    "kappa",
    "value",
    "iterations",
    "wall_time",
    "entry_count",
    "cond_Q",
    "cond_QM",
    "diophantine_error",
    "rational",
];

fn fmt_f64(v: f64) -> String {
    // 17 significant digits round-trip any f64 exactly
    format!("{v:.16e}")
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn check_field(text: &str) -> Result<()> {
    if text.contains(',') || text.contains('\n') || text.contains('"') {
        return Err(QpError::Config(format!(
            "CSV field {text:?} needs quoting, which this format does not use"
        )));
    }
    Ok(())
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut out = String::new();
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for row in rows {
        check_field(&row.case)?;
        if let Some(r) = &row.rational {
            check_field(r)?;
        }
        let fields = [
            row.case.clone(),
            row.n.to_string(),
            row.l.map(|l| l.to_string()).unwrap_or_default(),
            fmt_opt_f64(row.e_n),
            fmt_opt_f64(row.kappa),
            fmt_opt_f64(row.value),
            row.iterations.map(|i| i.to_string()).unwrap_or_default(),
            fmt_opt_f64(row.wall_time),
            row.entry_count.map(|c| c.to_string()).unwrap_or_default(),
            fmt_opt_f64(row.cond_q),
            fmt_opt_f64(row.cond_qm),
            fmt_opt_f64(row.diophantine_error),
            row.rational.clone().unwrap_or_default(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Parse a CSV produced by [`rows_to_csv`] back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| QpError::Config("empty CSV".into()))?;
    if header != CSV_COLUMNS.join(",") {
        return Err(QpError::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != CSV_COLUMNS.len() {
            return Err(QpError::Config(format!(
                "line {}: {} fields, expected {}",
                lineno + 2,
                fields.len(),
                CSV_COLUMNS.len()
            )));
        }
        let opt_f64 = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|e| QpError::Config(format!("line {}: {e}", lineno + 2)))
            }
        };
        let opt_usize = |s: &str| -> Result<Option<usize>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<usize>()
                    .map(Some)
                    .map_err(|e| QpError::Config(format!("line {}: {e}", lineno + 2)))
            }
        };
        rows.push(ResultRow {
            case: fields[0].to_string(),
            n: fields[1]
                .parse()
                .map_err(|e| QpError::Config(format!("line {}: {e}", lineno + 2)))?,
            l: if fields[2].is_empty() {
                None
            } else {
                Some(
                    fields[2]
                        .parse()
                        .map_err(|e| QpError::Config(format!("line {}: {e}", lineno + 2)))?,
                )
            },
            e_n: opt_f64(fields[3])?,
            kappa: opt_f64(fields[4])?,
            value: opt_f64(fields[5])?,
            iterations: opt_usize(fields[6])?,
            wall_time: opt_f64(fields[7])?,
            entry_count: opt_usize(fields[8])?,
            cond_q: opt_f64(fields[9])?,
            cond_qm: opt_f64(fields[10])?,
            diophantine_error: opt_f64(fields[11])?,
            rational: if fields[12].is_empty() {
                None
            } else {
                Some(fields[12].to_string())
            },
        });
    }
    Ok(rows)
}

pub fn rows_to_jsonl(rows: &[ResultRow]) -> Result<String> {
    let mut out = String::new();
    for row in rows {
        out.push_str(
            &serde_json::to_string(row)
                .map_err(|e| QpError::Config(format!("serialize row: {e}")))?,
        );
        out.push('\n');
    }
    Ok(out)
}

/// Zero the wall-time column of every row (single-thread reproducible mode).
pub fn redact_timing(rows: &mut [ResultRow]) {
    for row in rows {
        if row.wall_time.is_some() {
            row.wall_time = Some(0.0);
        }
    }
}

fn write_guarded(path: &Path, content: &str, overwrite: bool) -> Result<()> {
    if path.exists() && !overwrite {
        return Err(QpError::WouldOverwrite(path.display().to_string()));
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, content)?;
    Ok(())
}

/// Write the CSV table and its JSON-lines mirror next to each other.
pub fn emit_reports(rows: &[ResultRow], dir: &Path, stem: &str, overwrite: bool) -> Result<()> {
    write_guarded(&dir.join(format!("{stem}.csv")), &rows_to_csv(rows)?, overwrite)?;
    write_guarded(
        &dir.join(format!("{stem}.jsonl")),
        &rows_to_jsonl(rows)?,
        overwrite,
    )?;
    Ok(())
}

/// One JSON line per solve: the raw iteration/residual reports.
pub fn reports_to_jsonl(reports: &[crate::solver::SolveReport]) -> Result<String> {
    let mut out = String::new();
    for r in reports {
        out.push_str(
            &serde_json::to_string(r)
                .map_err(|e| QpError::Config(format!("serialize report: {e}")))?,
        );
        out.push('\n');
    }
    Ok(out)
}

/// Write the per-solve reports next to the tables.
pub fn emit_solve_reports(
    reports: &[crate::solver::SolveReport],
    dir: &Path,
    overwrite: bool,
) -> Result<()> {
    write_guarded(
        &dir.join("solve_reports.jsonl"),
        &reports_to_jsonl(reports)?,
        overwrite,
    )
}

/// Run manifest: hash of the config document, tool version, thread count.
pub fn write_manifest(
    dir: &Path,
    config_text: &str,
    threads: usize,
    row_count: usize,
    overwrite: bool,
) -> Result<()> {
    let mut hasher = Sha256::new();
    hasher.update(config_text.as_bytes());
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let manifest = serde_json::json!({
        "config_sha256": hex,
        "tool": "qpsolve",
        "version": env!("CARGO_PKG_VERSION"),
        "threads": threads,
        "rows": row_count,
        "timing_redacted": threads == 1,
    });
    write_guarded(
        &dir.join("manifest.json"),
        &format!("{}\n", serde_json::to_string_pretty(&manifest).unwrap()),
        overwrite,
    )
}
