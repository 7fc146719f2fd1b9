//! CSV and JSON writers for run records.
//!
//! CSV files use `,` as delimiter, `.` as decimal separator and LF line
//! endings. Floats are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::record::RunRecord;
use super::ScenarioError;
use crate::entanglement::concurrence;
use crate::manifold::{evolve_family, TorusPoint};

pub const CSV_HEADER: &str = "theta,phi,a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im,concurrence";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Json,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Grid rows: the evolved states if the record has them, otherwise the
/// concurrence profile at `φ = 0`.
pub fn csv_rows(record: &RunRecord) -> Result<String, ScenarioError> {
    let mut rows: Vec<(f64, f64, [num_complex::Complex64; 4], f64)> = Vec::new();
    if let Some(samples) = record.evolved_states() {
        rows.extend(samples.iter().map(|s| (s.theta, s.phi, s.state.amplitudes(), s.concurrence)));
    } else if let Some(profile) = record.profile() {
        let initial = record.config.initial_state()?;
        for &(theta, c) in &profile.samples {
            let state = evolve_family(&initial, TorusPoint::new(theta, 0.0));
            debug_assert!((concurrence(&state) - c).abs() < 1e-9);
            rows.push((theta, 0.0, state.amplitudes(), c));
        }
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (theta, phi, amps, c) in rows {
        let mut fields = vec![num(theta), num(phi)];
        for z in amps {
            fields.push(num(z.re));
            fields.push(num(z.im));
        }
        fields.push(num(c));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// `key,value` lines for the metric and classification outputs, or `None`
/// when the record has neither.
pub fn csv_header_block(record: &RunRecord) -> Option<String> {
    let metric = record.metric();
    let report = record.classification();
    if metric.is_none() && report.is_none() {
        return None;
    }
    let mut out = String::from("key,value\n");
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k},{v}");
    };
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    line("gamma", num(record.config.params.gamma));
    if let Some(m) = metric {
        line("g_tt", num(m.analytic.g_tt));
        line("g_tp", num(m.analytic.g_tp));
        line("g_pp", num(m.analytic.g_pp));
        line("k", opt(m.analytic.k));
        line("g_tt_diag", opt(m.analytic.g_tt_diag));
        line("g_pp_diag", num(m.analytic.g_pp_diag));
        line("metric_oracle_residual", num(m.oracle_residual));
    }
    if let Some(r) = report {
        line("kind", format!("{:?}", r.kind));
        line("dimension", r.dimension.to_string());
        line("invariant_a", num(r.invariants.a));
        line("invariant_b", num(r.invariants.b));
        line("invariant_d", num(r.invariants.d));
        line("circle_radius", opt(r.circle_radius));
        line("circle_direction", r.circle_direction.map(|d| format!("{d:?}").to_lowercase()).unwrap_or_default());
        line("radius_extrapolated", r.radius_extrapolated.to_string());
        line("flatness_residual", num(r.flatness_residual));
    }
    Some(out)
}

/// Path of the header-block file that accompanies a CSV export:
/// `run.csv` becomes `run.meta.csv`.
pub fn header_block_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.csv"))
}

fn write(path: &Path, contents: &str) -> Result<(), ScenarioError> {
    std::fs::write(path, contents).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}

/// Writes `record` to `path`. CSV exports also write the header block next
/// to it (see [`header_block_path`]) when there is one.
pub fn export(record: &RunRecord, format: ExportFormat, path: &Path) -> Result<(), ScenarioError> {
    match format {
        ExportFormat::Json => write(path, &record.to_json()),
        ExportFormat::Csv => {
            write(path, &csv_rows(record)?)?;
            if let Some(block) = csv_header_block(record) {
                write(&header_block_path(path), &block)?;
            }
            Ok(())
        }
    }
}
