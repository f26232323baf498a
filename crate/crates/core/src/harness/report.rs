use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ComparisonTable, HarnessError, Method};
use crate::pencil::DominantModeReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// One table row as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub channel: String,
    pub method: Method,
    pub f_dom_hz: Option<f64>,
    pub deviation_hz: Option<f64>,
    pub config: String,
    pub error: Option<String>,
}

/// The JSON report document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub band_hz: [f64; 2],
    pub reference_hz: Option<f64>,
    pub rows: Vec<ReportRow>,
}

impl ReportDocument {
    pub fn from_table(table: &ComparisonTable) -> Self {
        Self {
            band_hz: [table.band.f_lo, table.band.f_hi],
            reference_hz: table.reference_f,
            rows: table.rows(),
        }
    }
}

/// Writes the table to `path`.
///
/// CSV columns are `channel,method,f_dom_hz,deviation_hz,config`. A failed
/// cell leaves both numeric fields empty and appends `;error=<message>` to
/// its config.
pub fn emit_report(table: &ComparisonTable, format: ReportFormat, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_report(table, format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_report(table: &ComparisonTable, format: ReportFormat, out: impl Write) -> Result<(), HarnessError> {
    match format {
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &ReportDocument::from_table(table))
                .map_err(|e| HarnessError::Io(e.to_string()))?;
            writeln!(out)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["channel", "method", "f_dom_hz", "deviation_hz", "config"])?;
            for row in table.rows() {
                let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                let config = match &row.error {
                    Some(e) => format!("{};error={e}", row.config),
                    None => row.config.clone(),
                };
                w.write_record([
                    row.channel.as_str(),
                    row.method.name(),
                    &num(row.f_dom_hz),
                    &num(row.deviation_hz),
                    &config,
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Writes one `freq_hz,power` file per successful cell into `dir`, named
/// `<channel>_<method>.csv`. Returns the paths written, in table order.
pub fn write_spectra(table: &ComparisonTable, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, HarnessError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for cell in &table.cells {
        let Some(spectrum) = &cell.spectrum else {
            continue;
        };
        let safe: String = cell
            .channel
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
            .collect();
        let path = dir.join(format!("{safe}_{}.csv", cell.method));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["freq_hz", "power"])?;
        for (f, p) in spectrum.freqs().iter().zip(spectrum.power()) {
            w.write_record([f.to_string(), p.to_string()])?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Sliding-window dominant modes, one row per window.
pub fn write_window_reports(reports: &[DominantModeReport], out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "window_start_s",
        "window_len_s",
        "f_hz",
        "alpha",
        "amplitude",
        "phase",
        "energy",
        "damping_ratio",
        "n_modes",
    ])?;
    for r in reports {
        let m = &r.dominant;
        w.write_record([
            r.window_start_s.to_string(),
            r.window_len_s.to_string(),
            m.f.to_string(),
            m.alpha.to_string(),
            m.amplitude.to_string(),
            m.phase.to_string(),
            m.energy.to_string(),
            m.damping_ratio().to_string(),
            r.all_modes.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
