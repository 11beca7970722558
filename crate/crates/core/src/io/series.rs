//! CSV persistence of time series and run summaries.
//!
//! Numbers use Rust's shortest round-trip formatting, so a value read back
//! parses to the identical `f64` and re-emitting reproduces the bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::observables::ObservableRecord;
use crate::propagator::TimeSeries;
use crate::sweep::RunResult;

const BASE_COLUMNS: [&str; 5] = ["t", "alignment", "orientation", "norm", "field"];

pub(crate) fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `t,alignment,orientation,norm,field`, plus `p<J>` columns when
/// populations were recorded.
pub fn write_timeseries_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    write_records_csv(&series.records, series.basis.j_min(), path)
}

pub fn write_records_csv(records: &[ObservableRecord], j_min: usize, path: &Path) -> Result<()> {
    let n_pop = records.first().and_then(|r| r.populations.as_ref()).map_or(0, Vec::len);
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));

    let mut header: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..n_pop).map(|i| format!("p{}", j_min + i)));
    w.write_record(&header).map_err(|e| csv_error(path, e))?;

    for r in records {
        let mut row = vec![
            num(r.t),
            num(r.alignment),
            num(r.orientation),
            num(r.norm),
            num(r.field),
        ];
        if let Some(p) = &r.populations {
            row.extend(p.iter().copied().map(num));
        }
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`write_timeseries_csv`]. Returns the records and
/// the lowest `J` of the population columns, if any.
pub fn read_timeseries_csv(path: &Path) -> Result<(Vec<ObservableRecord>, Option<usize>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let malformed = |reason: String| Error::CsvFormat {
        path: path.to_path_buf(),
        reason,
    };
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < BASE_COLUMNS.len() || header.iter().zip(BASE_COLUMNS).any(|(a, b)| a != b) {
        return Err(malformed(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let j_min = match header.get(BASE_COLUMNS.len()) {
        Some(col) => Some(
            col.strip_prefix('p')
                .and_then(|j| j.parse::<usize>().ok())
                .ok_or_else(|| malformed(format!("bad population column {col}")))?,
        ),
        None => None,
    };

    let mut records = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let values = row
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| malformed(format!("row {}: {e}", line + 2)))?;
        if values.len() != header.len() {
            return Err(malformed(format!("row {} has {} fields", line + 2, values.len())));
        }
        records.push(ObservableRecord {
            t: values[0],
            alignment: values[1],
            orientation: values[2],
            norm: values[3],
            field: values[4],
            populations: j_min.map(|_| values[5..].to_vec()),
        });
    }
    Ok((records, j_min))
}

pub const SUMMARY_HEADER: [&str; 18] = [
    "index",
    "delta_omega",
    "tau_fwhm",
    "amplitude_ratio",
    "delay_ratio",
    "peak_alignment",
    "t_peak",
    "pulse_peak_alignment",
    "post_pulse_mean",
    "post_pulse_amplitude",
    "converged",
    "dt",
    "steps",
    "max_norm_drift",
    "max_edge_population",
    "richardson_error",
    "basis_delta",
    "file",
];

/// One row per run: swept parameters, summary metrics, diagnostics, and the
/// name of the run's time-series file.
pub fn write_summary_csv(results: &[RunResult], files: &[String], path: &Path) -> Result<()> {
    let mut out = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(SUMMARY_HEADER).map_err(|e| csv_error(path, e))?;
        for (r, file) in results.iter().zip(files) {
            let p = &r.config.params;
            let s = &r.summary;
            let d = &r.series.diagnostics;
            w.write_record([
                r.config.index.to_string(),
                num(p.delta_omega),
                num(p.tau_fwhm),
                opt(p.amplitude_ratio),
                opt(p.delay_ratio),
                num(s.peak_alignment),
                num(s.t_peak),
                num(s.pulse_peak_alignment),
                opt(s.post_pulse_mean()),
                opt(s.post_pulse_amplitude()),
                s.converged.to_string(),
                num(d.dt),
                d.steps.to_string(),
                num(d.max_norm_drift),
                num(d.max_edge_population),
                opt(d.richardson_error),
                opt(d.basis_delta),
                file.clone(),
            ])
            .map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}
