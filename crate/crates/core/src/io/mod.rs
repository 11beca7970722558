//! Configuration, persistence, and plot emission.

pub mod config;
pub mod manifest;
pub mod plot;
pub mod series;

use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::RunResult;
use config::ResolvedConfig;
use manifest::RunManifest;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOT_FILE: &str = "plot.gp";
pub const MANIFEST_FILE: &str = "manifest.json";
/// Resolved configuration in input form; `--config` accepts it unchanged.
pub const CONFIG_FILE: &str = "config.toml";

/// Time-series file name of run `index`.
pub fn run_file_name(index: usize) -> String {
    format!("run_{index:03}.csv")
}

/// Writes per-run CSVs, the summary, the plot script, the resolved config and
/// the manifest into `dir`, creating it if needed. Returns the manifest.
pub fn write_outputs(dir: &Path, config: &ResolvedConfig, results: &[RunResult]) -> Result<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files: Vec<String> = results.iter().map(|r| run_file_name(r.config.index)).collect();
    for (r, f) in results.iter().zip(&files) {
        series::write_timeseries_csv(&r.series, &dir.join(f))?;
    }
    series::write_summary_csv(results, &files, &dir.join(SUMMARY_FILE))?;
    plot::emit_plot_script(results, &files, &dir.join(PLOT_FILE))?;
    let config_path = dir.join(CONFIG_FILE);
    std::fs::write(&config_path, config.to_toml()).map_err(|e| Error::io(&config_path, e))?;

    let mut outputs = files;
    outputs.extend([SUMMARY_FILE, PLOT_FILE, CONFIG_FILE, MANIFEST_FILE].map(String::from));
    let manifest = RunManifest::new(config, outputs);
    manifest.write(&dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}
