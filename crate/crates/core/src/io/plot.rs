//! gnuplot scripts laid out like the published figures: one panel per
//! duration, amplitude ratio or delay, one curve per `Δω`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{RunParams, RunResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub file: String,
    /// gnuplot dash type: 1 solid, 2 dashed, 4 dot-dashed.
    pub dash_type: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub curves: Vec<Curve>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotLayout {
    pub panels: Vec<Panel>,
}

const DASH_TYPES: [u8; 3] = [1, 2, 4];

#[derive(Clone, Copy, PartialEq)]
enum PanelAxis {
    Duration,
    AmplitudeRatio,
    Delay,
    Single,
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn ratio_label(r: f64) -> String {
    if r == 1.0 {
        "F₂=F₁".into()
    } else if (r - std::f64::consts::SQRT_2).abs() < 1e-12 {
        "F₂=√2F₁".into()
    } else {
        format!("F₂={r}F₁")
    }
}

fn delay_label(d: f64) -> String {
    if d == 1.0 {
        "t₂=t₁".into()
    } else {
        format!("t₂={d}t₁")
    }
}

fn panel_key(axis: PanelAxis, p: &RunParams) -> f64 {
    match axis {
        PanelAxis::Duration => p.tau_fwhm,
        PanelAxis::AmplitudeRatio => p.amplitude_ratio.unwrap_or(0.0),
        PanelAxis::Delay => p.delay_ratio.unwrap_or(0.0),
        PanelAxis::Single => 0.0,
    }
}

/// Groups runs into panels. `files[i]` is the time-series file of `results[i]`.
pub fn plot_layout(results: &[RunResult], files: &[String]) -> PlotLayout {
    let params: Vec<RunParams> = results.iter().map(|r| r.config.params).collect();
    let count = |f: fn(&RunParams) -> Option<f64>| distinct(params.iter().filter_map(f)).len();
    let axis = if count(|p| Some(p.tau_fwhm)) > 1 {
        PanelAxis::Duration
    } else if count(|p| p.amplitude_ratio) > 1 {
        PanelAxis::AmplitudeRatio
    } else if count(|p| p.delay_ratio) > 1 {
        PanelAxis::Delay
    } else {
        PanelAxis::Single
    };
    let strengths = distinct(params.iter().map(|p| p.delta_omega));
    let keys = distinct(params.iter().map(|p| panel_key(axis, p)));

    let panels = keys
        .iter()
        .map(|&key| {
            let first = params
                .iter()
                .find(|p| panel_key(axis, p) == key)
                .expect("key from params");
            let title = match axis {
                PanelAxis::Duration => format!("τ_FWHM={}", first.tau_fwhm),
                PanelAxis::AmplitudeRatio => ratio_label(key),
                PanelAxis::Delay => delay_label(key),
                PanelAxis::Single => format!("τ_FWHM={}", first.tau_fwhm),
            };
            let curves = params
                .iter()
                .zip(files)
                .filter(|(p, _)| panel_key(axis, p) == key)
                .map(|(p, file)| {
                    let rank = strengths.iter().position(|&s| s == p.delta_omega).unwrap_or(0);
                    Curve {
                        label: format!("Δω={}", p.delta_omega),
                        file: file.clone(),
                        dash_type: DASH_TYPES[rank % DASH_TYPES.len()],
                    }
                })
                .collect();
            Panel { title, curves }
        })
        .collect();
    PlotLayout { panels }
}

pub fn render_gnuplot(layout: &PlotLayout, image: &str) -> String {
    let n = layout.panels.len().max(1);
    let mut s = String::new();
    let _ = writeln!(s, "# alignment cosine vs time; run with `gnuplot plot.gp`");
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set datafile columnheaders");
    let _ = writeln!(s, "set terminal pngcairo size {},360 enhanced", 420 * n);
    let _ = writeln!(s, "set output \"{image}\"");
    let _ = writeln!(s, "set multiplot layout 1,{n}");
    let _ = writeln!(s, "set xlabel \"t\"");
    let _ = writeln!(s, "set ylabel \"<cos^2θ>\"");
    let _ = writeln!(s, "set yrange [0:1]");
    for panel in &layout.panels {
        let _ = writeln!(s, "set title \"{}\"", panel.title);
        let plots: Vec<String> = panel
            .curves
            .iter()
            .map(|c| {
                format!(
                    "\"{}\" using 1:2 with lines lc rgb \"black\" dt {} title \"{}\"",
                    c.file, c.dash_type, c.label
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    s
}

/// Writes the gnuplot script for `results` to `path` and returns its layout.
pub fn emit_plot_script(results: &[RunResult], files: &[String], path: &Path) -> Result<PlotLayout> {
    let layout = plot_layout(results, files);
    let image = path
        .with_extension("png")
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "alignment.png".into());
    std::fs::write(path, render_gnuplot(&layout, &image)).map_err(|e| Error::io(path, e))?;
    Ok(layout)
}
