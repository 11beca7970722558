//! Parameter sweeps over pulse strength, duration, amplitude ratio and delay.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::angular::{build_basis, build_quadrature};
use crate::error::{Error, Result};
use crate::field::{CouplingSet, FieldConfig, InteractionMode, PulseSpec};
use crate::propagator::{propagate, PropagationPlan, TimeSeries};
use crate::state::initial_eigenstate;

/// Envelope peaks sit this many FWHMs after the start of the window.
pub const CENTER_WIDTHS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorMode {
    OneColor,
    TwoColor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtControl {
    Fixed,
    /// Halve `dt` until the Richardson estimate of the final alignment error is below tolerance.
    Richardson,
}

/// Plan and model parameters shared by every run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub interaction: InteractionMode,
    pub delta_omega_mu: f64,
    pub delta_omega_perp: f64,
    pub omega: Option<f64>,
    pub j_max: usize,
    pub m: i32,
    pub j_initial: usize,
    /// Grid size; `None` means `2 j_max + 1`.
    pub n_nodes: Option<usize>,
    pub dt: f64,
    pub dt_control: DtControl,
    pub richardson_tol: f64,
    pub max_halvings: u32,
    pub basis_check: bool,
    pub basis_tol: f64,
    pub t_start: f64,
    /// `None` means two rotational periods after the last envelope has died out.
    pub t_end: Option<f64>,
    pub record_every: usize,
    pub record_populations: bool,
    pub field_cutoff: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            interaction: InteractionMode::CycleAveraged,
            delta_omega_mu: 0.0,
            delta_omega_perp: 0.0,
            omega: None,
            j_max: 64,
            m: 0,
            j_initial: 0,
            n_nodes: None,
            dt: 1e-4,
            dt_control: DtControl::Richardson,
            richardson_tol: 1e-7,
            max_halvings: 4,
            basis_check: true,
            basis_tol: 1e-8,
            t_start: 0.0,
            t_end: None,
            record_every: 10,
            record_populations: false,
            field_cutoff: 1e-6,
        }
    }
}

impl RunSettings {
    /// Single fixed-step run with no convergence reruns.
    pub fn fixed_step(mut self) -> Self {
        self.dt_control = DtControl::Fixed;
        self.basis_check = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub delta_omegas: Vec<f64>,
    pub tau_fwhms: Vec<f64>,
    /// `F₂ / F₁`; ignored for one-color sweeps.
    pub amplitude_ratios: Vec<f64>,
    /// `t₂ / t₁`; ignored for one-color sweeps.
    pub delay_ratios: Vec<f64>,
    pub color_mode: ColorMode,
    pub settings: RunSettings,
}

/// The swept coordinates of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub delta_omega: f64,
    pub tau_fwhm: f64,
    pub amplitude_ratio: Option<f64>,
    pub delay_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub index: usize,
    pub params: RunParams,
    pub settings: RunSettings,
}

impl RunConfig {
    pub fn field(&self) -> Result<FieldConfig> {
        let p = &self.params;
        let s = &self.settings;
        let t1 = CENTER_WIDTHS * p.tau_fwhm;
        let mut pulses = vec![PulseSpec::new(1.0, p.tau_fwhm, s.t_start + t1, 1)?];
        if let (Some(ratio), Some(delay)) = (p.amplitude_ratio, p.delay_ratio) {
            pulses.push(PulseSpec::new(ratio, p.tau_fwhm, s.t_start + delay * t1, 2)?);
        }
        let couplings = CouplingSet {
            delta_omega: p.delta_omega,
            delta_omega_mu: s.delta_omega_mu,
            delta_omega_perp: s.delta_omega_perp,
        };
        FieldConfig::new(pulses, couplings, s.omega, s.interaction)
    }

    pub fn t_end(&self, field: &FieldConfig) -> f64 {
        self.settings
            .t_end
            .unwrap_or_else(|| field.switch_off_time(CENTER_WIDTHS) + 2.0 * PI)
    }

    /// Plan at the given basis size and step; `n_nodes` follows the settings rule.
    pub fn plan_with(&self, j_max: usize, dt: f64, record_every: usize) -> Result<PropagationPlan> {
        let s = &self.settings;
        let basis = build_basis(j_max, s.m)?;
        let n_nodes = match s.n_nodes {
            Some(n) if j_max == s.j_max => n,
            _ => 2 * j_max + 1,
        };
        let grid = build_quadrature(n_nodes, &basis)?;
        let field = self.field()?;
        let t_end = self.t_end(&field);
        Ok(PropagationPlan::new(s.t_start, t_end, dt, record_every, field, grid)?
            .with_populations(s.record_populations))
    }

    pub fn plan(&self) -> Result<PropagationPlan> {
        self.plan_with(self.settings.j_max, self.settings.dt, self.settings.record_every)
    }

    fn run_once(&self, j_max: usize, dt: f64, record_every: usize) -> Result<TimeSeries> {
        let plan = self.plan_with(j_max, dt, record_every)?;
        let state = initial_eigenstate(self.settings.j_initial, self.settings.m, plan.basis())?;
        propagate(&state, &plan)
    }
}

/// Post-pulse statistics of the alignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostPulse {
    pub mean: f64,
    /// max − min.
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub peak_alignment: f64,
    pub t_peak: f64,
    /// Maximum while the field is on (up to the last sample at or above the
    /// cutoff). Equal to `peak_alignment` for a field-free run.
    pub pulse_peak_alignment: f64,
    /// `None` when the field never drops below the cutoff inside the window.
    pub post_pulse: Option<PostPulse>,
    pub converged: bool,
}

impl RunSummary {
    pub fn post_pulse_mean(&self) -> Option<f64> {
        self.post_pulse.map(|p| p.mean)
    }

    pub fn post_pulse_amplitude(&self) -> Option<f64> {
        self.post_pulse.map(|p| p.amplitude)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: RunConfig,
    pub series: TimeSeries,
    pub summary: RunSummary,
}

/// Peak over the whole series; post-pulse statistics over the longest
/// suffix whose `|field|` stays below `field_cutoff` times its peak.
///
/// Panics on an empty series.
pub fn summarize(series: &TimeSeries, field_cutoff: f64) -> RunSummary {
    let records = &series.records;
    assert!(!records.is_empty(), "cannot summarize an empty series");
    let (t_peak, peak_alignment) =
        records
            .iter()
            .map(|r| (r.t, r.alignment))
            .fold(
                (f64::NAN, f64::NEG_INFINITY),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );

    let peak_field = records.iter().map(|r| r.field.abs()).fold(0.0, f64::max);
    let threshold = field_cutoff * peak_field;
    let last_on = records.iter().rposition(|r| r.field.abs() >= threshold);
    let start = if peak_field == 0.0 {
        Some(0)
    } else {
        match last_on {
            Some(i) if i + 1 < records.len() => Some(i + 1),
            _ => None,
        }
    };
    let pulse_peak_alignment = match last_on {
        Some(i) if peak_field > 0.0 => records[..=i]
            .iter()
            .map(|r| r.alignment)
            .fold(f64::NEG_INFINITY, f64::max),
        _ => peak_alignment,
    };
    let post_pulse = start.map(|i| {
        let tail = &records[i..];
        let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.alignment), hi.max(r.alignment))
        });
        PostPulse {
            mean: tail.iter().map(|r| r.alignment).sum::<f64>() / tail.len() as f64,
            amplitude: hi - lo,
        }
    });
    RunSummary {
        peak_alignment,
        t_peak,
        pulse_peak_alignment,
        post_pulse,
        converged: series.diagnostics.converged,
    }
}

/// Cartesian product of the sweep axes in lexicographic order
/// `(delta_omega, tau_fwhm, amplitude_ratio, delay_ratio)`, last axis fastest.
pub fn expand_sweep(spec: &SweepSpec) -> Result<Vec<RunConfig>> {
    let two_color = spec.color_mode == ColorMode::TwoColor;
    let mut axes = vec![("delta_omega", &spec.delta_omegas), ("tau_fwhm", &spec.tau_fwhms)];
    if two_color {
        axes.push(("amplitude_ratio", &spec.amplitude_ratios));
        axes.push(("delay_ratio", &spec.delay_ratios));
    }
    for (name, axis) in &axes {
        if axis.is_empty() {
            return Err(Error::InvalidSweep(format!("axis {name} is empty")));
        }
    }
    let ratios: Vec<Option<f64>> = if two_color {
        spec.amplitude_ratios.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let delays: Vec<Option<f64>> = if two_color {
        spec.delay_ratios.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };

    let mut runs = Vec::new();
    for &delta_omega in &spec.delta_omegas {
        for &tau_fwhm in &spec.tau_fwhms {
            for &amplitude_ratio in &ratios {
                for &delay_ratio in &delays {
                    runs.push(RunConfig {
                        index: runs.len(),
                        params: RunParams {
                            delta_omega,
                            tau_fwhm,
                            amplitude_ratio,
                            delay_ratio,
                        },
                        settings: spec.settings.clone(),
                    });
                }
            }
        }
    }
    Ok(runs)
}

/// Runs one configuration including the step and basis convergence controls
/// requested by its settings.
pub fn execute_run(config: &RunConfig) -> Result<RunResult> {
    let s = &config.settings;
    let mut dt = s.dt;
    let mut record_every = s.record_every;
    let mut series = config.run_once(s.j_max, dt, record_every)?;

    if s.dt_control == DtControl::Richardson {
        let mut halvings = 0;
        loop {
            let finer = config.run_once(s.j_max, dt / 2.0, record_every * 2)?;
            let estimate = (finer.final_alignment() - series.final_alignment()).abs() / 3.0;
            dt /= 2.0;
            record_every *= 2;
            halvings += 1;
            series = finer;
            series.diagnostics.richardson_error = Some(estimate);
            if estimate < s.richardson_tol || halvings >= s.max_halvings {
                break;
            }
        }
        log::debug!("run {}: dt settled at {dt:e} after {halvings} halvings", config.index);
    }

    if s.basis_check {
        let wide = config.run_once(2 * s.j_max, dt, record_every)?;
        series.diagnostics.basis_delta = Some((wide.final_alignment() - series.final_alignment()).abs());
    }
    series.diagnostics.refresh(s.richardson_tol, s.basis_tol);

    let summary = summarize(&series, s.field_cutoff);
    Ok(RunResult {
        config: config.clone(),
        series,
        summary,
    })
}

/// Executes every run of the sweep on `workers` threads.
///
/// Runs are dealt to workers round-robin by index and gathered back in
/// [`expand_sweep`] order, so results do not depend on the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<RunResult>> {
    if workers == 0 {
        return Err(Error::InvalidSweep("workers must be at least 1".into()));
    }
    let runs = expand_sweep(spec)?;
    run_configs(&runs, workers)
}

pub fn run_configs(runs: &[RunConfig], workers: usize) -> Result<Vec<RunResult>> {
    let workers = workers.clamp(1, runs.len().max(1));
    let mut slots: Vec<Option<Result<RunResult>>> = (0..runs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    runs.iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, run)| (i, execute_run(run)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("sweep worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every run is assigned")).collect()
}

/// Canned sweeps reproducing the published parameter studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// One color, three strengths × three durations.
    Fig1,
    /// Two colors of equal amplitude, three strengths × three durations.
    Fig2,
    /// Two colors at τ = 0.05, amplitude ratio 1 and √2.
    Fig3,
    /// Two colors at τ = 0.05, second-harmonic delay 1, 1.5 and 2 times t₁.
    Fig4,
}

impl Figure {
    pub fn sweep(self, settings: RunSettings) -> SweepSpec {
        let strengths = vec![100.0, 400.0, 900.0];
        let durations = vec![0.05, 0.5, 5.0];
        let (tau_fwhms, amplitude_ratios, delay_ratios, color_mode) = match self {
            Figure::Fig1 => (durations, vec![1.0], vec![1.0], ColorMode::OneColor),
            Figure::Fig2 => (durations, vec![1.0], vec![1.0], ColorMode::TwoColor),
            Figure::Fig3 => (vec![0.05], vec![1.0, SQRT_2], vec![1.0], ColorMode::TwoColor),
            Figure::Fig4 => (vec![0.05], vec![1.0], vec![1.0, 1.5, 2.0], ColorMode::TwoColor),
        };
        SweepSpec {
            delta_omegas: strengths,
            tau_fwhms,
            amplitude_ratios,
            delay_ratios,
            color_mode,
            settings,
        }
    }
}
