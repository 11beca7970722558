//! Strang split-operator propagation of the rotor wavefunction.
//!
//! One step is `exp(−iV dt/2) · exp(−iJ² dt) · exp(−iV dt/2)` with `V`
//! frozen at the step midpoint. The kinetic factor is diagonal in the
//! spectral basis; the potential factor is diagonal on the Gauss–Legendre
//! grid and is applied by synthesis, pointwise phase, and analysis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{AngularGrid, BasisDescriptor};
use crate::error::{Error, Result};
use crate::field::{effective_couplings, field_proxy, FieldConfig, InteractionCoefficients};
use crate::observables::{edge_population, ObservableRecord, Observables};
use crate::state::SpectralState;

/// Runs whose norm wanders further than this are flagged non-converged.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
/// Truncation guard on `p_{j_max} + p_{j_max−1}`.
pub const EDGE_POPULATION_LIMIT: f64 = 1e-8;

/// Potential phases smaller than this everywhere on the grid are below
/// double-precision resolution of a unit-norm state, so the factor is skipped.
const PHASE_FLOOR: f64 = 1e-19;

#[derive(Debug, Clone)]
pub struct PropagationPlan {
    t_start: f64,
    t_end: f64,
    dt: f64,
    record_every: usize,
    record_populations: bool,
    field: FieldConfig,
    grid: AngularGrid,
}

impl PropagationPlan {
    pub fn new(
        t_start: f64,
        t_end: f64,
        dt: f64,
        record_every: usize,
        field: FieldConfig,
        grid: AngularGrid,
    ) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::InvalidPlan(format!(
                "need t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        if !(dt > 0.0 && dt <= t_end - t_start) {
            return Err(Error::InvalidPlan(format!(
                "dt must lie in (0, t_end - t_start], got {dt}"
            )));
        }
        if record_every == 0 {
            return Err(Error::InvalidPlan("record_every must be at least 1".into()));
        }
        let j_max = grid.basis().j_max() as f64;
        if dt * j_max * (j_max + 1.0) > 2.0 * std::f64::consts::PI {
            log::warn!(
                "dt * j_max(j_max+1) = {:.3} exceeds 2π; the top rotor levels wrap a full phase per step",
                dt * j_max * (j_max + 1.0)
            );
        }
        Ok(Self {
            t_start,
            t_end,
            dt,
            record_every,
            record_populations: false,
            field,
            grid,
        })
    }

    pub fn with_populations(mut self, on: bool) -> Self {
        self.record_populations = on;
        self
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }

    pub fn record_populations(&self) -> bool {
        self.record_populations
    }

    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn basis(&self) -> &BasisDescriptor {
        self.grid.basis()
    }

    /// Same plan with a different step and recording stride.
    pub fn with_step(&self, dt: f64, record_every: usize) -> Result<Self> {
        Ok(Self::new(
            self.t_start,
            self.t_end,
            dt,
            record_every,
            self.field.clone(),
            self.grid.clone(),
        )?
        .with_populations(self.record_populations))
    }

    /// Number of full steps and the length of the trailing short step (0 if none).
    pub fn step_layout(&self) -> (usize, f64) {
        let span = self.t_end - self.t_start;
        let mut full = (span / self.dt).floor() as usize;
        let mut rest = span - full as f64 * self.dt;
        if rest <= 1e-9 * self.dt {
            rest = 0.0;
        } else if rest >= (1.0 - 1e-9) * self.dt {
            full += 1;
            rest = 0.0;
        }
        (full, rest)
    }
}

/// Per-run health indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub steps: usize,
    pub dt: f64,
    pub max_norm_drift: f64,
    pub max_edge_population: f64,
    /// Richardson estimate of the error in the final alignment, when step control ran.
    pub richardson_error: Option<f64>,
    /// Change of the final alignment under doubling of `j_max`, when checked.
    pub basis_delta: Option<f64>,
    pub converged: bool,
}

impl RunDiagnostics {
    fn new(dt: f64) -> Self {
        Self {
            steps: 0,
            dt,
            max_norm_drift: 0.0,
            max_edge_population: 0.0,
            richardson_error: None,
            basis_delta: None,
            converged: true,
        }
    }

    pub(crate) fn refresh(&mut self, richardson_tol: f64, basis_tol: f64) {
        self.converged = self.max_norm_drift <= NORM_DRIFT_LIMIT
            && self.max_edge_population < EDGE_POPULATION_LIMIT
            && self.richardson_error.is_none_or(|e| e < richardson_tol)
            && self.basis_delta.is_none_or(|d| d < basis_tol);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub basis: BasisDescriptor,
    pub records: Vec<ObservableRecord>,
    pub diagnostics: RunDiagnostics,
}

impl TimeSeries {
    pub fn final_alignment(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.alignment)
    }
}

/// Split-operator stepper with its scratch space.
pub struct SplitOperator<'a> {
    grid: &'a AngularGrid,
    energies: Vec<f64>,
    values: Vec<Complex64>,
}

impl<'a> SplitOperator<'a> {
    pub fn new(grid: &'a AngularGrid) -> Self {
        Self {
            grid,
            energies: grid.basis().rotor_energies(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_nodes()],
        }
    }

    /// One Strang step with the potential held at `potential`.
    pub fn step_with(&mut self, c: &mut [Complex64], potential: InteractionCoefficients, dt: f64) {
        self.apply_potential(c, potential, 0.5 * dt);
        self.apply_kinetic(c, dt);
        self.apply_potential(c, potential, 0.5 * dt);
    }

    /// One Strang step from `t` with the field's potential at `t + dt/2`.
    pub fn step(&mut self, c: &mut [Complex64], field: &FieldConfig, t: f64, dt: f64) {
        let potential = effective_couplings(t + 0.5 * dt, field);
        self.step_with(c, potential, dt);
    }

    fn apply_kinetic(&self, c: &mut [Complex64], dt: f64) {
        for (c, &e) in c.iter_mut().zip(&self.energies) {
            *c *= Complex64::from_polar(1.0, -e * dt);
        }
    }

    fn apply_potential(&mut self, c: &mut [Complex64], potential: InteractionCoefficients, tau: f64) {
        if potential.bound() * tau.abs() <= PHASE_FLOOR {
            return;
        }
        self.grid.synthesize_scaled_into(c, &mut self.values);
        for (v, &x) in self.values.iter_mut().zip(self.grid.nodes()) {
            *v *= Complex64::from_polar(1.0, -potential.potential(x) * tau);
        }
        self.grid.analyze_scaled_into(&self.values, c);
    }
}

pub fn strang_step(state: &SpectralState, t: f64, dt: f64, plan: &PropagationPlan) -> Result<SpectralState> {
    check_basis(state, plan)?;
    let mut out = state.clone();
    SplitOperator::new(plan.grid()).step(out.coefficients_mut(), plan.field(), t, dt);
    Ok(out)
}

/// Integrates from `t_start` to `t_end`, recording every `record_every`
/// steps and always at `t_end`. A trailing partial step is taken as one
/// shortened step.
pub fn propagate(state: &SpectralState, plan: &PropagationPlan) -> Result<TimeSeries> {
    propagate_with_final(state, plan).map(|(series, _)| series)
}

/// [`propagate`], also returning the state at `t_end`.
pub fn propagate_with_final(state: &SpectralState, plan: &PropagationPlan) -> Result<(TimeSeries, SpectralState)> {
    check_basis(state, plan)?;
    let mut stepper = SplitOperator::new(plan.grid());
    let field = plan.field();
    drive(state, plan, |c, t, dt| stepper.step(c, field, t, dt))
}

fn check_basis(state: &SpectralState, plan: &PropagationPlan) -> Result<()> {
    if state.basis() != plan.basis() {
        return Err(Error::DimensionMismatch {
            expected: plan.basis().dim(),
            found: state.dim(),
        });
    }
    Ok(())
}

/// Shared stepping and recording loop for the split operator and the oracle.
pub(crate) fn drive<F>(
    state: &SpectralState,
    plan: &PropagationPlan,
    mut step: F,
) -> Result<(TimeSeries, SpectralState)>
where
    F: FnMut(&mut [Complex64], f64, f64),
{
    let observables = Observables::new(plan.basis());
    let mut current = state.clone();
    let norm0 = current.norm();
    let mut diagnostics = RunDiagnostics::new(plan.dt());
    let mut records = Vec::new();

    let push = |s: &SpectralState, t: f64, records: &mut Vec<ObservableRecord>, d: &mut RunDiagnostics| {
        let rec = observables.record(s, t, field_proxy(t, plan.field()), plan.record_populations());
        d.max_norm_drift = d.max_norm_drift.max((rec.norm - norm0).abs());
        d.max_edge_population = d.max_edge_population.max(edge_population(s));
        records.push(rec);
    };

    push(&current, plan.t_start(), &mut records, &mut diagnostics);
    let (full, rest) = plan.step_layout();
    let dt = plan.dt();
    for s in 0..full {
        let t = plan.t_start() + s as f64 * dt;
        step(current.coefficients_mut(), t, dt);
        let done = s + 1;
        let last = done == full && rest == 0.0;
        if done % plan.record_every() == 0 || last {
            let t_rec = if last {
                plan.t_end()
            } else {
                plan.t_start() + done as f64 * dt
            };
            push(&current, t_rec, &mut records, &mut diagnostics);
        }
    }
    if rest > 0.0 {
        let t = plan.t_start() + full as f64 * dt;
        step(current.coefficients_mut(), t, rest);
        push(&current, plan.t_end(), &mut records, &mut diagnostics);
    }
    diagnostics.steps = full + usize::from(rest > 0.0);
    diagnostics.refresh(f64::INFINITY, f64::INFINITY);
    let series = TimeSeries {
        basis: *plan.basis(),
        records,
        diagnostics,
    };
    Ok((series, current))
}
