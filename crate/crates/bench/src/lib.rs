//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use rotalign::angular::{build_basis, build_quadrature, AngularGrid};
use rotalign::sweep::{expand_sweep, Figure, RunConfig, RunSettings};
use rotalign::SpectralState;

/// Grid with the default `2 j_max + 1` nodes.
pub fn grid(j_max: usize) -> AngularGrid {
    let basis = build_basis(j_max, 0).expect("valid basis");
    build_quadrature(2 * j_max + 1, &basis).expect("valid grid")
}

/// A state with every coefficient populated, so no transform shortcut applies.
pub fn spread_state(grid: &AngularGrid) -> SpectralState {
    let dim = grid.basis().dim();
    let raw: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::from_polar(1.0 / (1.0 + i as f64), 0.37 * i as f64))
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    SpectralState::new(*grid.basis(), raw.into_iter().map(|c| c / norm).collect()).expect("dimension matches")
}

/// One-color run at `Δω`, `τ` with a fixed step and no convergence reruns.
pub fn fixed_run(delta_omega: f64, tau: f64, j_max: usize, dt: f64, t_end: f64) -> RunConfig {
    let settings = RunSettings {
        j_max,
        dt,
        t_end: Some(t_end),
        ..RunSettings::default().fixed_step()
    };
    let mut spec = Figure::Fig1.sweep(settings);
    spec.delta_omegas = vec![delta_omega];
    spec.tau_fwhms = vec![tau];
    expand_sweep(&spec).expect("valid sweep").remove(0)
}
