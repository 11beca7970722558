//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each, and exits non-zero if any criterion fails.
//!
//! Run alone with `cargo test -p rotalign-core --test acceptance`.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rotalign::angular::{build_basis, build_quadrature, cos2_theta_matrix, cos_theta_matrix};
use rotalign::field::{CouplingSet, FieldConfig, InteractionMode, PulseSpec};
use rotalign::observables::{alignment_cosine, ObservableRecord};
use rotalign::oracle::oracle_propagate;
use rotalign::propagator::{propagate, propagate_with_final, PropagationPlan};
use rotalign::state::initial_eigenstate;
use rotalign::sweep::{expand_sweep, run_sweep, Figure, RunConfig, RunResult, RunSettings, SweepSpec};
use rotalign::{SpectralState, TimeSeries};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn max_alignment_gap(a: &TimeSeries, b: &TimeSeries) -> f64 {
    assert_eq!(a.records.len(), b.records.len(), "record schedules differ");
    a.records
        .iter()
        .zip(&b.records)
        .map(|(x, y)| {
            assert!((x.t - y.t).abs() < 1e-9, "record times differ: {} vs {}", x.t, y.t);
            (x.alignment - y.alignment).abs()
        })
        .fold(0.0, f64::max)
}

fn single_run(delta_omega: f64, tau: f64, settings: RunSettings) -> RunConfig {
    let spec = SweepSpec {
        delta_omegas: vec![delta_omega],
        tau_fwhms: vec![tau],
        ..Figure::Fig1.sweep(settings)
    };
    expand_sweep(&spec).unwrap().remove(0)
}

fn fixed(j_max: usize, dt: f64, record_every: usize) -> RunSettings {
    RunSettings {
        j_max,
        dt,
        record_every,
        ..RunSettings::default().fixed_step()
    }
}

// ---- independent quadrature oracle -------------------------------------

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Textbook `P_l^m(x)` without the Condon–Shortley phase, by the unnormalized
/// recurrence, then scaled to unit norm on [-1, 1].
fn textbook_legendre(l: usize, m: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).sqrt();
    let double_fact: f64 = (1..=m).map(|k| (2 * k - 1) as f64).product();
    let mut p_prev = double_fact * s.powi(m as i32);
    let value = if l == m {
        p_prev
    } else {
        let mut p = x * (2 * m + 1) as f64 * p_prev;
        for ll in m + 2..=l {
            let next = (x * (2 * ll - 1) as f64 * p - (ll + m - 1) as f64 * p_prev) / (ll - m) as f64;
            p_prev = p;
            p = next;
        }
        p
    };
    value * ((2 * l + 1) as f64 / 2.0 * factorial(l - m) / factorial(l + m)).sqrt()
}

/// Composite Simpson in θ of `Ñ_j Ñ_k cosᵖθ sinθ`, all pairs `j, k ∈ [m, j_max]`.
fn simpson_elements(j_max: usize, m: usize, power: i32, intervals: usize) -> Vec<Vec<f64>> {
    let dim = j_max + 1 - m;
    let h = PI / intervals as f64;
    let mut acc = vec![vec![0.0; dim]; dim];
    let mut column = vec![0.0; dim];
    for i in 0..=intervals {
        let theta = i as f64 * h;
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let x = theta.cos();
        let f = w * x.powi(power) * theta.sin();
        if f == 0.0 {
            continue;
        }
        for (r, c) in column.iter_mut().enumerate() {
            *c = textbook_legendre(m + r, m, x);
        }
        for r in 0..dim {
            let fr = f * column[r];
            for c in r..dim {
                acc[r][c] += fr * column[c];
            }
        }
    }
    (0..dim)
        .map(|r| (0..dim).map(|c| acc[r.min(c)][r.max(c)] * h / 3.0).collect())
        .collect()
}

// ---- criteria ----------------------------------------------------------

fn unitarity(fig1: &[RunResult], elapsed: Duration) -> Outcome {
    let worst = fig1
        .iter()
        .map(|r| r.series.diagnostics.max_norm_drift)
        .fold(0.0, f64::max);
    let pass = fig1.len() == 9 && worst <= 1e-10 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "fig1 runs={}, worst norm drift {worst:.3e} (≤ 1e-10), sweep {:.1}s (< 300s)",
            fig1.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let run = single_run(100.0, 0.05, fixed(32, 1e-4, 10));
    let plan = run.plan().unwrap();
    let psi0 = initial_eigenstate(0, 0, plan.basis()).unwrap();
    let split = propagate(&psi0, &plan).unwrap();
    let exact = oracle_propagate(&psi0, &plan).unwrap();
    let gap = max_alignment_gap(&split, &exact);
    let elapsed = started.elapsed();
    outcome(
        gap <= 1e-6 && elapsed < Duration::from_secs(120),
        format!(
            "max |Δ⟨cos²θ⟩| {gap:.3e} (≤ 1e-6) over {} records, {:.1}s (< 120s)",
            split.records.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn free_rotor() -> Outcome {
    let mut worst_eigen: f64 = 0.0;
    let mut notes = Vec::new();
    for (j, closed) in [(0usize, 1.0 / 3.0), (1, 3.0 / 5.0)] {
        let quad = simpson_elements(j, 0, 2, 200_000)[j][j];
        let basis = build_basis(16, 0).unwrap();
        let grid = build_quadrature(33, &basis).unwrap();
        let plan = PropagationPlan::new(0.0, 2.0, 1e-3, 10, FieldConfig::field_free(), grid).unwrap();
        let series = propagate(&SpectralState::eigenstate(&basis, j).unwrap(), &plan).unwrap();
        let dev = series
            .records
            .iter()
            .map(|r| (r.alignment - quad).abs())
            .fold(0.0, f64::max);
        worst_eigen = worst_eigen.max(dev).max((quad - closed).abs());
        notes.push(format!("J={j}: quadrature {quad:.15}"));
    }

    let mut worst_revival: f64 = 0.0;
    for m in [0, 2] {
        let basis = build_basis(20, m).unwrap();
        let grid = build_quadrature(41, &basis).unwrap();
        let coeffs: Vec<Complex64> = (0..basis.dim())
            .map(|i| Complex64::new((1.3 * i as f64 + 0.4).sin(), (0.7 * i as f64).cos() / (1.0 + i as f64)))
            .collect();
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let psi0 = SpectralState::new(basis, coeffs.iter().map(|c| c / norm).collect()).unwrap();
        let plan = PropagationPlan::new(0.0, PI, PI / 1000.0, 1000, FieldConfig::field_free(), grid).unwrap();
        let (series, last) = propagate_with_final(&psi0, &plan).unwrap();
        let state_gap = psi0
            .coefficients()
            .iter()
            .zip(last.coefficients())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let first = series.records.first().unwrap().alignment;
        let end = series.records.last().unwrap().alignment;
        worst_revival = worst_revival.max(state_gap).max((first - end).abs());
        assert!((alignment_cosine(&last) - end).abs() < 1e-14);
    }
    outcome(
        worst_eigen <= 1e-12 && worst_revival <= 1e-10,
        format!(
            "eigenstate dev {worst_eigen:.2e} (≤ 1e-12; {}), revival at t=π dev {worst_revival:.2e} (≤ 1e-10)",
            notes.join(", ")
        ),
    )
}

fn convergence_order() -> Outcome {
    let run = single_run(100.0, 0.5, fixed(32, 1e-3, 20));
    let psi0 = initial_eigenstate(0, 0, build_basis(32, 0).as_ref().unwrap()).unwrap();
    let exact = oracle_propagate(&psi0, &run.plan_with(32, 1e-4, 200).unwrap()).unwrap();
    let coarse = propagate(&psi0, &run.plan_with(32, 2e-3, 10).unwrap()).unwrap();
    let fine = propagate(&psi0, &run.plan_with(32, 1e-3, 20).unwrap()).unwrap();
    let e_coarse = max_alignment_gap(&coarse, &exact);
    let e_fine = max_alignment_gap(&fine, &exact);
    let ratio = e_coarse / e_fine;
    outcome(
        (3.5..=4.5).contains(&ratio),
        format!(
            "τ=0.5, Δω=100: err(dt=2e-3) {e_coarse:.3e}, err(dt=1e-3) {e_fine:.3e}, ratio {ratio:.4} (in [3.5, 4.5])"
        ),
    )
}

fn fig1_shape(fig1: &[RunResult]) -> Outcome {
    let pick = |dw: f64, tau: f64| {
        fig1.iter()
            .find(|r| r.config.params.delta_omega == dw && r.config.params.tau_fwhm == tau)
            .expect("fig1 run present")
    };
    let mut ok = true;
    let mut amps = Vec::new();
    let mut peaks = Vec::new();
    let mut global = Vec::new();
    let mut adiabatic: f64 = 0.0;
    for dw in [100.0, 400.0, 900.0] {
        let short = pick(dw, 0.05);
        let amp = short.summary.post_pulse_amplitude().unwrap_or(0.0);
        ok &= amp > 0.1;
        amps.push(format!("{amp:.3}"));
        peaks.push(short.summary.pulse_peak_alignment);
        global.push(format!("{:.4}", short.summary.peak_alignment));

        let long = pick(dw, 5.0);
        let tail = post_pulse_records(long);
        ok &= !tail.is_empty();
        adiabatic = tail
            .iter()
            .map(|r| (r.alignment - 1.0 / 3.0).abs())
            .fold(adiabatic, f64::max);
    }
    ok &= peaks[2] > peaks[1] && peaks[1] > peaks[0];
    ok &= adiabatic < 0.05;
    outcome(
        ok,
        format!(
            "τ=0.05 post-pulse amplitude [{}] (> 0.1); in-pulse peak Δω=100,400,900 [{:.4}, {:.4}, {:.4}] (increasing; whole-window max [{}]); τ=5 max |⟨cos²θ⟩−1/3| after pulse {adiabatic:.2e} (< 0.05)",
            amps.join(", "),
            peaks[0],
            peaks[1],
            peaks[2],
            global.join(", ")
        ),
    )
}

/// Records after the last sample where the field is at or above the cutoff.
fn post_pulse_records(r: &RunResult) -> &[ObservableRecord] {
    let records = &r.series.records;
    let peak = records.iter().map(|x| x.field.abs()).fold(0.0, f64::max);
    let start = records
        .iter()
        .rposition(|x| x.field.abs() >= r.config.settings.field_cutoff * peak)
        .map_or(0, |i| i + 1);
    &records[start..]
}

fn post_pulse_maxima(r: &RunResult) -> usize {
    let a: Vec<f64> = post_pulse_records(r).iter().map(|x| x.alignment).collect();
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    let (lo, hi) = a
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let floor = mean + 0.1 * (hi - lo);
    a.windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2] && w[1] > floor)
        .count()
}

fn bitwise_equal(a: &[RunResult], b: &[RunResult]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.summary == y.summary
                && x.series.records.len() == y.series.records.len()
                && x.series.records.iter().zip(&y.series.records).all(|(p, q)| {
                    p.t.to_bits() == q.t.to_bits()
                        && p.alignment.to_bits() == q.alignment.to_bits()
                        && p.orientation.to_bits() == q.orientation.to_bits()
                        && p.norm.to_bits() == q.norm.to_bits()
                })
        })
}

fn summary_key(r: &RunResult) -> [f64; 4] {
    let s = &r.summary;
    [
        s.pulse_peak_alignment,
        s.peak_alignment,
        s.post_pulse_mean().unwrap_or(f64::NAN),
        s.post_pulse_amplitude().unwrap_or(f64::NAN),
    ]
}

/// Every pair of runs sharing Δω but sitting in different panels must differ
/// in every summary metric by more than `tol`.
fn panels_distinct(results: &[RunResult], tol: f64) -> bool {
    results.iter().enumerate().all(|(i, a)| {
        results[i + 1..]
            .iter()
            .filter(|b| b.config.params.delta_omega == a.config.params.delta_omega)
            .all(|b| {
                summary_key(a)
                    .iter()
                    .zip(summary_key(b))
                    .all(|(x, y)| (x - y).abs() > tol)
            })
    })
}

fn two_color_structure(fig1: &[RunResult]) -> Outcome {
    let settings = fixed(64, 1e-4, 10);
    let mut fig2 = Figure::Fig2.sweep(settings.clone());
    fig2.tau_fwhms = vec![0.05];
    let two = run_sweep(&fig2, workers()).unwrap();
    let mut changed = true;
    let mut counts = Vec::new();
    for r2 in &two {
        let p = r2.config.params;
        let r1 = fig1
            .iter()
            .find(|r| r.config.params.delta_omega == p.delta_omega && r.config.params.tau_fwhm == p.tau_fwhm)
            .unwrap();
        let (n1, n2) = (post_pulse_maxima(r1), post_pulse_maxima(r2));
        let gap = max_alignment_gap(&r1.series, &r2.series);
        changed &= n2 != n1 && gap > 1e-2;
        counts.push(format!("Δω={}: maxima {n1}→{n2}, max gap {gap:.3}", p.delta_omega));
    }

    let fig3 = Figure::Fig3.sweep(settings.clone());
    let fig4 = Figure::Fig4.sweep(settings);
    let (f3a, f3b) = (
        run_sweep(&fig3, workers()).unwrap(),
        run_sweep(&fig3, workers()).unwrap(),
    );
    let (f4a, f4b) = (
        run_sweep(&fig4, workers()).unwrap(),
        run_sweep(&fig4, workers()).unwrap(),
    );
    let deterministic = bitwise_equal(&f3a, &f3b) && bitwise_equal(&f4a, &f4b);
    let complete = f3a.len() == 6 && f4a.len() == 9 && f3a.iter().chain(&f4a).all(|r| r.summary.post_pulse.is_some());
    let distinct = panels_distinct(&f3a, 1e-6) && panels_distinct(&f4a, 1e-6);
    let ratio_sqrt2 = f3a.iter().any(|r| r.config.params.amplitude_ratio == Some(SQRT_2));
    outcome(
        changed && deterministic && complete && distinct && ratio_sqrt2,
        format!(
            "two-color vs one-color at τ=0.05 [{}]; fig3/fig4 complete={complete}, deterministic={deterministic}, panels distinct={distinct}",
            counts.join("; ")
        ),
    )
}

fn invariance() -> Outcome {
    // Δω_⊥ only shifts the global phase.
    let base = fixed(32, 1e-4, 10);
    let plain = single_run(400.0, 0.05, base.clone());
    let shifted = single_run(
        400.0,
        0.05,
        RunSettings {
            delta_omega_perp: 250.0,
            ..base.clone()
        },
    );
    let psi0 = initial_eigenstate(0, 0, &build_basis(32, 0).unwrap()).unwrap();
    let a = propagate(&psi0, &plain.plan().unwrap()).unwrap();
    let b = propagate(&psi0, &shifted.plan().unwrap()).unwrap();
    let perp_gap = a
        .records
        .iter()
        .zip(&b.records)
        .map(|(x, y)| {
            (x.alignment - y.alignment)
                .abs()
                .max((x.orientation - y.orientation).abs())
        })
        .fold(0.0, f64::max);

    // Full carrier, asymmetric two-color field, no dipole coupling.
    let basis = build_basis(32, 0).unwrap();
    let grid = build_quadrature(65, &basis).unwrap();
    let pulses = vec![
        PulseSpec::new(1.0, 0.5, 2.0, 1).unwrap(),
        PulseSpec::new(SQRT_2, 0.5, 2.5, 2).unwrap(),
    ];
    let couplings = CouplingSet {
        delta_omega: 200.0,
        delta_omega_mu: 0.0,
        delta_omega_perp: 30.0,
    };
    let field = FieldConfig::new(pulses, couplings, Some(200.0), InteractionMode::FullCarrier).unwrap();
    let plan = PropagationPlan::new(0.0, 6.0, 1e-4, 20, field, grid)
        .unwrap()
        .with_populations(true);
    let series = propagate(&SpectralState::eigenstate(&basis, 0).unwrap(), &plan).unwrap();
    let max_orientation = series.records.iter().map(|r| r.orientation.abs()).fold(0.0, f64::max);
    let max_odd = series
        .records
        .iter()
        .flat_map(|r| r.populations.as_ref().unwrap().iter().skip(1).step_by(2).copied())
        .fold(0.0, f64::max);
    let kicked = series.records.last().unwrap().alignment > 0.4;

    let mut fig3 = Figure::Fig3.sweep(fixed(64, 1e-4, 10));
    fig3.delta_omegas = vec![100.0, 900.0];
    let one = run_sweep(&fig3, 1).unwrap();
    let eight = run_sweep(&fig3, 8).unwrap();
    let same = bitwise_equal(&one, &eight);

    outcome(
        perp_gap <= 1e-12 && max_orientation < 1e-10 && max_odd < 1e-12 && kicked && same,
        format!(
            "Δω_⊥ gap {perp_gap:.2e} (≤ 1e-12); parity |⟨cosθ⟩| {max_orientation:.2e} (< 1e-10), odd-J population {max_odd:.2e} (< 1e-12); 1 vs 8 workers bitwise identical={same}"
        ),
    )
}

fn matrix_elements() -> Outcome {
    let mut worst: f64 = 0.0;
    let j_max = 16;
    for m in -4i32..=4 {
        let basis = build_basis(j_max, m).unwrap();
        let mu = m.unsigned_abs() as usize;
        for (power, dense) in [
            (1, cos_theta_matrix(&basis).to_dense()),
            (2, cos2_theta_matrix(&basis).to_dense()),
        ] {
            let reference = simpson_elements(j_max, mu, power, 200_000);
            for (r, row) in reference.iter().enumerate() {
                for (c, want) in row.iter().enumerate() {
                    worst = worst.max((dense[r][c] - want).abs());
                }
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("j_max=16, m∈[-4,4]: max |element − Simpson quadrature| {worst:.2e} (≤ 1e-12)"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let fig1 = run_sweep(&Figure::Fig1.sweep(fixed(64, 1e-4, 10)), workers()).expect("fig1 sweep");
    let fig1_time = started.elapsed();

    type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("1 unitarity", Box::new(|| unitarity(&fig1, fig1_time))),
        ("2 oracle equivalence", Box::new(oracle_equivalence)),
        ("3 free-rotor analytics", Box::new(free_rotor)),
        ("4 convergence order", Box::new(convergence_order)),
        ("5 fig1 qualitative", Box::new(|| fig1_shape(&fig1))),
        ("6 fig2-4 structure", Box::new(|| two_color_structure(&fig1))),
        ("7 invariances", Box::new(invariance)),
        ("8 matrix elements", Box::new(matrix_elements)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let o = check();
        println!(
            "{} [{name}] {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
