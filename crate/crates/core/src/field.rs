//! Two-color laser field with Gaussian envelopes and the interaction
//! coefficients it induces.
//!
//! All field quantities are in units of the peak first-harmonic amplitude,
//! so the first pulse has `relative_amplitude = 1`. The interaction is
//!
//! ```text
//! V(θ, t) = c1(t) cos θ + c2(t) cos²θ + c0(t)
//! ```
//!
//! with `c1 = −Δω_μ f`, `c2 = −Δω f²`, `c0 = −Δω_⊥ f²` for the full carrier
//! `f(t)`, or the carrier-averaged counterparts.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One harmonic of the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub relative_amplitude: f64,
    pub tau_fwhm: f64,
    /// Time of the envelope peak.
    pub center: f64,
    /// 1 for the fundamental ω, 2 for the second harmonic.
    pub carrier_multiple: u8,
    /// `t_i` in the carrier phase `cos(kω(t − t_i))`.
    pub carrier_delay: f64,
}

impl PulseSpec {
    /// Pulse whose carrier delay coincides with its envelope center.
    pub fn new(relative_amplitude: f64, tau_fwhm: f64, center: f64, carrier_multiple: u8) -> Result<Self> {
        let pulse = Self {
            relative_amplitude,
            tau_fwhm,
            center,
            carrier_multiple,
            carrier_delay: center,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_fwhm > 0.0 && self.tau_fwhm.is_finite()) {
            return Err(Error::InvalidField(format!(
                "tau_fwhm must be positive, got {}",
                self.tau_fwhm
            )));
        }
        if !(self.relative_amplitude >= 0.0 && self.relative_amplitude.is_finite()) {
            return Err(Error::InvalidField(format!(
                "relative_amplitude must be non-negative, got {}",
                self.relative_amplitude
            )));
        }
        if !matches!(self.carrier_multiple, 1 | 2) {
            return Err(Error::InvalidField(format!(
                "carrier_multiple must be 1 or 2, got {}",
                self.carrier_multiple
            )));
        }
        if !(self.center.is_finite() && self.carrier_delay.is_finite()) {
            return Err(Error::InvalidField("pulse times must be finite".into()));
        }
        Ok(())
    }
}

/// Dimensionless interaction strengths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    /// `Δω = max(F₁)² Δα / (2B)`.
    pub delta_omega: f64,
    /// `μ max(F₁) / B`.
    pub delta_omega_mu: f64,
    /// `α_⊥ max(F₁)² / (2B)`.
    pub delta_omega_perp: f64,
}

impl CouplingSet {
    pub fn polarizability(delta_omega: f64) -> Self {
        Self {
            delta_omega,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("delta_omega", self.delta_omega),
            ("delta_omega_mu", self.delta_omega_mu),
            ("delta_omega_perp", self.delta_omega_perp),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidField(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionMode {
    /// Instantaneous field including the carrier oscillation.
    FullCarrier,
    /// Interaction averaged over a carrier cycle; only the envelopes remain.
    CycleAveraged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pulses: Vec<PulseSpec>,
    couplings: CouplingSet,
    carrier_omega: Option<f64>,
    mode: InteractionMode,
}

impl FieldConfig {
    /// Validates and assembles a field.
    ///
    /// Full-carrier mode needs `carrier_omega > 0`. Cycle-averaged mode
    /// rejects a nonzero dipole coupling, which would average to nothing.
    pub fn new(
        pulses: Vec<PulseSpec>,
        couplings: CouplingSet,
        carrier_omega: Option<f64>,
        mode: InteractionMode,
    ) -> Result<Self> {
        for p in &pulses {
            p.validate()?;
        }
        couplings.validate()?;
        match mode {
            InteractionMode::CycleAveraged => {
                if couplings.delta_omega_mu > 0.0 {
                    return Err(Error::InvalidField(
                        "delta_omega_mu > 0 has no effect in cycle-averaged mode; use full_carrier".into(),
                    ));
                }
            }
            InteractionMode::FullCarrier => {
                let omega = carrier_omega.ok_or_else(|| {
                    Error::InvalidField("full_carrier mode requires a carrier frequency omega".into())
                })?;
                if !(omega > 0.0 && omega.is_finite()) {
                    return Err(Error::InvalidField(format!("omega must be positive, got {omega}")));
                }
                for p in &pulses {
                    if omega * p.tau_fwhm < 10.0 {
                        log::warn!(
                            "omega * tau_fwhm = {:.3} < 10: fewer than ~2 carrier cycles under the envelope",
                            omega * p.tau_fwhm
                        );
                    }
                }
            }
        }
        Ok(Self {
            pulses,
            couplings,
            carrier_omega,
            mode,
        })
    }

    /// No pulses, no coupling.
    pub fn field_free() -> Self {
        Self {
            pulses: Vec::new(),
            couplings: CouplingSet::default(),
            carrier_omega: None,
            mode: InteractionMode::CycleAveraged,
        }
    }

    pub fn pulses(&self) -> &[PulseSpec] {
        &self.pulses
    }

    pub fn couplings(&self) -> &CouplingSet {
        &self.couplings
    }

    pub fn carrier_omega(&self) -> Option<f64> {
        self.carrier_omega
    }

    pub fn mode(&self) -> InteractionMode {
        self.mode
    }

    pub fn with_couplings(&self, couplings: CouplingSet) -> Result<Self> {
        Self::new(self.pulses.clone(), couplings, self.carrier_omega, self.mode)
    }

    /// Latest time at which any envelope still matters, `center + k·τ` maximized over pulses.
    pub fn switch_off_time(&self, widths: f64) -> f64 {
        self.pulses
            .iter()
            .map(|p| p.center + widths * p.tau_fwhm)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Gaussian envelope `A exp(−2 ln2 (t − center)² / τ²)`.
///
/// `τ` is the FWHM of the intensity `g²`; the field itself is down to
/// `A/√2` at `center ± τ/2`.
pub fn envelope(t: f64, pulse: &PulseSpec) -> f64 {
    let s = (t - pulse.center) / pulse.tau_fwhm;
    pulse.relative_amplitude * (-2.0 * LN_2 * s * s).exp()
}

/// Instantaneous field `Σ g_i(t) cos(k_i ω (t − t_i))`. Undefined in cycle-averaged mode.
pub fn field_value(t: f64, config: &FieldConfig) -> Result<f64> {
    match (config.mode, config.carrier_omega) {
        (InteractionMode::FullCarrier, Some(omega)) => Ok(carrier_field(t, config, omega)),
        _ => Err(Error::CycleAveragedField),
    }
}

fn carrier_field(t: f64, config: &FieldConfig, omega: f64) -> f64 {
    config
        .pulses
        .iter()
        .map(|p| envelope(t, p) * (f64::from(p.carrier_multiple) * omega * (t - p.carrier_delay)).cos())
        .sum()
}

/// Carrier-averaged squared field `Σ g_i² / 2`; the ω–2ω cross term averages out.
pub fn mean_square_field(t: f64, config: &FieldConfig) -> f64 {
    0.5 * config.pulses.iter().map(|p| envelope(t, p).powi(2)).sum::<f64>()
}

/// The field column recorded in time series: `f(t)` with a carrier,
/// the averaged `f²` otherwise.
pub fn field_proxy(t: f64, config: &FieldConfig) -> f64 {
    match (config.mode, config.carrier_omega) {
        (InteractionMode::FullCarrier, Some(omega)) => carrier_field(t, config, omega),
        _ => mean_square_field(t, config),
    }
}

/// Coefficients of `V(θ, t) = c1 cos θ + c2 cos²θ + c0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InteractionCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c0: f64,
}

impl InteractionCoefficients {
    pub fn is_zero(&self) -> bool {
        self.c1 == 0.0 && self.c2 == 0.0 && self.c0 == 0.0
    }

    /// `V` at `x = cos θ`.
    pub fn potential(&self, x: f64) -> f64 {
        (self.c2 * x + self.c1) * x + self.c0
    }

    /// Upper bound of `|V|` on `[-1, 1]`.
    pub fn bound(&self) -> f64 {
        self.c1.abs() + self.c2.abs() + self.c0.abs()
    }
}

pub fn effective_couplings(t: f64, config: &FieldConfig) -> InteractionCoefficients {
    let k = &config.couplings;
    match (config.mode, config.carrier_omega) {
        (InteractionMode::FullCarrier, Some(omega)) => {
            let f = carrier_field(t, config, omega);
            InteractionCoefficients {
                c1: -k.delta_omega_mu * f,
                c2: -k.delta_omega * f * f,
                c0: -k.delta_omega_perp * f * f,
            }
        }
        _ => {
            let f2 = mean_square_field(t, config);
            InteractionCoefficients {
                c1: 0.0,
                c2: -k.delta_omega * f2,
                c0: -k.delta_omega_perp * f2,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, SQRT_2};

    fn single(mode: InteractionMode, omega: Option<f64>, couplings: CouplingSet) -> FieldConfig {
        FieldConfig::new(vec![PulseSpec::new(1.0, 0.5, 2.0, 1).unwrap()], couplings, omega, mode).unwrap()
    }

    #[test]
    fn envelope_shape() {
        let p = PulseSpec::new(1.0, 0.4, 1.6, 1).unwrap();
        assert_eq!(envelope(1.6, &p), 1.0);
        // τ is the FWHM of the intensity g², so the field envelope is 1/√2 there
        assert_abs_diff_eq!(envelope(1.8, &p).powi(2), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(envelope(1.4, &p), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let p = PulseSpec::new(SQRT_2, 0.4, 1.6, 2).unwrap();
        assert_abs_diff_eq!(envelope(2.0, &p), 0.3535533905932738, epsilon = 1e-15);
    }

    #[test]
    fn field_values() {
        let cfg = single(InteractionMode::FullCarrier, Some(40.0), CouplingSet::default());
        assert_eq!(field_value(2.0, &cfg).unwrap(), 1.0);
        assert!(field_value(2.0 + PI / 80.0, &cfg).unwrap().abs() < 1e-13);

        let pulses = vec![
            PulseSpec::new(1.0, 0.5, 2.0, 1).unwrap(),
            PulseSpec::new(1.0, 0.5, 2.0, 2).unwrap(),
        ];
        let cfg = FieldConfig::new(pulses, CouplingSet::default(), Some(40.0), InteractionMode::FullCarrier).unwrap();
        assert_eq!(field_value(2.0, &cfg).unwrap(), 2.0);
    }

    #[test]
    fn field_value_needs_carrier() {
        let cfg = single(InteractionMode::CycleAveraged, None, CouplingSet::default());
        assert!(matches!(field_value(2.0, &cfg), Err(Error::CycleAveragedField)));
    }

    #[test]
    fn averaged_couplings() {
        let cfg = single(InteractionMode::CycleAveraged, None, CouplingSet::polarizability(100.0));
        let c = effective_couplings(2.0, &cfg);
        assert_eq!(c.c2, -50.0);
        assert_eq!(c.c1, 0.0);
        assert_eq!(c.c0, 0.0);
        let free = single(InteractionMode::CycleAveraged, None, CouplingSet::default());
        assert!(effective_couplings(2.0, &free).is_zero());
    }

    #[test]
    fn no_dipole_coupling_means_no_c1() {
        let cfg = single(
            InteractionMode::FullCarrier,
            Some(30.0),
            CouplingSet::polarizability(100.0),
        );
        for t in [0.0, 1.9, 2.0, 2.13] {
            assert_eq!(effective_couplings(t, &cfg).c1, 0.0);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(PulseSpec::new(1.0, -1.0, 0.0, 1).is_err());
        assert!(PulseSpec::new(-0.1, 1.0, 0.0, 1).is_err());
        assert!(PulseSpec::new(1.0, 1.0, 0.0, 3).is_err());
        let mu = CouplingSet {
            delta_omega_mu: 1.0,
            ..Default::default()
        };
        let p = vec![PulseSpec::new(1.0, 0.5, 2.0, 1).unwrap()];
        assert!(FieldConfig::new(p.clone(), mu, None, InteractionMode::CycleAveraged).is_err());
        assert!(FieldConfig::new(p.clone(), mu, None, InteractionMode::FullCarrier).is_err());
        assert!(FieldConfig::new(p, mu, Some(50.0), InteractionMode::FullCarrier).is_ok());
        assert!(CouplingSet {
            delta_omega: f64::NAN,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    /// Per-carrier-period average of the full-carrier `c2`, windows centred on
    /// the carrier maxima, relative to the cycle-averaged `c2`, over the part
    /// of the pulse above 1% of peak intensity.
    fn worst_average_mismatch(pulses: Vec<PulseSpec>, omega: f64) -> f64 {
        let k = CouplingSet::polarizability(100.0);
        let full = FieldConfig::new(pulses.clone(), k, Some(omega), InteractionMode::FullCarrier).unwrap();
        let avg = FieldConfig::new(pulses.clone(), k, None, InteractionMode::CycleAveraged).unwrap();
        let center = pulses[0].center;
        let tau = pulses[0].tau_fwhm;
        let period = 2.0 * PI / omega;
        let samples = 2000;
        let h = period / samples as f64;
        let peak = -effective_couplings(center, &avg).c2;
        let n_max = (4.0 * tau / period) as i64;
        let mut worst: f64 = 0.0;
        for n in -n_max..n_max {
            let start = center + (n as f64 - 0.5) * period;
            let mean = |cfg: &FieldConfig| {
                (0..samples)
                    .map(|i| effective_couplings(start + (i as f64 + 0.5) * h, cfg).c2)
                    .sum::<f64>()
                    / samples as f64
            };
            let (f, a) = (mean(&full), mean(&avg));
            if -a > 0.01 * peak {
                worst = worst.max((f / a - 1.0).abs());
            }
        }
        worst
    }

    #[test]
    fn cycle_average_matches_carrier_average() {
        // ω τ = 50, one color
        let one = vec![PulseSpec::new(1.0, 0.5, 2.0, 1).unwrap()];
        assert!(worst_average_mismatch(one, 100.0) < 0.01);
        // ω τ = 100, two colors in phase
        let two = vec![
            PulseSpec::new(1.0, 0.5, 2.0, 1).unwrap(),
            PulseSpec::new(SQRT_2, 0.5, 2.0, 2).unwrap(),
        ];
        assert!(worst_average_mismatch(two, 200.0) < 0.01);
    }

    proptest! {
        #[test]
        fn field_is_bounded(t in -5.0f64..15.0, a2 in 0.0f64..2.0, d in 0.0f64..3.0) {
            let pulses = vec![
                PulseSpec::new(1.0, 0.7, 2.0, 1).unwrap(),
                PulseSpec::new(a2, 0.7, 2.0 + d, 2).unwrap(),
            ];
            let cfg = FieldConfig::new(pulses, CouplingSet::default(), Some(25.0), InteractionMode::FullCarrier).unwrap();
            prop_assert!(field_value(t, &cfg).unwrap().abs() <= 1.0 + a2 + 1e-15);
        }

        #[test]
        fn envelope_even_and_decreasing(s in 0.0f64..4.0, ds in 1e-3f64..1.0) {
            let p = PulseSpec::new(1.3, 0.9, 1.0, 1).unwrap();
            prop_assert!((envelope(1.0 + s, &p) - envelope(1.0 - s, &p)).abs() < 1e-15);
            prop_assert!(envelope(1.0 + s + ds, &p) < envelope(1.0 + s, &p) || envelope(1.0 + s, &p) == 0.0);
        }
    }
}
