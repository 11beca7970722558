//! Strict TOML configuration.
//!
//! Every key is optional except the pulse strength and duration, which come
//! either from `delta_omega` / `tau_fwhm` or from a `[physical]` block (not
//! both). Sweep axes accept a number or a list of numbers. Unknown keys are
//! rejected. See `docs/config.md` for the full schema.

use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::InteractionMode;
use crate::sweep::{ColorMode, DtControl, RunConfig, RunSettings, SweepSpec};
use crate::units::{to_dimensionless, PhysicalMolecule, PhysicalPulse};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown configuration key `{key}`")]
    UnknownKey { key: String },

    #[error("missing required key `{key}`")]
    Missing { key: String },

    #[error("`{key}`: {constraint}")]
    Constraint { key: String, constraint: String },

    #[error("conflicting keys: {0}")]
    Conflict(String),

    #[error("malformed configuration: {0}")]
    Parse(String),
}

fn constraint(key: &str, what: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        key: key.into(),
        constraint: what.into(),
    }
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "delta_omega",
    "tau_fwhm",
    "amplitude_ratio",
    "delay_ratio",
    "mode",
    "interaction",
    "delta_omega_mu",
    "delta_omega_perp",
    "omega",
    "j_max",
    "m",
    "j_initial",
    "n_nodes",
    "dt",
    "dt_control",
    "richardson_tol",
    "max_halvings",
    "basis_check",
    "basis_tol",
    "t_start",
    "t_end",
    "record_every",
    "populations",
    "field_cutoff",
    "workers",
    "physical",
];

const PHYSICAL_KEYS: &[&str] = &[
    "rotational_constant_cm",
    "dipole_debye",
    "alpha_parallel_a3",
    "alpha_perp_a3",
    "peak_intensity_w_cm2",
    "tau_fwhm_fs",
];

/// A number or a list of numbers.
#[derive(Debug, Clone, PartialEq)]
struct Axis(Vec<f64>);

impl<'de> Deserialize<'de> for Axis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AxisVisitor;
        impl<'de> Visitor<'de> for AxisVisitor {
            type Value = Axis;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a list of numbers")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Axis, E> {
                Ok(Axis(vec![v]))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Axis, E> {
                Ok(Axis(vec![v as f64]))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Axis, E> {
                Ok(Axis(vec![v as f64]))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Axis, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    out.push(v);
                }
                Ok(Axis(out))
            }
        }
        d.deserialize_any(AxisVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    delta_omega: Option<Axis>,
    tau_fwhm: Option<Axis>,
    amplitude_ratio: Option<Axis>,
    delay_ratio: Option<Axis>,
    mode: Option<ColorMode>,
    interaction: Option<InteractionMode>,
    delta_omega_mu: Option<f64>,
    delta_omega_perp: Option<f64>,
    omega: Option<f64>,
    j_max: Option<usize>,
    m: Option<i32>,
    j_initial: Option<usize>,
    n_nodes: Option<usize>,
    dt: Option<f64>,
    dt_control: Option<DtControl>,
    richardson_tol: Option<f64>,
    max_halvings: Option<u32>,
    basis_check: Option<bool>,
    basis_tol: Option<f64>,
    t_start: Option<f64>,
    t_end: Option<f64>,
    record_every: Option<usize>,
    populations: Option<bool>,
    field_cutoff: Option<f64>,
    workers: Option<usize>,
    physical: Option<RawPhysical>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysical {
    rotational_constant_cm: Option<f64>,
    dipole_debye: Option<f64>,
    alpha_parallel_a3: Option<f64>,
    alpha_perp_a3: Option<f64>,
    peak_intensity_w_cm2: Option<f64>,
    tau_fwhm_fs: Option<f64>,
}

/// Laboratory-unit input, echoed into the manifest when used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalInput {
    pub molecule: PhysicalMolecule,
    pub pulse: PhysicalPulse,
}

/// Fully validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub sweep: SweepSpec,
    pub workers: usize,
    pub physical: Option<PhysicalInput>,
}

impl ResolvedConfig {
    pub fn runs(&self) -> crate::Result<Vec<RunConfig>> {
        crate::sweep::expand_sweep(&self.sweep)
    }

    /// The configuration in input form with every default written out.
    /// Parsing the result gives back the same sweep. A `[physical]` block is
    /// replaced by the dimensionless values it resolved to.
    pub fn to_table(&self) -> toml::Table {
        let sw = &self.sweep;
        let s = &sw.settings;
        let axis = |v: &[f64]| toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect());
        let tag = |v: &dyn tags::Tag| toml::Value::String(v.tag().into());
        let mut t = toml::Table::new();
        t.insert("delta_omega".into(), axis(&sw.delta_omegas));
        t.insert("tau_fwhm".into(), axis(&sw.tau_fwhms));
        t.insert("amplitude_ratio".into(), axis(&sw.amplitude_ratios));
        t.insert("delay_ratio".into(), axis(&sw.delay_ratios));
        t.insert("mode".into(), tag(&sw.color_mode));
        t.insert("interaction".into(), tag(&s.interaction));
        t.insert("delta_omega_mu".into(), s.delta_omega_mu.into());
        t.insert("delta_omega_perp".into(), s.delta_omega_perp.into());
        if let Some(w) = s.omega {
            t.insert("omega".into(), w.into());
        }
        t.insert("j_max".into(), (s.j_max as i64).into());
        t.insert("m".into(), i64::from(s.m).into());
        t.insert("j_initial".into(), (s.j_initial as i64).into());
        if let Some(n) = s.n_nodes {
            t.insert("n_nodes".into(), (n as i64).into());
        }
        t.insert("dt".into(), s.dt.into());
        t.insert("dt_control".into(), tag(&s.dt_control));
        t.insert("richardson_tol".into(), s.richardson_tol.into());
        t.insert("max_halvings".into(), i64::from(s.max_halvings).into());
        t.insert("basis_check".into(), s.basis_check.into());
        t.insert("basis_tol".into(), s.basis_tol.into());
        t.insert("t_start".into(), s.t_start.into());
        if let Some(t_end) = s.t_end {
            t.insert("t_end".into(), t_end.into());
        }
        t.insert("record_every".into(), (s.record_every as i64).into());
        t.insert("populations".into(), s.record_populations.into());
        t.insert("field_cutoff".into(), s.field_cutoff.into());
        t.insert("workers".into(), (self.workers as i64).into());
        t
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_table()).expect("config table serializes")
    }
}

mod tags {
    use crate::field::InteractionMode;
    use crate::sweep::{ColorMode, DtControl};

    /// Config spelling of an enum value.
    pub trait Tag {
        fn tag(&self) -> &'static str;
    }

    impl Tag for ColorMode {
        fn tag(&self) -> &'static str {
            match self {
                ColorMode::OneColor => "one_color",
                ColorMode::TwoColor => "two_color",
            }
        }
    }

    impl Tag for InteractionMode {
        fn tag(&self) -> &'static str {
            match self {
                InteractionMode::FullCarrier => "full_carrier",
                InteractionMode::CycleAveraged => "cycle_averaged",
            }
        }
    }

    impl Tag for DtControl {
        fn tag(&self) -> &'static str {
            match self {
                DtControl::Fixed => "fixed",
                DtControl::Richardson => "richardson",
            }
        }
    }
}

pub fn parse_config(text: &str) -> Result<ResolvedConfig, ConfigError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
    parse_config_table(table)
}

pub fn parse_config_table(table: toml::Table) -> Result<ResolvedConfig, ConfigError> {
    check_keys(&table)?;
    let raw: RawConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string().trim().to_string()))?;
    resolve(raw)
}

fn check_keys(table: &toml::Table) -> Result<(), ConfigError> {
    for (key, value) in table {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { key: key.clone() });
        }
        if key == "physical" {
            if let Some(inner) = value.as_table() {
                for k in inner.keys() {
                    if !PHYSICAL_KEYS.contains(&k.as_str()) {
                        return Err(ConfigError::UnknownKey {
                            key: format!("physical.{k}"),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn resolve(raw: RawConfig) -> Result<ResolvedConfig, ConfigError> {
    let defaults = RunSettings::default();
    let mut settings = RunSettings {
        interaction: raw.interaction.unwrap_or(defaults.interaction),
        delta_omega_mu: raw.delta_omega_mu.unwrap_or(defaults.delta_omega_mu),
        delta_omega_perp: raw.delta_omega_perp.unwrap_or(defaults.delta_omega_perp),
        omega: raw.omega,
        j_max: raw.j_max.unwrap_or(defaults.j_max),
        m: raw.m.unwrap_or(defaults.m),
        j_initial: raw.j_initial.unwrap_or(defaults.j_initial),
        n_nodes: raw.n_nodes,
        dt: raw.dt.unwrap_or(defaults.dt),
        dt_control: raw.dt_control.unwrap_or(defaults.dt_control),
        richardson_tol: raw.richardson_tol.unwrap_or(defaults.richardson_tol),
        max_halvings: raw.max_halvings.unwrap_or(defaults.max_halvings),
        basis_check: raw.basis_check.unwrap_or(defaults.basis_check),
        basis_tol: raw.basis_tol.unwrap_or(defaults.basis_tol),
        t_start: raw.t_start.unwrap_or(defaults.t_start),
        t_end: raw.t_end,
        record_every: raw.record_every.unwrap_or(defaults.record_every),
        record_populations: raw.populations.unwrap_or(defaults.record_populations),
        field_cutoff: raw.field_cutoff.unwrap_or(defaults.field_cutoff),
    };

    let (delta_omegas, tau_fwhms, physical) = match raw.physical {
        Some(p) => {
            for (key, present) in [
                ("delta_omega", raw.delta_omega.is_some()),
                ("tau_fwhm", raw.tau_fwhm.is_some()),
                ("delta_omega_mu", raw.delta_omega_mu.is_some()),
                ("delta_omega_perp", raw.delta_omega_perp.is_some()),
            ] {
                if present {
                    return Err(ConfigError::Conflict(format!(
                        "`{key}` cannot be combined with a [physical] block"
                    )));
                }
            }
            let need = |v: Option<f64>, key: &str| {
                v.ok_or_else(|| ConfigError::Missing {
                    key: format!("physical.{key}"),
                })
            };
            let input = PhysicalInput {
                molecule: PhysicalMolecule {
                    rotational_constant_cm: need(p.rotational_constant_cm, "rotational_constant_cm")?,
                    dipole_debye: p.dipole_debye.unwrap_or(0.0),
                    alpha_parallel_a3: need(p.alpha_parallel_a3, "alpha_parallel_a3")?,
                    alpha_perp_a3: need(p.alpha_perp_a3, "alpha_perp_a3")?,
                },
                pulse: PhysicalPulse {
                    peak_intensity_w_cm2: need(p.peak_intensity_w_cm2, "peak_intensity_w_cm2")?,
                    tau_fwhm_fs: need(p.tau_fwhm_fs, "tau_fwhm_fs")?,
                },
            };
            let reduced =
                to_dimensionless(&input.molecule, &input.pulse).map_err(|e| constraint("physical", e.to_string()))?;
            settings.delta_omega_mu = reduced.couplings.delta_omega_mu;
            settings.delta_omega_perp = reduced.couplings.delta_omega_perp;
            (vec![reduced.couplings.delta_omega], vec![reduced.tau_fwhm], Some(input))
        }
        None => {
            let dw = raw.delta_omega.ok_or_else(|| ConfigError::Missing {
                key: "delta_omega".into(),
            })?;
            let tau = raw
                .tau_fwhm
                .ok_or_else(|| ConfigError::Missing { key: "tau_fwhm".into() })?;
            (dw.0, tau.0, None)
        }
    };

    let sweep = SweepSpec {
        delta_omegas,
        tau_fwhms,
        amplitude_ratios: raw.amplitude_ratio.map_or(vec![1.0], |a| a.0),
        delay_ratios: raw.delay_ratio.map_or(vec![1.0], |a| a.0),
        color_mode: raw.mode.unwrap_or(ColorMode::OneColor),
        settings,
    };
    let workers = raw.workers.unwrap_or(1);
    validate(&sweep, workers)?;
    Ok(ResolvedConfig {
        sweep,
        workers,
        physical,
    })
}

fn validate(sweep: &SweepSpec, workers: usize) -> Result<(), ConfigError> {
    let axis = |key: &str, values: &[f64], ok: fn(f64) -> bool, what: &str| {
        if values.is_empty() {
            return Err(constraint(key, "must not be empty"));
        }
        match values.iter().find(|v| !(v.is_finite() && ok(**v))) {
            Some(v) => Err(constraint(key, format!("{what}, got {v}"))),
            None => Ok(()),
        }
    };
    axis("delta_omega", &sweep.delta_omegas, |v| v >= 0.0, "must be non-negative")?;
    axis("tau_fwhm", &sweep.tau_fwhms, |v| v > 0.0, "must be positive")?;
    axis(
        "amplitude_ratio",
        &sweep.amplitude_ratios,
        |v| v >= 0.0,
        "must be non-negative",
    )?;
    axis("delay_ratio", &sweep.delay_ratios, |v| v > 0.0, "must be positive")?;

    let s = &sweep.settings;
    let non_negative = |key: &str, v: f64| {
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(constraint(key, format!("must be non-negative, got {v}")))
        }
    };
    let positive = |key: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(constraint(key, format!("must be positive, got {v}")))
        }
    };
    non_negative("delta_omega_mu", s.delta_omega_mu)?;
    non_negative("delta_omega_perp", s.delta_omega_perp)?;
    match s.interaction {
        InteractionMode::CycleAveraged if s.delta_omega_mu > 0.0 => {
            return Err(constraint(
                "delta_omega_mu",
                "the dipole term averages to zero in cycle_averaged mode; use interaction = \"full_carrier\"",
            ))
        }
        InteractionMode::FullCarrier => match s.omega {
            None => return Err(ConfigError::Missing { key: "omega".into() }),
            Some(w) => positive("omega", w)?,
        },
        _ => {}
    }
    let m_abs = s.m.unsigned_abs() as usize;
    if s.j_max < m_abs {
        return Err(constraint("j_max", format!("must be at least |m| = {m_abs}")));
    }
    if s.j_initial < m_abs || s.j_initial > s.j_max {
        return Err(constraint("j_initial", format!("must lie in {m_abs}..={}", s.j_max)));
    }
    if let Some(n) = s.n_nodes {
        if n < s.j_max + 1 {
            return Err(constraint(
                "n_nodes",
                format!("must be at least j_max + 1 = {}", s.j_max + 1),
            ));
        }
    }
    positive("dt", s.dt)?;
    positive("richardson_tol", s.richardson_tol)?;
    positive("basis_tol", s.basis_tol)?;
    if !s.t_start.is_finite() {
        return Err(constraint("t_start", "must be finite"));
    }
    if let Some(t_end) = s.t_end {
        if !(t_end.is_finite() && t_end > s.t_start) {
            return Err(constraint("t_end", "must be finite and greater than t_start"));
        }
        if s.dt > t_end - s.t_start {
            return Err(constraint("dt", "must not exceed t_end - t_start"));
        }
    }
    if s.record_every == 0 {
        return Err(constraint("record_every", "must be at least 1"));
    }
    if !(s.field_cutoff > 0.0 && s.field_cutoff < 1.0) {
        return Err(constraint("field_cutoff", "must lie in (0, 1)"));
    }
    if workers == 0 {
        return Err(constraint("workers", "must be at least 1"));
    }
    Ok(())
}
