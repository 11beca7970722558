//! Conversion from laboratory quantities to the reduced units of the solver.
//!
//! Energies are measured in the rotational constant `B`, times in `ħ/B`.
//! With peak field amplitude `F₀ = √(2I / (c ε₀))`:
//!
//! ```text
//! Δω   = F₀² Δα / (2B)      Δα = 4πε₀ (α'_∥ − α'_⊥)
//! Δω_μ = μ F₀ / B
//! Δω_⊥ = F₀² α_⊥ / (2B)
//! τ    = τ_SI B / ħ
//! ```
//!
//! Constants (SI, CODATA 2018), to six significant figures:
//!
//! | quantity | value |
//! |---|---|
//! | h | 6.62607e-34 J s |
//! | ħ | 1.05457e-34 J s |
//! | c | 2.99792e8 m/s |
//! | ε₀ | 8.85419e-12 F/m |
//! | 1 debye | 3.33564e-30 C m |
//! | 1 cm⁻¹ (as energy) | 1.98645e-23 J |
//! | 1 Å³ (polarizability volume) | 1.11265e-40 C m²/V |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::CouplingSet;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const DEBYE: f64 = 3.335_640_952e-30;

/// Energy of one wavenumber, `h c · 100 m⁻¹`.
pub const WAVENUMBER_ENERGY: f64 = PLANCK * SPEED_OF_LIGHT * 100.0;
/// SI polarizability of a polarizability volume of 1 Å³.
pub const ANGSTROM3_POLARIZABILITY: f64 = 4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * 1e-30;

/// Linear molecule in laboratory units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalMolecule {
    /// `B` in cm⁻¹.
    pub rotational_constant_cm: f64,
    /// `μ` in debye.
    pub dipole_debye: f64,
    /// `α_∥` as a polarizability volume in Å³.
    pub alpha_parallel_a3: f64,
    /// `α_⊥` as a polarizability volume in Å³.
    pub alpha_perp_a3: f64,
}

impl PhysicalMolecule {
    pub fn validate(&self) -> Result<()> {
        if !(self.rotational_constant_cm > 0.0 && self.rotational_constant_cm.is_finite()) {
            return Err(Error::InvalidPhysical("rotational_constant_cm must be positive".into()));
        }
        for (name, v) in [
            ("dipole_debye", self.dipole_debye),
            ("alpha_parallel_a3", self.alpha_parallel_a3),
            ("alpha_perp_a3", self.alpha_perp_a3),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidPhysical(format!("{name} must be non-negative")));
            }
        }
        if self.alpha_parallel_a3 < self.alpha_perp_a3 {
            return Err(Error::InvalidPhysical(
                "alpha_parallel_a3 must not be smaller than alpha_perp_a3".into(),
            ));
        }
        Ok(())
    }

    fn b_joule(&self) -> f64 {
        self.rotational_constant_cm * WAVENUMBER_ENERGY
    }

    fn anisotropy_si(&self) -> f64 {
        (self.alpha_parallel_a3 - self.alpha_perp_a3) * ANGSTROM3_POLARIZABILITY
    }
}

/// Pulse in laboratory units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalPulse {
    /// Peak intensity of the first harmonic in W/cm².
    pub peak_intensity_w_cm2: f64,
    /// Envelope FWHM in femtoseconds.
    pub tau_fwhm_fs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPulse {
    pub couplings: CouplingSet,
    pub tau_fwhm: f64,
}

fn peak_field(intensity_w_cm2: f64) -> f64 {
    (2.0 * intensity_w_cm2 * 1e4 / (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY)).sqrt()
}

pub fn to_dimensionless(mol: &PhysicalMolecule, pulse: &PhysicalPulse) -> Result<DimensionlessPulse> {
    mol.validate()?;
    if !(pulse.peak_intensity_w_cm2 > 0.0 && pulse.peak_intensity_w_cm2.is_finite()) {
        return Err(Error::InvalidPhysical("peak_intensity_w_cm2 must be positive".into()));
    }
    if !(pulse.tau_fwhm_fs > 0.0 && pulse.tau_fwhm_fs.is_finite()) {
        return Err(Error::InvalidPhysical("tau_fwhm_fs must be positive".into()));
    }
    let b = mol.b_joule();
    let f0 = peak_field(pulse.peak_intensity_w_cm2);
    let couplings = CouplingSet {
        delta_omega: f0 * f0 * mol.anisotropy_si() / (2.0 * b),
        delta_omega_mu: mol.dipole_debye * DEBYE * f0 / b,
        delta_omega_perp: f0 * f0 * mol.alpha_perp_a3 * ANGSTROM3_POLARIZABILITY / (2.0 * b),
    };
    Ok(DimensionlessPulse {
        couplings,
        tau_fwhm: pulse.tau_fwhm_fs * 1e-15 * b / HBAR,
    })
}

/// Inverse of [`to_dimensionless`]: the intensity and duration that produce
/// `delta_omega` and `tau_fwhm` for this molecule. Needs `Δα > 0`.
pub fn from_dimensionless(mol: &PhysicalMolecule, delta_omega: f64, tau_fwhm: f64) -> Result<PhysicalPulse> {
    mol.validate()?;
    let anisotropy = mol.anisotropy_si();
    if anisotropy <= 0.0 {
        return Err(Error::InvalidPhysical(
            "zero polarizability anisotropy: intensity is not determined by delta_omega".into(),
        ));
    }
    if !(delta_omega > 0.0 && tau_fwhm > 0.0) {
        return Err(Error::InvalidPhysical(
            "delta_omega and tau_fwhm must be positive".into(),
        ));
    }
    let b = mol.b_joule();
    let f0_sq = 2.0 * b * delta_omega / anisotropy;
    Ok(PhysicalPulse {
        peak_intensity_w_cm2: f0_sq * SPEED_OF_LIGHT * VACUUM_PERMITTIVITY / 2.0 * 1e-4,
        tau_fwhm_fs: tau_fwhm * HBAR / b * 1e15,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ocs() -> PhysicalMolecule {
        PhysicalMolecule {
            rotational_constant_cm: 0.2029,
            dipole_debye: 0.715,
            alpha_parallel_a3: 7.1,
            alpha_perp_a3: 3.3,
        }
    }

    fn pulse() -> PhysicalPulse {
        PhysicalPulse {
            peak_intensity_w_cm2: 1e12,
            tau_fwhm_fs: 500.0,
        }
    }

    #[test]
    fn documented_constants() {
        assert_relative_eq!(WAVENUMBER_ENERGY, 1.98645e-23, max_relative = 5e-6);
        assert_relative_eq!(ANGSTROM3_POLARIZABILITY, 1.11265e-40, max_relative = 5e-6);
    }

    #[test]
    fn doubling_b_scales_results() {
        let base = to_dimensionless(&ocs(), &pulse()).unwrap();
        let heavy = PhysicalMolecule {
            rotational_constant_cm: 2.0 * ocs().rotational_constant_cm,
            ..ocs()
        };
        let doubled = to_dimensionless(&heavy, &pulse()).unwrap();
        assert_relative_eq!(
            doubled.couplings.delta_omega,
            base.couplings.delta_omega / 2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(doubled.tau_fwhm, base.tau_fwhm * 2.0, max_relative = 1e-14);
    }

    #[test]
    fn isotropic_molecule_has_no_delta_omega() {
        let iso = PhysicalMolecule {
            alpha_parallel_a3: 3.3,
            ..ocs()
        };
        let d = to_dimensionless(&iso, &pulse()).unwrap();
        assert_eq!(d.couplings.delta_omega, 0.0);
        assert!(from_dimensionless(&iso, 10.0, 1.0).is_err());
    }

    #[test]
    fn rejects_non_positive_inputs() {
        let bad = PhysicalMolecule {
            rotational_constant_cm: 0.0,
            ..ocs()
        };
        assert!(to_dimensionless(&bad, &pulse()).is_err());
        let p = PhysicalPulse {
            peak_intensity_w_cm2: -1.0,
            ..pulse()
        };
        assert!(to_dimensionless(&ocs(), &p).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(dw in 1e-2f64..1e4, tau in 1e-3f64..1e2, b in 0.01f64..10.0) {
            let mol = PhysicalMolecule { rotational_constant_cm: b, ..ocs() };
            let p = from_dimensionless(&mol, dw, tau).unwrap();
            let back = to_dimensionless(&mol, &p).unwrap();
            prop_assert!(((back.couplings.delta_omega - dw) / dw).abs() < 1e-12);
            prop_assert!(((back.tau_fwhm - tau) / tau).abs() < 1e-12);
        }
    }
}
