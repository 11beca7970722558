//! Laser-driven alignment of a linear rigid rotor.
//!
//! The dimensionless time-dependent Schrödinger equation
//! `i ∂ψ/∂t = (J² + V(θ, t)) ψ` is integrated in a fixed-M spherical-harmonic
//! basis by Strang splitting, with the interaction applied on a
//! Gauss–Legendre grid in `cos θ`. Energies are in units of the rotational
//! constant and times in `ħ/B`, so a free rotor revives with period `π`.
//!
//! ```
//! use rotalign::{angular, field, propagator, state::SpectralState};
//!
//! let basis = angular::build_basis(24, 0).unwrap();
//! let grid = angular::build_quadrature(49, &basis).unwrap();
//! let pulse = field::PulseSpec::new(1.0, 0.5, 2.0, 1).unwrap();
//! let field = field::FieldConfig::new(
//!     vec![pulse],
//!     field::CouplingSet::polarizability(100.0),
//!     None,
//!     field::InteractionMode::CycleAveraged,
//! )
//! .unwrap();
//! let plan = propagator::PropagationPlan::new(0.0, 4.0, 1e-3, 100, field, grid).unwrap();
//! let series = propagator::propagate(&SpectralState::eigenstate(&basis, 0).unwrap(), &plan).unwrap();
//! assert!(series.records.iter().any(|r| r.alignment > 0.5));
//! ```

pub mod angular;
pub mod error;
pub mod field;
pub mod io;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod state;
pub mod sweep;
pub mod units;

pub use angular::{AngularGrid, BandedOperator, BasisDescriptor};
pub use error::{Error, Result};
pub use field::{CouplingSet, FieldConfig, InteractionMode, PulseSpec};
pub use observables::ObservableRecord;
pub use propagator::{PropagationPlan, RunDiagnostics, TimeSeries};
pub use state::SpectralState;
pub use sweep::{ColorMode, DtControl, Figure, RunResult, RunSettings, RunSummary, SweepSpec};
