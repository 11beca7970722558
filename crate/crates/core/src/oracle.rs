//! Reference integrator for the split-operator propagator.
//!
//! Solves `i ċ = H(t) c` directly in the spectral basis with
//! `H = diag(J(J+1)) + c1(t) X + c2(t) X² + c0(t)`, using classic RK4 at one
//! hundredth of the plan's step. It shares no code with the grid-based
//! potential factor and is meant for test-scale bases only.

use num_complex::Complex64;

use crate::angular::{cos2_theta_matrix, cos_theta_matrix};
use crate::error::{Error, Result};
use crate::field::{effective_couplings, FieldConfig};
use crate::propagator::{drive, PropagationPlan, TimeSeries};
use crate::state::SpectralState;

pub const ORACLE_MAX_DIM: usize = 256;
pub const ORACLE_SUBSTEPS: usize = 100;

pub fn oracle_propagate(state: &SpectralState, plan: &PropagationPlan) -> Result<TimeSeries> {
    oracle_propagate_with_final(state, plan).map(|(series, _)| series)
}

pub fn oracle_propagate_with_final(
    state: &SpectralState,
    plan: &PropagationPlan,
) -> Result<(TimeSeries, SpectralState)> {
    let basis = plan.basis();
    if basis.dim() > ORACLE_MAX_DIM {
        return Err(Error::OracleTooLarge {
            dim: basis.dim(),
            limit: ORACLE_MAX_DIM,
        });
    }
    if state.basis() != basis {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: state.dim(),
        });
    }
    let mut rhs = Hamiltonian {
        energies: basis.rotor_energies(),
        x: cos_theta_matrix(basis),
        x2: cos2_theta_matrix(basis),
        field: plan.field(),
        scratch: vec![Complex64::new(0.0, 0.0); basis.dim()],
    };
    let dim = basis.dim();
    let mut k = [(); 4].map(|_| vec![Complex64::new(0.0, 0.0); dim]);
    let mut tmp = vec![Complex64::new(0.0, 0.0); dim];

    drive(state, plan, |c, t, dt| {
        let h = dt / ORACLE_SUBSTEPS as f64;
        for sub in 0..ORACLE_SUBSTEPS {
            let ts = t + sub as f64 * h;
            rhs.eval(ts, c, &mut k[0]);
            axpy_into(c, 0.5 * h, &k[0], &mut tmp);
            rhs.eval(ts + 0.5 * h, &tmp, &mut k[1]);
            axpy_into(c, 0.5 * h, &k[1], &mut tmp);
            rhs.eval(ts + 0.5 * h, &tmp, &mut k[2]);
            axpy_into(c, h, &k[2], &mut tmp);
            rhs.eval(ts + h, &tmp, &mut k[3]);
            for i in 0..dim {
                c[i] += (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]) * (h / 6.0);
            }
        }
    })
}

fn axpy_into(c: &[Complex64], a: f64, k: &[Complex64], out: &mut [Complex64]) {
    for ((o, c), k) in out.iter_mut().zip(c).zip(k) {
        *o = c + k * a;
    }
}

struct Hamiltonian<'a> {
    energies: Vec<f64>,
    x: crate::angular::BandedOperator,
    x2: crate::angular::BandedOperator,
    field: &'a FieldConfig,
    scratch: Vec<Complex64>,
}

impl Hamiltonian<'_> {
    /// `out = −i H(t) c`
    fn eval(&mut self, t: f64, c: &[Complex64], out: &mut [Complex64]) {
        let v = effective_couplings(t, self.field);
        for i in 0..c.len() {
            out[i] = c[i] * (self.energies[i] + v.c0);
        }
        if v.c2 != 0.0 {
            self.x2.apply_into(c, &mut self.scratch);
            for (o, s) in out.iter_mut().zip(&self.scratch) {
                *o += s * v.c2;
            }
        }
        if v.c1 != 0.0 {
            self.x.apply_into(c, &mut self.scratch);
            for (o, s) in out.iter_mut().zip(&self.scratch) {
                *o += s * v.c1;
            }
        }
        for o in out.iter_mut() {
            *o = Complex64::new(o.im, -o.re);
        }
    }
}
