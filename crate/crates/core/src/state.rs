use num_complex::Complex64;

use crate::angular::BasisDescriptor;
use crate::error::{Error, Result};

/// Rotor wavefunction as coefficients over `Y_{J,M}`, `J = |M|..=j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    basis: BasisDescriptor,
    coefficients: Vec<Complex64>,
}

impl SpectralState {
    pub fn new(basis: BasisDescriptor, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: coefficients.len(),
            });
        }
        Ok(Self { basis, coefficients })
    }

    pub fn zeros(basis: &BasisDescriptor) -> Self {
        Self {
            basis: *basis,
            coefficients: vec![Complex64::new(0.0, 0.0); basis.dim()],
        }
    }

    /// The field-free eigenstate `Y_{j,M}` of the basis.
    pub fn eigenstate(basis: &BasisDescriptor, j: usize) -> Result<Self> {
        let index = basis.index_of(j).ok_or(Error::StateOutOfBasis {
            j,
            j_min: basis.j_min(),
            j_max: basis.j_max(),
        })?;
        let mut state = Self::zeros(basis);
        state.coefficients[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Exact field-free propagation: `c_J ← c_J exp(−i J(J+1) dt)`.
    pub fn free_evolve_in_place(&mut self, dt: f64) {
        let j_min = self.basis.j_min();
        for (i, c) in self.coefficients.iter_mut().enumerate() {
            let j = (j_min + i) as f64;
            *c *= Complex64::from_polar(1.0, -j * (j + 1.0) * dt);
        }
    }
}

/// `Y_{j,m}` as the initial condition of a run; `m` must match the basis.
pub fn initial_eigenstate(j: usize, m: i32, basis: &BasisDescriptor) -> Result<SpectralState> {
    if m != basis.m() {
        return Err(Error::StateOutOfBasis {
            j,
            j_min: basis.j_min(),
            j_max: basis.j_max(),
        });
    }
    SpectralState::eigenstate(basis, j)
}

pub fn free_evolve(state: &SpectralState, dt: f64) -> SpectralState {
    let mut out = state.clone();
    out.free_evolve_in_place(dt);
    out
}
