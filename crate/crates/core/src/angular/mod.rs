//! Fixed-M spherical-harmonic basis and its Gauss–Legendre grid.
//!
//! The field is polarized along the laboratory Z axis, so the interaction
//! has no azimuthal dependence and M is a constant of motion. Every state
//! lives in the span of `Y_{J,M}` for `J = |M|..=j_max`; the azimuthal
//! factor `e^{iMφ}/√(2π)` is integrated out analytically, leaving the
//! θ-part `Ñ_J^M(cos θ)` normalized on `[-1, 1]`.

mod grid;
mod legendre;
mod operators;

pub use grid::{build_quadrature, gauss_legendre, grid_to_spectral, spectral_to_grid, AngularGrid};
pub use legendre::{legendre_column, normalized_assoc_legendre, recurrence_coefficient};
pub use operators::{cos2_theta_matrix, cos_theta_matrix, BandedOperator};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated basis `{ Y_{J,M} : |M| ≤ J ≤ j_max }` at fixed `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisDescriptor {
    j_max: usize,
    m: i32,
}

impl BasisDescriptor {
    pub fn new(j_max: usize, m: i32) -> Result<Self> {
        let m_abs = m.unsigned_abs() as usize;
        if j_max < m_abs {
            return Err(Error::InvalidBasis {
                j_max: j_max as i64,
                m_abs: m_abs as i64,
            });
        }
        Ok(Self { j_max, m })
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// Lowest retained J, equal to `|m|`.
    pub fn j_min(&self) -> usize {
        self.m.unsigned_abs() as usize
    }

    pub fn dim(&self) -> usize {
        self.j_max - self.j_min() + 1
    }

    /// Rotational quantum number stored at coefficient index `index`.
    pub fn j_at(&self, index: usize) -> usize {
        self.j_min() + index
    }

    pub fn index_of(&self, j: usize) -> Option<usize> {
        (self.j_min()..=self.j_max).contains(&j).then(|| j - self.j_min())
    }

    /// Eigenvalues `J(J+1)` of the dimensionless rotor Hamiltonian, in basis order.
    pub fn rotor_energies(&self) -> Vec<f64> {
        (self.j_min()..=self.j_max).map(|j| (j * (j + 1)) as f64).collect()
    }
}

/// Equivalent to [`BasisDescriptor::new`].
pub fn build_basis(j_max: usize, m: i32) -> Result<BasisDescriptor> {
    BasisDescriptor::new(j_max, m)
}
