//! Expectation values and populations of a spectral state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{cos2_theta_matrix, cos_theta_matrix, AngularGrid, BandedOperator, BasisDescriptor};
use crate::state::SpectralState;

/// One sample of a time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: f64,
    /// `⟨cos²θ⟩`
    pub alignment: f64,
    /// `⟨cos θ⟩`
    pub orientation: f64,
    pub norm: f64,
    pub field: f64,
    pub populations: Option<Vec<f64>>,
}

/// Precomputed `cos θ` and `cos²θ` operators for one basis.
#[derive(Debug, Clone)]
pub struct Observables {
    cos: BandedOperator,
    cos2: BandedOperator,
}

impl Observables {
    pub fn new(basis: &BasisDescriptor) -> Self {
        Self {
            cos: cos_theta_matrix(basis),
            cos2: cos2_theta_matrix(basis),
        }
    }

    pub fn alignment(&self, c: &[Complex64]) -> f64 {
        self.cos2.expectation(c)
    }

    pub fn orientation(&self, c: &[Complex64]) -> f64 {
        self.cos.expectation(c)
    }

    pub fn cos_theta(&self) -> &BandedOperator {
        &self.cos
    }

    pub fn cos2_theta(&self) -> &BandedOperator {
        &self.cos2
    }

    pub fn record(&self, state: &SpectralState, t: f64, field: f64, with_populations: bool) -> ObservableRecord {
        let c = state.coefficients();
        ObservableRecord {
            t,
            alignment: self.alignment(c),
            orientation: self.orientation(c),
            norm: state.norm(),
            field,
            populations: with_populations.then(|| populations(state)),
        }
    }
}

/// `⟨cos²θ⟩` for the state.
pub fn alignment_cosine(state: &SpectralState) -> f64 {
    cos2_theta_matrix(state.basis()).expectation(state.coefficients())
}

/// `⟨cos θ⟩` for the state.
pub fn orientation_cosine(state: &SpectralState) -> f64 {
    cos_theta_matrix(state.basis()).expectation(state.coefficients())
}

/// `|c_J|²` in basis order.
pub fn populations(state: &SpectralState) -> Vec<f64> {
    state.coefficients().iter().map(|c| c.norm_sqr()).collect()
}

/// `p_{j_max} + p_{j_max−1}`, the weight sitting at the truncation edge.
pub fn edge_population(state: &SpectralState) -> f64 {
    state.coefficients().iter().rev().take(2).map(|c| c.norm_sqr()).sum()
}

/// `Σ_k w_k x_k^power |ψ(x_k)|²` on the grid; cross-check of the spectral forms.
///
/// Exact when the grid has at least `j_max + 2` nodes.
pub fn grid_moment(state: &SpectralState, grid: &AngularGrid, power: i32) -> f64 {
    let mut values = vec![Complex64::new(0.0, 0.0); grid.n_nodes()];
    grid.synthesize_into(state.coefficients(), &mut values);
    values
        .iter()
        .zip(grid.nodes())
        .zip(grid.weights())
        .map(|((v, x), w)| w * x.powi(power) * v.norm_sqr())
        .sum()
}
