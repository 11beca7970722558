use num_complex::Complex64;

use super::{legendre_column, BasisDescriptor};
use crate::error::{Error, Result};
use crate::state::SpectralState;

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
///
/// Roots of `P_n` by Newton iteration from the Tricomi-type initial guess;
/// nodes are mirrored so the grid is exactly symmetric about zero.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        // derivative at the final iterate
        dp = if n > 0 { legendre_with_derivative(n, x).1 } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` via the Bonnet recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss–Legendre grid in `x = cos θ` with the basis functions tabulated on it.
///
/// This is the DVR side of the solver: the potential is diagonal here, and
/// the pair [`spectral_to_grid`] / [`grid_to_spectral`] moves states between
/// the grid and the spectral basis.
///
/// Internally the table is held as `S_{J,k} = Ñ_J(x_k) √w_k`, whose rows are
/// orthonormal. One Löwdin step with compensated dot products brings
/// `S Sᵀ − I` down to rounding level, so repeated synthesis/analysis pairs do
/// not bias the norm.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    basis: BasisDescriptor,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    sqrt_weights: Vec<f64>,
    /// Row-major `dim × n_nodes`, entry `(i, k)` = `Ñ_{J_i}^M(x_k)`.
    table: Vec<f64>,
    /// Same layout, entry `(i, k)` = `Ñ_{J_i}^M(x_k) √w_k`.
    scaled: Vec<f64>,
}

impl AngularGrid {
    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Ñ_J^M(x_k)` for basis row `row`, across all nodes.
    pub fn legendre_row(&self, row: usize) -> &[f64] {
        let n = self.n_nodes();
        &self.table[row * n..(row + 1) * n]
    }

    /// Largest `|G − I|` over the quadrature Gram matrix
    /// `G_{JJ'} = Σ_k w_k Ñ_J(x_k) Ñ_J'(x_k)`.
    pub fn orthonormality_error(&self) -> f64 {
        gram_deviation(&self.scaled, self.basis.dim(), self.n_nodes())
            .into_iter()
            .fold(0.0, |acc, e| acc.max(e.abs()))
    }

    /// `out[k] = Σ_J c_J Ñ_J(x_k)`.
    pub fn synthesize_into(&self, coefficients: &[Complex64], out: &mut [Complex64]) {
        self.synthesize_scaled_into(coefficients, out);
        for (o, s) in out.iter_mut().zip(&self.sqrt_weights) {
            *o /= s;
        }
    }

    /// `out_J = Σ_k w_k Ñ_J(x_k) values[k]`.
    pub fn analyze_into(&self, values: &[Complex64], out: &mut [Complex64]) {
        let scaled: Vec<Complex64> = values.iter().zip(&self.sqrt_weights).map(|(v, s)| v * s).collect();
        self.analyze_scaled_into(&scaled, out);
    }

    /// Synthesis onto weight-scaled grid values `√w_k ψ(x_k)`.
    pub fn synthesize_scaled_into(&self, coefficients: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_nodes();
        debug_assert_eq!(coefficients.len(), self.basis.dim());
        debug_assert_eq!(out.len(), n);
        out.fill(Complex64::new(0.0, 0.0));
        for (c, row) in coefficients.iter().zip(self.scaled.chunks_exact(n)) {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(row) {
                o.re += c.re * p;
                o.im += c.im * p;
            }
        }
    }

    /// Analysis of weight-scaled grid values; exact transpose of
    /// [`synthesize_scaled_into`](Self::synthesize_scaled_into).
    pub fn analyze_scaled_into(&self, values: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_nodes();
        debug_assert_eq!(values.len(), n);
        debug_assert_eq!(out.len(), self.basis.dim());
        for (o, row) in out.iter_mut().zip(self.scaled.chunks_exact(n)) {
            let (mut re, mut im) = (0.0, 0.0);
            for (v, &p) in values.iter().zip(row) {
                re += v.re * p;
                im += v.im * p;
            }
            *o = Complex64::new(re, im);
        }
    }
}

/// Dot product in twice the working precision (Ogita–Rump–Oishi `Dot2`).
fn dot2(a: &[f64], b: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let p_err = x.mul_add(y, -p);
        let t = sum + p;
        let z = t - sum;
        comp += (sum - (t - z)) + (p - z) + p_err;
        sum = t;
    }
    sum + comp
}

/// Row-major `dim × dim` matrix `S Sᵀ − I`.
fn gram_deviation(rows: &[f64], dim: usize, n: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let g = dot2(&rows[i * n..(i + 1) * n], &rows[j * n..(j + 1) * n]);
            let d = if i == j { g - 1.0 } else { g };
            e[i * dim + j] = d;
            e[j * dim + i] = d;
        }
    }
    e
}

/// Gauss–Legendre grid of `n_nodes` points serving `basis`.
///
/// Requires `n_nodes ≥ j_max + 1`, the smallest rule that integrates every
/// product `Ñ_J Ñ_J'` exactly.
pub fn build_quadrature(n_nodes: usize, basis: &BasisDescriptor) -> Result<AngularGrid> {
    let required = basis.j_max() + 1;
    if n_nodes < required {
        return Err(Error::InsufficientQuadrature {
            n_nodes,
            j_max: basis.j_max(),
            required,
        });
    }
    let (nodes, weights) = gauss_legendre(n_nodes);
    let sqrt_weights: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let dim = basis.dim();
    let mut scaled = vec![0.0; dim * n_nodes];
    for (k, &x) in nodes.iter().enumerate() {
        for (i, v) in legendre_column(basis.j_max(), basis.m(), x).into_iter().enumerate() {
            scaled[i * n_nodes + k] = v * sqrt_weights[k];
        }
    }

    // Löwdin: S ← (I − E/2) S with E = S Sᵀ − I
    let e = gram_deviation(&scaled, dim, n_nodes);
    let mut refined = scaled.clone();
    for i in 0..dim {
        for j in 0..dim {
            let f = 0.5 * e[i * dim + j];
            if f == 0.0 {
                continue;
            }
            for k in 0..n_nodes {
                refined[i * n_nodes + k] -= f * scaled[j * n_nodes + k];
            }
        }
    }

    let table = refined
        .chunks_exact(n_nodes)
        .flat_map(|row| row.iter().zip(&sqrt_weights).map(|(p, s)| p / s))
        .collect();
    Ok(AngularGrid {
        basis: *basis,
        nodes,
        weights,
        sqrt_weights,
        table,
        scaled: refined,
    })
}

/// Samples a spectral state on the grid nodes.
pub fn spectral_to_grid(state: &SpectralState, grid: &AngularGrid) -> Result<Vec<Complex64>> {
    if state.basis() != grid.basis() {
        return Err(Error::DimensionMismatch {
            expected: grid.basis().dim(),
            found: state.dim(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n_nodes()];
    grid.synthesize_into(state.coefficients(), &mut out);
    Ok(out)
}

/// Projects grid values onto the spectral basis by quadrature.
pub fn grid_to_spectral(values: &[Complex64], grid: &AngularGrid) -> Result<SpectralState> {
    if values.len() != grid.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: grid.n_nodes(),
            found: values.len(),
        });
    }
    let mut coefficients = vec![Complex64::new(0.0, 0.0); grid.basis().dim()];
    grid.analyze_into(values, &mut coefficients);
    SpectralState::new(*grid.basis(), coefficients)
}
