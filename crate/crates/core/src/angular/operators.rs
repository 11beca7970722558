use num_complex::Complex64;

use super::{recurrence_coefficient, BasisDescriptor};

/// Real symmetric banded matrix stored by diagonals.
///
/// `diagonals[k][i]` holds element `(i, i + k)` (and, by symmetry, `(i + k, i)`),
/// so `diagonals[k]` has length `dim − k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    dim: usize,
    diagonals: Vec<Vec<f64>>,
}

impl BandedOperator {
    /// Builds from the main diagonal and the upper diagonals in order.
    ///
    /// Panics if a diagonal has the wrong length.
    pub fn from_diagonals(dim: usize, diagonals: Vec<Vec<f64>>) -> Self {
        for (k, d) in diagonals.iter().enumerate() {
            assert_eq!(d.len(), dim.saturating_sub(k), "diagonal {k} has wrong length");
        }
        Self { dim, diagonals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_bandwidth(&self) -> usize {
        self.diagonals.len().saturating_sub(1)
    }

    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.diagonals[k]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.diagonals
            .get(hi - lo)
            .and_then(|d| d.get(lo))
            .copied()
            .unwrap_or(0.0)
    }

    /// `out = A · v`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        let main = &self.diagonals[0];
        for i in 0..self.dim {
            out[i] = v[i] * main[i];
        }
        for (k, d) in self.diagonals.iter().enumerate().skip(1) {
            for (i, &a) in d.iter().enumerate() {
                out[i] += v[i + k] * a;
                out[i + k] += v[i] * a;
            }
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(v, &mut out);
        out
    }

    /// `Re(v† A v)`; the imaginary part vanishes for symmetric real `A`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        let mut acc: f64 = self.diagonals[0].iter().zip(v).map(|(a, c)| a * c.norm_sqr()).sum();
        for (k, d) in self.diagonals.iter().enumerate().skip(1) {
            let off: f64 = d.iter().enumerate().map(|(i, a)| a * (v[i].conj() * v[i + k]).re).sum();
            acc += 2.0 * off;
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Matrix of `cos θ` in the fixed-M basis: symmetric tridiagonal with
/// `⟨J|cos θ|J+1⟩ = √(((J+1)² − M²) / ((2J+1)(2J+3)))` and zero diagonal.
pub fn cos_theta_matrix(basis: &BasisDescriptor) -> BandedOperator {
    let dim = basis.dim();
    let m = basis.m();
    let upper = (0..dim.saturating_sub(1))
        .map(|i| recurrence_coefficient(basis.j_at(i) + 1, m))
        .collect();
    BandedOperator::from_diagonals(dim, vec![vec![0.0; dim], upper])
}

/// Matrix of `cos² θ` from closed-form elements:
/// `⟨J|cos²θ|J⟩ = a_{J+1}² + a_J²`, `⟨J|cos²θ|J+2⟩ = a_{J+1} a_{J+2}`.
///
/// The last row includes `a_{j_max+1}²`, the coupling to the first excluded
/// level, so it is the exact projection of `cos² θ`. Squaring the truncated
/// [`cos_theta_matrix`] drops that term and differs in the final diagonal entry.
pub fn cos2_theta_matrix(basis: &BasisDescriptor) -> BandedOperator {
    let dim = basis.dim();
    let m = basis.m();
    let a = |j: usize| recurrence_coefficient(j, m);
    let main = (0..dim)
        .map(|i| {
            let j = basis.j_at(i);
            a(j + 1).powi(2) + a(j).powi(2)
        })
        .collect();
    let first = vec![0.0; dim.saturating_sub(1)];
    let second = (0..dim.saturating_sub(2))
        .map(|i| {
            let j = basis.j_at(i);
            a(j + 1) * a(j + 2)
        })
        .collect();
    BandedOperator::from_diagonals(dim, vec![main, first, second])
}
