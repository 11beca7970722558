use crate::error::{Error, Result};

/// Coupling `a_j = √((j² − m²) / ((2j − 1)(2j + 1)))` of the three-term
/// recurrence `x Ñ_j = a_{j+1} Ñ_{j+1} + a_j Ñ_{j−1}`.
///
/// It is also the matrix element `⟨j−1, m| cos θ |j, m⟩`. Zero for `j ≤ |m|`.
pub fn recurrence_coefficient(j: usize, m: i32) -> f64 {
    let m_abs = m.unsigned_abs() as usize;
    if j <= m_abs {
        return 0.0;
    }
    let (j, m) = (j as f64, m_abs as f64);
    ((j * j - m * m) / ((2.0 * j - 1.0) * (2.0 * j + 1.0))).sqrt()
}

/// θ-part of `Y_{j,m}` as a function of `x = cos θ`, normalized so that
/// `∫₋₁¹ Ñ_j^m(x)² dx = 1`.
///
/// No Condon–Shortley phase is applied, so `Ñ_j^m(1) > 0` for `m = 0` and
/// every `cos θ` matrix element in this basis is non-negative. Negative `m`
/// gives the same function as `|m|`.
pub fn normalized_assoc_legendre(j: usize, m: i32, x: f64) -> Result<f64> {
    let m_abs = m.unsigned_abs() as usize;
    if j < m_abs {
        return Err(Error::LegendreDomain {
            j: j as i64,
            m_abs: m_abs as i64,
        });
    }
    Ok(*legendre_column(j, m, x).last().expect("non-empty column"))
}

/// `Ñ_J^m(x)` for every `J = |m|..=j_max`, by upward recurrence in `J`
/// from the closed-form seed `Ñ_m^m = c_m (1 − x²)^{m/2}`.
///
/// Panics if `j_max < |m|`; callers validate through `BasisDescriptor`.
pub fn legendre_column(j_max: usize, m: i32, x: f64) -> Vec<f64> {
    let m_abs = m.unsigned_abs() as usize;
    assert!(j_max >= m_abs, "j_max must be at least |m|");

    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    // c_0 = 1/√2, c_k = c_{k−1} √((2k+1)/(2k))
    let mut seed = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=m_abs {
        let k = k as f64;
        seed *= ((2.0 * k + 1.0) / (2.0 * k)).sqrt() * sin_theta;
    }

    let mut column = Vec::with_capacity(j_max - m_abs + 1);
    column.push(seed);
    if j_max == m_abs {
        return column;
    }
    column.push(x * (2.0 * m_abs as f64 + 3.0).sqrt() * seed);
    for j in (m_abs + 1)..j_max {
        let i = j - m_abs;
        let next = (x * column[i] - recurrence_coefficient(j, m) * column[i - 1]) / recurrence_coefficient(j + 1, m);
        column.push(next);
    }
    column
}
