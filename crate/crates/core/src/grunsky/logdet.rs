//! `log det(I − B Bᴴ)` over nested truncations.

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::build::CMatrix;
use crate::error::{Error, Result};

/// Imaginary part tolerated in the pivoted-LU log determinant.
pub const PHASE_TOL: f64 = 1e-12;

/// Estimates of a scalar over a sequence of refinements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub orders: Vec<usize>,
    pub estimates: Vec<f64>,
    pub extrapolated: f64,
    pub residual_tail: f64,
}

impl ConvergenceReport {
    pub fn new(orders: Vec<usize>, estimates: Vec<f64>) -> Result<Self> {
        if orders.is_empty() || orders.len() != estimates.len() {
            return Err(Error::InvalidInput("report needs one estimate per order".into()));
        }
        if orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("orders must be strictly increasing".into()));
        }
        let extrapolated = *estimates.last().unwrap();
        let residual_tail = if estimates.len() > 1 {
            (extrapolated - estimates[estimates.len() - 2]).abs()
        } else {
            0.0
        };
        Ok(Self { orders, estimates, extrapolated, residual_tail })
    }

    /// Error of the last estimate assuming geometric convergence: with
    /// increments `t₁, t₂` and ratio `ρ = t₂/t₁ < 1`, the remainder is
    /// `t₂ ρ/(1 − ρ)`. Falls back to `residual_tail` otherwise.
    pub fn error_estimate(&self) -> f64 {
        let e = &self.estimates;
        if e.len() < 3 {
            return self.residual_tail;
        }
        let t1 = (e[e.len() - 2] - e[e.len() - 3]).abs();
        let t2 = self.residual_tail;
        if t2 == 0.0 {
            return 0.0;
        }
        let rho = t2 / t1;
        if rho < 1.0 {
            t2 * rho / (1.0 - rho)
        } else {
            t2
        }
    }
}

/// `log det(I − B Bᴴ)` of a full matrix.
///
/// Positive definiteness is established by Cholesky; the value itself comes
/// from the pivoted LU factorization, whose phase must vanish.
pub fn log_det_complement(b: &CMatrix) -> Result<f64> {
    let n = b.nrows();
    if n != b.ncols() {
        return Err(Error::InvalidInput("log det needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let a: DMatrix<Complex64> = DMatrix::identity(n, n) - b * b.adjoint();
    let chol = Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite { order: n })?;
    let l = chol.l_dirty();
    if (0..n).any(|i| !(l[(i, i)].re > 0.0)) {
        return Err(Error::NotPositiveDefinite { order: n });
    }
    let lu = a.lu();
    let u = lu.u();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += u[(i, i)].ln();
    }
    if lu.p().determinant::<f64>() < 0.0 {
        acc += Complex64::new(0.0, std::f64::consts::PI);
    }
    let phase = (acc.im + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
    if phase.abs() > PHASE_TOL {
        return Err(Error::Singular(format!("log det has imaginary part {phase:.3e}")));
    }
    Ok(acc.re)
}

/// `log det(I − B_n B_nᴴ)` for each leading `n × n` block of `b`.
pub fn logdet_potential(b: &CMatrix, orders: &[usize]) -> Result<ConvergenceReport> {
    if orders.is_empty() {
        return Err(Error::InvalidInput("no orders requested".into()));
    }
    let mut est = Vec::with_capacity(orders.len());
    for &n in orders {
        if n == 0 || n > b.nrows() || n > b.ncols() {
            return Err(Error::InvalidInput(format!("order {n} outside 1..={}", b.nrows().min(b.ncols()))));
        }
        let block = b.view((0, 0), (n, n)).into_owned();
        est.push(log_det_complement(&block)?);
    }
    ConvergenceReport::new(orders.to_vec(), est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_matrix_gives_zero() {
        let b = CMatrix::zeros(5, 5);
        let r = logdet_potential(&b, &[1, 3, 5]).unwrap();
        assert!(r.estimates.iter().all(|v| *v == 0.0));
        assert_eq!(r.residual_tail, 0.0);
    }

    #[test]
    fn diagonal_closed_form() {
        let c: f64 = 0.3;
        let n = 20;
        let b = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(c.powi(i as i32 + 1), 0.0) } else { Complex64::new(0.0, 0.0) });
        let v = log_det_complement(&b).unwrap();
        let exact: f64 = (1..=n).map(|k| (1.0 - c.powi(2 * k as i32)).ln()).sum();
        assert_abs_diff_eq!(v, exact, epsilon = 1e-14);
    }

    #[test]
    fn geometric_error_estimate() {
        // partial sums of Σ 2^{-k}: remainder after k terms is 2^{-k}
        let est: Vec<f64> = (1..=4).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        let r = ConvergenceReport::new(vec![1, 2, 3, 4], est).unwrap();
        assert_abs_diff_eq!(r.error_estimate(), 0.0625, epsilon = 1e-15);
        let short = ConvergenceReport::new(vec![1, 2], vec![0.5, 0.75]).unwrap();
        assert_eq!(short.error_estimate(), 0.25);
        let flat = ConvergenceReport::new(vec![1, 2, 3], vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(flat.error_estimate(), 0.0);
    }

    #[test]
    fn scalar_case_and_failures() {
        let t: f64 = 0.2;
        let b = CMatrix::from_element(1, 1, Complex64::new(t * t, 0.0));
        assert_abs_diff_eq!(log_det_complement(&b).unwrap(), (1.0 - t.powi(4)).ln(), epsilon = 1e-15);
        let big = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(log_det_complement(&big), Err(Error::NotPositiveDefinite { order: 1 })));
        assert!(logdet_potential(&b, &[2]).is_err());
        assert!(ConvergenceReport::new(vec![2, 1], vec![0.0, 0.0]).is_err());
    }
}
