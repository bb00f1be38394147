//! The universal Liouville action
//! `S₁ = ∬_𝔻 |f''/f'|² + ∬_𝔻* |g''/g'|² − 4π log|g'(∞)|`,
//! its comparison with `−12π S₂^univ`, and the classical action at genus `g`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grunsky::{s2_report, ConvergenceReport, Route};
use crate::maps::WeldingPair;
use crate::quadrature::QuadratureGrid;
use crate::series::{inv_trunc, mul_trunc_fft, SeriesKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default grid refinements `(n_r, n_θ)`.
pub const GRID_REFINEMENTS: [(usize, usize); 3] = [(64, 128), (128, 256), (256, 512)];

/// Largest integrand value accepted on a quadrature node before the curve is
/// declared outside the Weil–Petersson class.
pub const INTEGRAND_CAP: f64 = 1e12;

/// Radius past which no node may sit.
pub const BOUNDARY_CAP: f64 = 1.0 - 1e-6;

/// `(numerator, denominator)` Taylor data of the Schwarz-type integrand on the
/// disk: `f''/f'` for the interior, and for the exterior, in `u = 1/z`,
/// `g''(1/u)/(g'(1/u) u²)`, so that `|g''/g'|² d²z = |N/D|² d²u`.
fn integrand_series(pair: &WeldingPair) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let a = pair.f.coeffs();
    // f' = Σ (k+1) a_{k+1} z^k, f'' = Σ (k+2)(k+1) a_{k+2} z^k
    let fd: Vec<Complex64> = (0..a.len().saturating_sub(1)).map(|k| a[k + 1] * (k + 1) as f64).collect();
    let fdd: Vec<Complex64> = (0..a.len().saturating_sub(2)).map(|k| a[k + 2] * ((k + 2) * (k + 1)) as f64).collect();
    // g = Σ c_k z^{1−k}: g'(1/u) = c_0 − Σ_{k≥2} (k−1) c_k u^k and
    // g''(1/u)/u² = Σ_{k≥2} k(k−1) c_k u^{k−1}.
    let c = pair.g.coeffs();
    let mut gd = vec![ZERO; c.len()];
    let mut gdd = vec![ZERO; c.len().saturating_sub(1)];
    gd[0] = c[0];
    for k in 2..c.len() {
        gd[k] = -c[k] * (k - 1) as f64;
        gdd[k - 1] = c[k] * (k * (k - 1)) as f64;
    }
    (fdd, fd, gdd, gd)
}

/// Values of `Σ p_k z^k` at `n` uniform points of `|z| = r` by folding the
/// coefficients modulo `n`.
fn circle_values(p: &[Complex64], r: f64, n: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; n];
    let mut rk = 1.0;
    for (k, &c) in p.iter().enumerate() {
        if rk == 0.0 {
            break;
        }
        buf[k % n] += c * rk;
        rk *= r;
    }
    fft::inverse(&mut buf);
    buf
}

/// `∬_𝔻 |num/den|²` on a product grid.
fn disk_integral(num: &[Complex64], den: &[Complex64], grid: &QuadratureGrid, side: &str) -> Result<f64> {
    if num.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (&r, &w) in grid.radii.iter().zip(&grid.radial_weights) {
        if r > BOUNDARY_CAP {
            return Err(Error::InvalidInput(format!("quadrature node r = {r} beyond the boundary cap")));
        }
        let nv = circle_values(num, r, grid.n_theta);
        let dv = circle_values(den, r, grid.n_theta);
        let mut ring = 0.0;
        for (n, d) in nv.iter().zip(&dv) {
            let v = (n / d).norm_sqr();
            if !(v <= INTEGRAND_CAP) {
                return Err(Error::Analyticity(format!(
                    "{side} integrand reaches {v:.3e} at |z| = {r:.6}; the curve is not in the Weil–Petersson class"
                )));
            }
            ring += v;
        }
        total += w * grid.angular_weight() * ring;
    }
    Ok(total)
}

/// The three terms of `S₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S1Terms {
    pub interior: f64,
    pub exterior: f64,
    /// `−4π log|g'(∞)|`.
    pub log_term: f64,
}

impl S1Terms {
    pub fn total(&self) -> f64 {
        self.interior + self.exterior + self.log_term
    }
}

fn check_pair(pair: &WeldingPair) -> Result<()> {
    if pair.f.kind() != SeriesKind::TaylorAtZero || pair.g.kind() != SeriesKind::LaurentAtInfinity {
        return Err(Error::KindMismatch("S₁ needs f as a Taylor and g as a Laurent series".into()));
    }
    if pair.g_prime_at_infinity.norm() == 0.0 {
        return Err(Error::InvalidInput("g'(∞) vanishes".into()));
    }
    Ok(())
}

/// `S₁` on one product grid.
pub fn s1_on_grid(pair: &WeldingPair, grid: &QuadratureGrid) -> Result<S1Terms> {
    check_pair(pair)?;
    let (fdd, fd, gdd, gd) = integrand_series(pair);
    Ok(S1Terms {
        interior: disk_integral(&fdd, &fd, grid, "interior")?,
        exterior: disk_integral(&gdd, &gd, grid, "exterior")?,
        log_term: -4.0 * PI * pair.g_prime_at_infinity.norm().ln(),
    })
}

/// `S₁` over grid refinements `(n_r, n_θ)`; `orders` of the report are the `n_r`.
pub fn s1(pair: &WeldingPair, grids: &[(usize, usize)]) -> Result<ConvergenceReport> {
    if grids.is_empty() {
        return Err(Error::InvalidInput("no quadrature grids".into()));
    }
    let mut estimates = Vec::with_capacity(grids.len());
    for &(n_r, n_theta) in grids {
        estimates.push(s1_on_grid(pair, &QuadratureGrid::new(n_r, n_theta)?)?.total());
    }
    ConvergenceReport::new(grids.iter().map(|g| g.0).collect(), estimates)
}

/// `S₁` from Parseval, `∬_𝔻 |Σ h_k z^k|² = π Σ |h_k|²/(k+1)`, with the
/// integrands expanded as series.
pub fn s1_spectral(pair: &WeldingPair) -> Result<S1Terms> {
    check_pair(pair)?;
    let (fdd, fd, gdd, gd) = integrand_series(pair);
    let parseval = |num: &[Complex64], den: &[Complex64]| -> f64 {
        if num.is_empty() {
            return 0.0;
        }
        let n = num.len();
        let h = mul_trunc_fft(num, &inv_trunc(den, n), n);
        PI * h.iter().enumerate().map(|(k, c)| c.norm_sqr() / (k + 1) as f64).sum::<f64>()
    };
    Ok(S1Terms {
        interior: parseval(&fdd, &fd),
        exterior: parseval(&gdd, &gd),
        log_term: -4.0 * PI * pair.g_prime_at_infinity.norm().ln(),
    })
}

/// An absolute residual with its relative form `abs / max(1, |scale|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub abs: f64,
    pub rel: f64,
}

impl Residual {
    pub fn new(abs: f64, scale: f64) -> Self {
        Self { abs, rel: abs / scale.abs().max(1.0) }
    }
}

/// `S₁` against `−12π S₂^univ` for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub s1: ConvergenceReport,
    /// Parseval value of `S₁`, an independent check of the quadrature.
    pub s1_spectral: f64,
    pub s2_univ_via_b1: ConvergenceReport,
    pub s2_univ_via_b4: ConvergenceReport,
    /// The determinant route with the smaller `residual_tail`.
    pub s2_route: Route,
    pub s2_univ: f64,
    pub s2_dg: f64,
    /// `S₁ + 12π S₂^univ`.
    pub residual_identity: Residual,
    /// `|S₂ via B1 − S₂ via B4|`.
    pub residual_operators: Residual,
    pub grids: Vec<(usize, usize)>,
    pub orders: Vec<usize>,
}

pub fn identity_report(pair: &WeldingPair, grids: &[(usize, usize)], orders: &[usize]) -> Result<IdentityReport> {
    let s1r = s1(pair, grids)?;
    let spectral = s1_spectral(pair)?.total();
    let b1 = s2_report(pair, Route::B1, orders)?;
    let b4 = s2_report(pair, Route::B4, orders)?;
    let (route, s2) = if b1.residual_tail <= b4.residual_tail {
        (Route::B1, b1.extrapolated)
    } else {
        (Route::B4, b4.extrapolated)
    };
    let s1v = s1r.extrapolated;
    Ok(IdentityReport {
        residual_identity: Residual::new(s1v + 12.0 * PI * s2, s1v),
        residual_operators: Residual::new((b1.extrapolated - b4.extrapolated).abs(), b4.extrapolated),
        s1: s1r,
        s1_spectral: spectral,
        s2_univ_via_b1: b1,
        s2_univ_via_b4: b4,
        s2_route: route,
        s2_univ: s2,
        s2_dg: -s2,
        grids: grids.to_vec(),
        orders: orders.to_vec(),
    })
}

/// Classical Liouville action `S_cl = −12π S₂^dg + 8π(2g − 2)` and its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SclReport {
    pub genus: u32,
    pub s2_dg: f64,
    pub s_cl: f64,
    pub bound: f64,
    /// `bound − S_cl = 12π S₂^dg`.
    pub slack: f64,
    pub is_fuchsian_point: bool,
}

/// Tolerance on `S₂^dg` for the Fuchsian basepoint and for negative input.
pub const FUCHSIAN_TOL: f64 = 1e-12;

pub fn s_cl_report(s2_dg: f64, genus: u32) -> Result<SclReport> {
    if genus < 2 {
        return Err(Error::InvalidInput(format!("genus {genus} < 2")));
    }
    if !s2_dg.is_finite() || s2_dg < -FUCHSIAN_TOL {
        return Err(Error::InvalidInput(format!("S₂^dg = {s2_dg} must be nonnegative")));
    }
    let bound = 8.0 * PI * (2.0 * genus as f64 - 2.0);
    let slack = 12.0 * PI * s2_dg;
    Ok(SclReport {
        genus,
        s2_dg,
        s_cl: bound - slack,
        bound,
        slack,
        is_fuchsian_point: s2_dg.abs() <= FUCHSIAN_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ComplexSeries;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_pair_vanishes() {
        let p = WeldingPair::identity();
        let t = s1_on_grid(&p, &QuadratureGrid::new(16, 32).unwrap()).unwrap();
        assert_eq!(t.total(), 0.0);
        assert_eq!(s1_spectral(&p).unwrap().total(), 0.0);
    }

    #[test]
    fn quadratic_interior_closed_form() {
        // f''/f' = 2t/(1 + 2tz) = 2t Σ (−2t)^k z^k, so ∬|f''/f'|² = 4πt² Σ (4t²)^k/(k+1)
        //        = −π log(1 − 4t²).
        let t: f64 = 0.2;
        let mut p = WeldingPair::identity();
        p.f = ComplexSeries::taylor(vec![ZERO, Complex64::new(1.0, 0.0), Complex64::new(t, 0.0)]).unwrap();
        let exact = -PI * (1.0 - 4.0 * t * t).ln();
        let q = s1_on_grid(&p, &QuadratureGrid::new(64, 128).unwrap()).unwrap();
        assert_abs_diff_eq!(q.interior, exact, epsilon = 1e-12);
        assert_eq!(q.exterior, 0.0);
        let s = s1_spectral(&p).unwrap();
        // Parseval on a truncated series of order 2 keeps only h_0
        assert_abs_diff_eq!(s.interior, 4.0 * PI * t * t, epsilon = 1e-14);
    }

    #[test]
    fn joukowski_exterior_closed_form() {
        // g = z + c/z: g''/g' = 2c z^{-3}/(1 − c z^{-2}); in u, |2c u/(1 − c u²)|² integrates to −2π log(1 − c²).
        let c: f64 = 0.3;
        let mut p = WeldingPair::identity();
        let mut gc = vec![ZERO; 200];
        gc[0] = Complex64::new(1.0, 0.0);
        gc[2] = Complex64::new(c, 0.0);
        p.g = ComplexSeries::laurent(gc).unwrap();
        let exact = -2.0 * PI * (1.0 - c * c).ln();
        let q = s1_on_grid(&p, &QuadratureGrid::new(64, 128).unwrap()).unwrap();
        assert_abs_diff_eq!(q.exterior, exact, epsilon = 1e-12);
        assert_abs_diff_eq!(s1_spectral(&p).unwrap().exterior, exact, epsilon = 1e-12);
    }

    #[test]
    fn log_term_uses_stored_derivative() {
        let mut p = WeldingPair::identity();
        p.g_prime_at_infinity = Complex64::new(0.0, 2.0);
        let q = s1_on_grid(&p, &QuadratureGrid::new(8, 16).unwrap()).unwrap();
        assert_abs_diff_eq!(q.log_term, -4.0 * PI * 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn scl_examples() {
        let r = s_cl_report(0.0, 2).unwrap();
        assert_eq!(r.s_cl, 16.0 * PI);
        assert_eq!(r.slack, 0.0);
        assert!(r.is_fuchsian_point);
        let r = s_cl_report(0.1, 2).unwrap();
        assert_abs_diff_eq!(r.s_cl, 16.0 * PI - 1.2 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(r.slack, 1.2 * PI, epsilon = 1e-14);
        assert!(!r.is_fuchsian_point);
        assert!(s_cl_report(-1e-6, 2).is_err());
        assert!(s_cl_report(0.0, 1).is_err());
        assert!(s_cl_report(-1e-13, 3).unwrap().is_fuchsian_point);
    }
}
