//! Theodorsen's method for the Riemann map of the disk onto a star-like domain.
//!
//! The unknown is the boundary correspondence `φ(θ) = θ + ψ(θ)` with
//! `f(e^{iθ}) = ρ(φ(θ)) e^{iφ(θ)}`. Since `log(f(z)/z)` is holomorphic in the
//! disk with real part `log ρ(φ)` and imaginary part `ψ`, the correspondence
//! solves `ψ = K[log ρ(θ + ψ)]`, `K` the periodic conjugation operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::{StarDomain, SMOOTHNESS_CAP};
use crate::error::{Error, Result};
use crate::fft;
use crate::series::ComplexSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheodorsenOptions {
    /// Sup-norm change between sweeps at which the iteration stops.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for TheodorsenOptions {
    fn default() -> Self {
        Self { tol: 1e-14, max_iterations: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheodorsenMap {
    /// `φ(θ_j)` on the uniform grid `θ_j = 2πj/M`.
    pub phi: Vec<f64>,
    /// Interior map, rotated so that `f'(0) > 0`; `M/2` coefficients.
    pub f: ComplexSeries,
    pub iterations: usize,
    /// Last sup-norm change of `ψ`.
    pub residual: f64,
    pub damping: f64,
    /// Largest negative-frequency boundary coefficient relative to `|f'(0)|`.
    pub negative_frequency: f64,
    /// Largest coefficient in the top quarter of the retained band, relative to `|f'(0)|`.
    pub tail: f64,
}

/// Relaxation factor for the fixed-point sweep.
///
/// Undamped iteration contracts for `ε = max|ρ'/ρ| < 1` in theory but in
/// practice already stalls above roughly 0.8; for `ε > 0.5` the update is
/// damped with `min(0.8, 1.6/(1+ε²))`, which also carries the sweep past
/// `ε = 1` (the ellipse with axes 1.5, 0.5 has `ε = 4/3`).
pub fn damping_for(smoothness_bound: f64) -> f64 {
    if smoothness_bound <= 0.5 {
        1.0
    } else {
        0.8f64.min(1.6 / (1.0 + smoothness_bound * smoothness_bound))
    }
}

pub fn theodorsen_interior(domain: &StarDomain, m: usize, opts: &TheodorsenOptions) -> Result<TheodorsenMap> {
    if m < 64 || !m.is_power_of_two() {
        return Err(Error::InvalidInput(format!("sample count {m} must be a power of two >= 64")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let eps = domain.smoothness_bound;
    if eps >= SMOOTHNESS_CAP {
        return Err(Error::InvalidInput(format!(
            "smoothness bound {eps:.4} exceeds the mapper limit {SMOOTHNESS_CAP}"
        )));
    }
    let omega = damping_for(eps);
    let theta: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
    let mut psi = vec![0.0; m];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut log_rho = vec![0.0; m];
    while iterations < opts.max_iterations {
        iterations += 1;
        for ((lr, t), p) in log_rho.iter_mut().zip(&theta).zip(&psi) {
            *lr = domain.rho(t + p).ln();
        }
        let next = fft::conjugate(&log_rho);
        residual = next
            .iter()
            .zip(&psi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if !residual.is_finite() {
            break;
        }
        for (p, n) in psi.iter_mut().zip(&next) {
            *p = (1.0 - omega) * *p + omega * n;
        }
        if residual <= opts.tol {
            break;
        }
    }
    if !(residual <= opts.tol) {
        return Err(Error::NonConvergence {
            what: "Theodorsen iteration".into(),
            iterations,
            residual,
        });
    }

    let phi: Vec<f64> = theta.iter().zip(&psi).map(|(t, p)| t + p).collect();
    let mut buf: Vec<Complex64> = phi.iter().map(|&p| Complex64::from_polar(domain.rho(p), p)).collect();
    fft::forward(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|x| *x *= scale);

    let half = m / 2;
    let lead = buf[1];
    if lead.norm() == 0.0 {
        return Err(Error::Singular("computed map has vanishing derivative at 0".into()));
    }
    let negative_frequency = buf[half..].iter().map(|x| x.norm()).fold(0.0, f64::max) / lead.norm();
    let tail = buf[3 * half / 4..half].iter().map(|x| x.norm()).fold(0.0, f64::max) / lead.norm();

    // Rotate so f'(0) > 0. The mean of ψ is already zero, so this is a
    // rounding-level correction.
    let rot = lead.conj() / lead.norm();
    let mut coeffs: Vec<Complex64> = buf[..half].iter().map(|c| c * rot).collect();
    coeffs[1] = Complex64::new(coeffs[1].re, 0.0);
    let f = ComplexSeries::taylor(coeffs)?;
    Ok(TheodorsenMap { phi, f, iterations, residual, damping: omega, negative_frequency, tail })
}
