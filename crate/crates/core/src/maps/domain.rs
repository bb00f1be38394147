//! Star-like domains described by a polar radius function.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Largest `max|ρ'/ρ|` accepted by the mapper. Damped iteration still
/// converges somewhat past 1; see [`crate::maps::theodorsen_interior`].
pub const SMOOTHNESS_CAP: f64 = 1.5;

/// How the radius function is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RadiusFunction {
    Circle,
    /// Ellipse with semi-axes `1 + c` (real) and `1 - c` (imaginary).
    Ellipse { c: f64 },
    /// `ρ(θ) = 1 + eps cos(kθ)`.
    FourierBump { eps: f64, k: u32 },
    /// Trigonometric interpolant of uniform samples of `ρ`.
    Samples { values: Vec<f64> },
}

/// A domain `{ r e^{iθ} : r < ρ(θ) }`, optionally replaced by its image under
/// `w ↦ 1/w̄` of the complement, which has radius `1/ρ(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarDomain {
    pub radius: RadiusFunction,
    pub inverted: bool,
    pub smoothness_bound: f64,
    #[serde(skip)]
    spectrum: Vec<Complex64>,
}

impl StarDomain {
    pub fn new(radius: RadiusFunction) -> Result<Self> {
        let spectrum = match &radius {
            RadiusFunction::Circle => Vec::new(),
            RadiusFunction::Ellipse { c } => {
                if !(*c > 0.0 && *c < 1.0) {
                    return Err(Error::InvalidInput(format!("ellipse needs 0 < c < 1, got {c}")));
                }
                Vec::new()
            }
            RadiusFunction::FourierBump { eps, k } => {
                if !(eps.is_finite() && eps.abs() < 1.0) || *k == 0 {
                    return Err(Error::InvalidInput(format!(
                        "fourier bump needs |eps| < 1 and k >= 1, got eps={eps}, k={k}"
                    )));
                }
                Vec::new()
            }
            RadiusFunction::Samples { values } => {
                if values.len() < 8 || !values.len().is_power_of_two() {
                    return Err(Error::InvalidInput(
                        "radius samples must be a power of two, at least 8".into(),
                    ));
                }
                if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::InvalidInput("radius samples must be positive".into()));
                }
                let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fft::forward(&mut buf);
                let m = values.len() as f64;
                buf.iter_mut().for_each(|x| *x /= m);
                buf
            }
        };
        let mut domain = Self { radius, inverted: false, smoothness_bound: 0.0, spectrum };
        domain.smoothness_bound = domain.compute_smoothness_bound();
        Ok(domain)
    }

    pub fn circle() -> Self {
        Self::new(RadiusFunction::Circle).expect("circle is always valid")
    }

    pub fn ellipse(c: f64) -> Result<Self> {
        Self::new(RadiusFunction::Ellipse { c })
    }

    pub fn fourier_bump(eps: f64, k: u32) -> Result<Self> {
        Self::new(RadiusFunction::FourierBump { eps, k })
    }

    /// The domain `{1/w̄ : w outside the boundary curve}`.
    pub fn inverted(&self) -> Self {
        let mut d = self.clone();
        d.inverted = !d.inverted;
        d
    }

    /// `(ρ(θ), ρ'(θ))`.
    pub fn rho_with_derivative(&self, theta: f64) -> (f64, f64) {
        let (r, dr) = match &self.radius {
            RadiusFunction::Circle => (1.0, 0.0),
            RadiusFunction::Ellipse { c } => {
                let (a, b) = (1.0 + c, 1.0 - c);
                let (s, co) = theta.sin_cos();
                let q = b * b * co * co + a * a * s * s;
                let r = a * b / q.sqrt();
                // dq/dθ = 2 (a² - b²) sin cos
                let dq = 2.0 * (a * a - b * b) * s * co;
                (r, -0.5 * r * dq / q)
            }
            RadiusFunction::FourierBump { eps, k } => {
                let kf = *k as f64;
                (1.0 + eps * (kf * theta).cos(), -eps * kf * (kf * theta).sin())
            }
            RadiusFunction::Samples { values } => {
                let m = values.len();
                let mut r = self.spectrum[0].re;
                let mut dr = 0.0;
                for j in 1..m / 2 {
                    let c = self.spectrum[j];
                    let e = Complex64::from_polar(1.0, j as f64 * theta);
                    // real signal: bins j and m-j are conjugate
                    r += 2.0 * (c * e).re;
                    dr += 2.0 * (c * e * Complex64::new(0.0, j as f64)).re;
                }
                let nyq = self.spectrum[m / 2].re;
                r += nyq * ((m / 2) as f64 * theta).cos();
                dr -= nyq * (m / 2) as f64 * ((m / 2) as f64 * theta).sin();
                (r, dr)
            }
        };
        if self.inverted {
            (1.0 / r, -dr / (r * r))
        } else {
            (r, dr)
        }
    }

    pub fn rho(&self, theta: f64) -> f64 {
        self.rho_with_derivative(theta).0
    }

    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(self.rho(theta), theta)
    }

    /// Whether `w` lies strictly inside the boundary curve.
    pub fn contains(&self, w: Complex64) -> bool {
        w.norm() < self.rho(w.arg())
    }

    fn compute_smoothness_bound(&self) -> f64 {
        match &self.radius {
            RadiusFunction::Circle => 0.0,
            RadiusFunction::Ellipse { c } => {
                let (a, b) = (1.0 + c, 1.0 - c);
                (a * a - b * b) / (2.0 * a * b)
            }
            _ => {
                // |ρ'/ρ| is unchanged by inversion; sample densely.
                let m = 8192;
                (0..m)
                    .map(|j| {
                        let (r, dr) = self.rho_with_derivative(2.0 * PI * j as f64 / m as f64);
                        (dr / r).abs()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }
}
