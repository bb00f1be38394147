//! Gauss–Legendre rules and the polar product grid on the unit disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton.
        let mut t = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    (
        x.iter().map(|t| m + h * t).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

/// Product rule on the unit disk: Gauss–Legendre in `r ∈ (0, 1)`, uniform in θ.
///
/// `radial_weights` already include the polar Jacobian `r`, so
/// `Σ_i Σ_j radial_weights[i] · angular_weight · h(r_i e^{iθ_j})` approximates `∫_𝔻 h`.
/// The exterior disk is reached through `z = 1/u` with an extra `|u|^{-4}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r == 0 || n_theta == 0 {
            return Err(Error::InvalidInput(format!("empty grid {n_r}x{n_theta}")));
        }
        let (radii, w) = gauss_legendre_on(n_r, 0.0, 1.0);
        let radial_weights = radii.iter().zip(&w).map(|(r, w)| r * w).collect();
        Ok(Self { n_r, n_theta, radii, radial_weights })
    }

    pub fn angular_weight(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    /// Sum of all weights, i.e. the rule applied to `h ≡ 1`.
    pub fn area(&self) -> f64 {
        self.radial_weights.iter().sum::<f64>() * self.angular_weight() * self.n_theta as f64
    }
}
