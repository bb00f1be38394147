//! Schwarzian derivatives and the quadratic differential θ on `Ω₁ ∪ Ω₂`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::pair::WeldingPair;
use crate::error::{Error, Result};
use crate::series::ComplexSeries;

/// `|h'(z)|` below which the Schwarzian is reported as singular.
pub const CRITICAL_POINT_TOL: f64 = 1e-12;

fn from_derivs(d: [Complex64; 4]) -> Result<Complex64> {
    if d[1].norm() < CRITICAL_POINT_TOL {
        return Err(Error::Singular(format!("h' vanishes ({:.3e})", d[1].norm())));
    }
    let q = d[2] / d[1];
    Ok(d[3] / d[1] - 1.5 * q * q)
}

/// `𝒮(h)(z) = h'''/h' − (3/2)(h''/h')²` from series data.
pub fn schwarzian(h: &ComplexSeries, z: Complex64) -> Result<Complex64> {
    from_derivs(h.eval_derivs(z))
}

/// Schwarzian of a black-box holomorphic function.
///
/// Derivatives come from the trapezoidal Cauchy integral on the circle of
/// radius `radius` about `z`, which must lie inside the domain; half the
/// distance to the domain boundary is a good choice.
pub fn schwarzian_fn(h: &dyn Fn(Complex64) -> Complex64, z: Complex64, radius: f64) -> Result<Complex64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("bad contour radius {radius}")));
    }
    let m = 64;
    let mut d = [Complex64::new(0.0, 0.0); 4];
    for j in 0..m {
        let a = 2.0 * PI * j as f64 / m as f64;
        let v = h(z + Complex64::from_polar(radius, a));
        for (k, dk) in d.iter_mut().enumerate() {
            *dk += v * Complex64::from_polar(1.0, -(k as f64) * a);
        }
    }
    let fact = [1.0, 1.0, 2.0, 6.0];
    for (k, dk) in d.iter_mut().enumerate() {
        *dk *= fact[k] / (m as f64 * radius.powi(k as i32));
    }
    from_derivs(d)
}

/// Options for locating preimages in [`theta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaOptions {
    /// Points whose preimage satisfies `||z| − 1| < tube` are rejected.
    pub tube: f64,
    pub max_newton: usize,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self { tube: 1e-2, max_newton: 60 }
    }
}

/// Which side of the curve a point of the plane lies on, with its preimage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Interior(Complex64),
    Exterior(Complex64),
}

fn newton_invert(h: &ComplexSeries, w: Complex64, mut z: Complex64, max_iter: usize) -> Option<Complex64> {
    for _ in 0..max_iter {
        let d = h.eval_derivs(z);
        if d[1].norm() < CRITICAL_POINT_TOL {
            return None;
        }
        let step = (d[0] - w) / d[1];
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    let d = h.eval_derivs(z);
    ((d[0] - w).norm() <= 1e-12 * w.norm().max(1.0)).then_some(z)
}

/// Preimage of `w` under `f` (if `w ∈ Ω₁`) or `g` (if `w ∈ Ω₂`).
pub fn locate(pair: &WeldingPair, w: Complex64, opts: &ThetaOptions) -> Result<Side> {
    // Seed Newton from the nearest image of a polar grid on each side.
    let seed = |h: &ComplexSeries, radii: &[f64]| -> Complex64 {
        let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
        for &r in radii {
            for j in 0..64 {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 64.0);
                let d = (h.eval(z) - w).norm();
                if d < best.0 {
                    best = (d, z);
                }
            }
        }
        best.1
    };
    let inner_r: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
    let outer_r: Vec<f64> = (1..=16).map(|i| 1.0 + i as f64 / 8.0).chain([4.0, 8.0, 16.0]).collect();

    if let Some(z) = newton_invert(&pair.f, w, seed(&pair.f, &inner_r), opts.max_newton) {
        if z.norm() < 1.0 - opts.tube {
            return Ok(Side::Interior(z));
        }
        if z.norm() < 1.0 + opts.tube {
            return Err(Error::Geometry(format!("point {w} is within the tube around the curve")));
        }
    }
    if let Some(z) = newton_invert(&pair.g, w, seed(&pair.g, &outer_r), opts.max_newton) {
        if z.norm() > 1.0 + opts.tube {
            return Ok(Side::Exterior(z));
        }
        if z.norm() > 1.0 - opts.tube {
            return Err(Error::Geometry(format!("point {w} is within the tube around the curve")));
        }
    }
    Err(Error::NonConvergence {
        what: format!("preimage search for {w}"),
        iterations: opts.max_newton,
        residual: f64::NAN,
    })
}

/// `θ(w) = 𝒮(f⁻¹)(w)` on `Ω₁` and `𝒮(g⁻¹)(w)` on `Ω₂`, via
/// `𝒮(h⁻¹)(h(z)) = −𝒮(h)(z)/h'(z)²`.
pub fn theta(pair: &WeldingPair, w: Complex64, opts: &ThetaOptions) -> Result<Complex64> {
    let (h, z) = match locate(pair, w, opts)? {
        Side::Interior(z) => (&pair.f, z),
        Side::Exterior(z) => (&pair.g, z),
    };
    let d = h.eval_derivs(z);
    let s = from_derivs(d)?;
    Ok(-s / (d[1] * d[1]))
}
