//! Linear fractional transformations as determinant-one 2×2 matrices.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `z ↦ (a z + b) / (c z + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusTransform {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusTransform {
    /// Normalizes by a square root of the determinant.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 || !det.is_finite() {
            return Err(Error::Singular("Moebius matrix is degenerate".into()));
        }
        let s = det.sqrt().inv();
        Ok(Self { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    /// Rotation `z ↦ e^{iφ} z`, in SU(1,1) form.
    pub fn rotation(phi: f64) -> Self {
        let h = Complex64::from_polar(1.0, 0.5 * phi);
        Self { a: h, b: Complex64::new(0.0, 0.0), c: Complex64::new(0.0, 0.0), d: h.conj() }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `1/(cz + d)²` for a determinant-one matrix.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let q = self.c * z + self.d;
        (q * q).inv()
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Entrywise distance, minimized over the overall sign.
    pub fn distance_projective(&self, other: &Self) -> f64 {
        let plus = [self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d];
        let minus = [self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d];
        let norm = |v: [Complex64; 4]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        norm(plus).min(norm(minus))
    }

    /// Largest entry modulus.
    pub fn max_entry(&self) -> f64 {
        [self.a, self.b, self.c, self.d].iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl Mul for MoebiusTransform {
    type Output = Self;

    /// Matrix product; `(p * q).apply(z) == p.apply(q.apply(z))`.
    fn mul(self, q: Self) -> Self {
        Self {
            a: self.a * q.a + self.b * q.c,
            b: self.a * q.b + self.b * q.d,
            c: self.c * q.a + self.d * q.c,
            d: self.c * q.b + self.d * q.d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_and_composition() {
        let m = MoebiusTransform::new(c(2.0, 1.0), c(0.5, 0.0), c(0.1, -0.3), c(1.0, 0.2)).unwrap();
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-12);
        let n = MoebiusTransform::new(c(1.0, 0.0), c(0.0, 1.0), c(0.3, 0.0), c(2.0, 0.0)).unwrap();
        let z = c(0.2, 0.4);
        assert_abs_diff_eq!(((m * n).apply(z) - m.apply(n.apply(z))).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((m.inverse().apply(m.apply(z)) - z).norm(), 0.0, epsilon = 1e-14);
        let h = 1e-6;
        let fd = (m.apply(z + h) - m.apply(z - h)) / (2.0 * h);
        assert_abs_diff_eq!((m.derivative(z) - fd).norm(), 0.0, epsilon = 1e-8);
        assert!(MoebiusTransform::new(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn projective_distance_ignores_sign() {
        let m = MoebiusTransform::rotation(0.7);
        let neg = MoebiusTransform { a: -m.a, b: -m.b, c: -m.c, d: -m.d };
        assert_eq!(m.distance_projective(&neg), 0.0);
    }
}
