//! Diagonals of the iterated kernels `𝒦_{1,n} = (K₁K₁*)ⁿ` and of `Σ 𝒦₁ⁿ/n`.
//!
//! With `K(z, ζ) = Σ B[m,n] e_m(z) e_n(ζ)`, the diagonal of `(K K*)ⁿ` at `z`
//! is `xᴴ (B Bᴴ)ⁿ x` with `x = conj(e(z))`; the first factor is
//! `‖v_z‖² = ‖Bᴴ x‖²`, the norm of `v_z = K(z, ·)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::build::CMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// `e_n(z) = √(n/π) z^{n−1}` on `𝔻` (the `B1` side).
    Interior,
    /// `e*_n(w) = √(n/π) w^{−n−1}` on `𝔻*` (the `B4` side).
    Exterior,
}

impl Basis {
    fn check(self, z: Complex64) -> Result<()> {
        let ok = match self {
            Basis::Interior => z.norm() < 1.0,
            Basis::Exterior => z.norm() > 1.0 && z.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("point {z} is outside the domain of the {self:?} basis")))
        }
    }

    /// `(e_1(z), …, e_n(z))`.
    pub fn vector(self, z: Complex64, n: usize) -> Vec<Complex64> {
        let (mut p, step) = match self {
            Basis::Interior => (Complex64::new(1.0, 0.0), z),
            Basis::Exterior => (z.inv() * z.inv(), z.inv()),
        };
        (1..=n)
            .map(|k| {
                let v = p * (k as f64 / PI).sqrt();
                p *= step;
                v
            })
            .collect()
    }

    /// Bound `‖v_z‖² ≤ 1/(π(1 − |z|²)²)` (mirrored for the exterior).
    pub fn vz_bound(self, z: Complex64) -> f64 {
        let s = 1.0 - z.norm_sqr();
        1.0 / (PI * s * s)
    }
}

fn conj_basis(b: &CMatrix, basis: Basis, z: Complex64) -> Result<CMatrix> {
    basis.check(z)?;
    if b.nrows() != b.ncols() {
        return Err(Error::InvalidInput("square matrix expected".into()));
    }
    let e = basis.vector(z, b.nrows());
    Ok(CMatrix::from_iterator(e.len(), 1, e.into_iter().map(|v| v.conj())))
}

/// `‖v_z‖²`, the first iterated-kernel diagonal.
pub fn vz_norm_sq(b: &CMatrix, basis: Basis, z: Complex64) -> Result<f64> {
    let x = conj_basis(b, basis, z)?;
    Ok((b.adjoint() * x).norm_squared())
}

/// `𝒦_n(z, z) = ⟨𝒦^{n−1} v_z, v_z⟩ ≥ 0`.
pub fn iterated_kernel_diag(b: &CMatrix, basis: Basis, n: usize, z: Complex64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("kernel power must be at least 1".into()));
    }
    let x = conj_basis(b, basis, z)?;
    // yᴴ (BᴴB)^{n−1} y split into two equal halves, so the value is a squared norm.
    let bh_b = b.adjoint() * b;
    let mut u = b.adjoint() * x;
    for _ in 0..(n - 1) / 2 {
        u = &bh_b * u;
    }
    let val = if (n - 1).is_multiple_of(2) { u.norm_squared() } else { (b * &u).norm_squared() };
    Ok(val.max(0.0))
}

/// Largest singular value.
pub fn spectral_norm(b: &CMatrix) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    b.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct O1Diagonal {
    pub value: f64,
    /// Number of iterated kernels summed.
    pub terms: usize,
    /// `‖B‖²`, the ratio of the geometric majorant.
    pub q: f64,
    /// Bound on the neglected tail.
    pub tail_bound: f64,
}

/// `Σ_{n≥1} 𝒦_n(z, z)/n`, truncated once the geometric tail
/// `‖v_z‖² Σ_{n>N*} q^{n−1}/n` drops below `tol`.
pub fn o1_diag(b: &CMatrix, basis: Basis, z: Complex64, tol: f64) -> Result<O1Diagonal> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let x = conj_basis(b, basis, z)?;
    let sigma = spectral_norm(b);
    let q = sigma * sigma;
    if q >= 1.0 {
        return Err(Error::InvalidInput(format!("operator norm {sigma} is not below 1")));
    }
    let bh_b = b.adjoint() * b;
    let mut y = b.adjoint() * x;
    let vz = y.norm_squared();
    // Σ_{n>N} q^{n−1}/n ≤ q^N / ((N+1)(1−q))
    let tail = |n: usize| vz * q.powi(n as i32) / ((n as f64 + 1.0) * (1.0 - q));
    let mut value = 0.0;
    let mut n = 0;
    loop {
        n += 1;
        let term = if n == 1 {
            vz
        } else if n % 2 == 1 {
            // same half-power split as iterated_kernel_diag
            y = &bh_b * &y;
            y.norm_squared()
        } else {
            (b * &y).norm_squared()
        };
        value += term / n as f64;
        if tail(n) <= tol || n > 100_000 {
            break;
        }
    }
    Ok(O1Diagonal { value, terms: n, q, tail_bound: tail(n) })
}
