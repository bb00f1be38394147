//! Truncated power series with complex coefficients.
//!
//! Two layouts share one type. A Taylor series stores the coefficient of
//! `z^k` at index `k`. A Laurent-at-infinity series stores the coefficient
//! of `z^(1-k)` at index `k`, so `g(z) = a z + b + c/z + ...` is `[a, b, c, ...]`.
//!
//! All arithmetic is carried out at the working order handed in by the caller;
//! nothing here adapts the order on its own.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative magnitude below which trailing sampled coefficients are dropped.
pub const COEFFICIENT_FLOOR: f64 = 1e-14;

/// Relative negative-frequency content above which sampled data is taken to
/// be non-analytic inside the sampling circle.
pub const ANALYTICITY_TOL: f64 = 1e-8;

/// Coefficient parts smaller than this are stored as zero. Geometric tails
/// otherwise end in long runs of subnormals, and evaluation through them
/// is two orders of magnitude slower.
pub const UNDERFLOW_FLOOR: f64 = 1e-290;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    TaylorAtZero,
    LaurentAtInfinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSeries {
    kind: SeriesKind,
    coeffs: Vec<Complex64>,
}

impl ComplexSeries {
    pub fn new(kind: SeriesKind, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series must have order >= 1".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput(format!("coefficient {k} is not finite")));
        }
        for c in &mut coeffs {
            if c.re.abs() < UNDERFLOW_FLOOR {
                c.re = 0.0;
            }
            if c.im.abs() < UNDERFLOW_FLOOR {
                c.im = 0.0;
            }
        }
        Ok(Self { kind, coeffs })
    }

    pub fn taylor(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(SeriesKind::TaylorAtZero, coeffs)
    }

    pub fn laurent(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(SeriesKind::LaurentAtInfinity, coeffs)
    }

    /// Real-coefficient convenience constructor, mostly for tests and catalogs.
    pub fn from_real(kind: SeriesKind, coeffs: &[f64]) -> Result<Self> {
        Self::new(kind, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The identity map `z`, in either layout.
    pub fn identity(kind: SeriesKind, order: usize) -> Self {
        let order = order.max(2);
        let mut coeffs = vec![ZERO; order];
        match kind {
            SeriesKind::TaylorAtZero => coeffs[1] = ONE,
            SeriesKind::LaurentAtInfinity => coeffs[0] = ONE,
        }
        Self { kind, coeffs }
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Copy truncated (or zero-padded) to `order` coefficients.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(1), ZERO);
        Self { kind: self.kind, coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            kind: self.kind,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Value of the series at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_derivs(z)[0]
    }

    /// `[h, h', h'', h''']` at `z`.
    pub fn eval_derivs(&self, z: Complex64) -> [Complex64; 4] {
        match self.kind {
            SeriesKind::TaylorAtZero => {
                // Horner carrying the first three derivatives along.
                let mut d = [ZERO; 4];
                for &c in self.coeffs.iter().rev() {
                    d[3] = d[3] * z + d[2];
                    d[2] = d[2] * z + d[1];
                    d[1] = d[1] * z + d[0];
                    d[0] = d[0] * z + c;
                }
                d[2] *= 2.0;
                d[3] *= 6.0;
                d
            }
            SeriesKind::LaurentAtInfinity => {
                // Term c_k z^(1-k); with u = 1/z accumulate Σ c_k p(k) u^k for
                // the falling-factorial weights of each derivative.
                let u = z.inv();
                let mut acc = [ZERO; 4];
                let mut uk = ONE;
                for (k, &c) in self.coeffs.iter().enumerate() {
                    let e = 1.0 - k as f64;
                    let t = c * uk;
                    acc[0] += t;
                    acc[1] += t * e;
                    acc[2] += t * (e * (e - 1.0));
                    acc[3] += t * (e * (e - 1.0) * (e - 2.0));
                    uk *= u;
                }
                [acc[0] * z, acc[1], acc[2] * u, acc[3] * u * u]
            }
        }
    }

    /// Cauchy product, truncated to the coefficients determined by both inputs.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch("multiply requires equal kinds".into()));
        }
        match self.kind {
            SeriesKind::TaylorAtZero => {
                let n = self.order().min(other.order());
                Ok(Self {
                    kind: self.kind,
                    coeffs: mul_trunc(&self.coeffs, &other.coeffs, n),
                })
            }
            SeriesKind::LaurentAtInfinity => {
                // index j, k -> j + k - 1; the product of two leading z terms is z².
                let lead = |s: &Self| s.coeffs.iter().position(|c| *c != ZERO).unwrap_or(s.order());
                let (la, lb) = (lead(self), lead(other));
                if la + lb == 0 {
                    return Err(Error::InvalidInput(
                        "product of two Laurent series with z terms has a z^2 term".into(),
                    ));
                }
                let known = (self.order() + lb).min(other.order() + la).saturating_sub(1).max(1);
                let mut out = vec![ZERO; known];
                for (j, a) in self.coeffs.iter().enumerate() {
                    for (k, b) in other.coeffs.iter().enumerate() {
                        let idx = j + k;
                        if idx >= 1 && idx - 1 < known {
                            out[idx - 1] += a * b;
                        }
                    }
                }
                Self::new(self.kind, out)
            }
        }
    }

    /// `outer(inner(z))` for two Taylor series with `inner(0) = 0`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.kind != SeriesKind::TaylorAtZero || inner.kind != SeriesKind::TaylorAtZero {
            return Err(Error::KindMismatch("composition is defined for Taylor series only".into()));
        }
        if inner.coeffs[0] != ZERO {
            return Err(Error::InvalidInput(
                "inner series has a nonzero constant term".into(),
            ));
        }
        let n = outer.order().min(inner.order());
        let mut acc = vec![ZERO; n];
        for &c in outer.coeffs[..n].iter().rev() {
            acc = mul_trunc(&acc, &inner.coeffs, n);
            acc[0] += c;
        }
        Self::taylor(acc)
    }

    /// Term-by-term derivative.
    ///
    /// A Taylor series loses one coefficient; a Laurent series gains one,
    /// since differentiating `z^(1-k)` moves it to index `k+1`.
    pub fn derivative(&self) -> Self {
        match self.kind {
            SeriesKind::TaylorAtZero => {
                if self.order() < 2 {
                    return Self { kind: self.kind, coeffs: vec![ZERO] };
                }
                let coeffs = self.coeffs[1..]
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * (k + 1) as f64)
                    .collect();
                Self { kind: self.kind, coeffs }
            }
            SeriesKind::LaurentAtInfinity => {
                let mut coeffs = vec![ZERO; self.order() + 1];
                for (k, c) in self.coeffs.iter().enumerate() {
                    coeffs[k + 1] = c * (1.0 - k as f64);
                }
                Self { kind: self.kind, coeffs }
            }
        }
    }

    /// `log a` for a Taylor series with unit constant term.
    pub fn log_ratio(&self) -> Result<Self> {
        if self.kind != SeriesKind::TaylorAtZero {
            return Err(Error::KindMismatch("log_ratio expects a Taylor series".into()));
        }
        if (self.coeffs[0] - ONE).norm() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "log_ratio needs constant term 1, got {}",
                self.coeffs[0]
            )));
        }
        Self::taylor(log_trunc(&self.coeffs, self.order()))
    }

    /// Multiplicative inverse of a Taylor series with nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.kind != SeriesKind::TaylorAtZero {
            return Err(Error::KindMismatch("reciprocal expects a Taylor series".into()));
        }
        if self.coeffs[0] == ZERO {
            return Err(Error::Singular("reciprocal of a series vanishing at 0".into()));
        }
        Self::taylor(inv_trunc(&self.coeffs, self.order()))
    }

    /// Fit coefficients to `samples` of an analytic function on `|z| = radius`.
    ///
    /// For Taylor layout the function must be analytic in the disk, for
    /// Laurent layout in the exterior (with at most a simple pole at ∞).
    /// Trailing coefficients under [`COEFFICIENT_FLOOR`] times the largest are
    /// dropped.
    pub fn coeffs_from_samples(kind: SeriesKind, samples: &[Complex64], radius: f64) -> Result<Self> {
        let m = samples.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidInput(format!("sample count {m} is not a power of two")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("bad sampling radius {radius}")));
        }
        let mut buf = samples.to_vec();
        fft::forward(&mut buf);
        let scale = 1.0 / m as f64;
        buf.iter_mut().for_each(|x| *x *= scale);
        let peak = buf.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Self::new(kind, vec![ZERO]);
        }

        // Frequencies the layout cannot represent must be (numerically) absent.
        let half = m / 2;
        let stray = match kind {
            SeriesKind::TaylorAtZero => buf[half..].iter().map(|x| x.norm()).fold(0.0, f64::max),
            // Laurent keeps frequencies 1, 0, -1, ..., -(half-2).
            SeriesKind::LaurentAtInfinity => buf[2..=half + 1]
                .iter()
                .map(|x| x.norm())
                .fold(0.0, f64::max),
        };
        if stray > ANALYTICITY_TOL * peak {
            return Err(Error::Analyticity(format!(
                "relative content {:.3e} outside the representable band; \
                 radius {radius} is outside the domain of analyticity or the data is under-resolved",
                stray / peak
            )));
        }

        let mut coeffs: Vec<Complex64> = match kind {
            SeriesKind::TaylorAtZero => (0..half)
                .map(|k| buf[k] * radius.powi(-(k as i32)))
                .collect(),
            SeriesKind::LaurentAtInfinity => (0..half)
                .map(|k| {
                    let freq = 1 - k as i64;
                    let bin = freq.rem_euclid(m as i64) as usize;
                    buf[bin] * radius.powi(-(freq as i32))
                })
                .collect(),
        };
        let big = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() < COEFFICIENT_FLOOR * big {
            coeffs.pop();
        }
        Self::new(kind, coeffs)
    }

    /// Values on `m` uniform points of `|z| = radius`, starting at angle 0.
    ///
    /// Exact (up to rounding) by folding coefficients modulo `m`.
    pub fn samples_from_coeffs(&self, radius: f64, m: usize) -> Vec<Complex64> {
        let mut buf = vec![ZERO; m];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let power = match self.kind {
                SeriesKind::TaylorAtZero => k as i64,
                SeriesKind::LaurentAtInfinity => 1 - k as i64,
            };
            let bin = power.rem_euclid(m as i64) as usize;
            buf[bin] += c * radius.powi(power as i32);
        }
        fft::inverse(&mut buf);
        buf
    }
}

/// Truncated product of two coefficient slices.
pub fn mul_trunc(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == ZERO {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// [`mul_trunc`] through a zero-padded FFT; rounding is relative to
/// `‖a‖‖b‖` rather than to each coefficient.
pub fn mul_trunc_fft(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let (a, b) = (&a[..a.len().min(n)], &b[..b.len().min(n)]);
    if a.is_empty() || b.is_empty() {
        return vec![ZERO; n];
    }
    let len = (a.len() + b.len() - 1).next_power_of_two();
    let mut x = padded(a, len);
    let y = padded(b, len);
    for (xv, yv) in x.iter_mut().zip(&y) {
        *xv *= yv;
    }
    fft::inverse(&mut x);
    let scale = 1.0 / len as f64;
    let mut out: Vec<Complex64> = x.into_iter().take(n).map(|v| v * scale).collect();
    out.resize(n, ZERO);
    out
}

/// Smallest `2^a 3^b ≥ n`.
fn smooth_length(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut three = 1;
    while three < best {
        let mut l = three;
        while l < n {
            l *= 2;
        }
        best = best.min(l);
        three *= 3;
    }
    best
}

/// Forward transform of `a` zero-padded to `len`.
fn padded(a: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut x = vec![ZERO; len];
    x[..a.len()].copy_from_slice(a);
    fft::forward(&mut x);
    x
}

/// Truncated reciprocal, `a[0] != 0`.
pub fn inv_trunc(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut r = vec![ZERO; n];
    let a0inv = a[0].inv();
    r[0] = a0inv;
    for k in 1..n {
        let mut s = ZERO;
        for j in 1..=k.min(a.len() - 1) {
            s += a[j] * r[k - j];
        }
        r[k] = -s * a0inv;
    }
    r
}

/// Truncated logarithm of a series with `a[0] = 1`, via `k L_k = k a_k - Σ j L_j a_{k-j}`.
pub fn log_trunc(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut l = vec![ZERO; n];
    let at = |i: usize| a.get(i).copied().unwrap_or(ZERO);
    for k in 1..n {
        let mut s = at(k) * k as f64;
        for (j, &lj) in l.iter().enumerate().take(k).skip(1) {
            s -= lj * at(k - j) * j as f64;
        }
        l[k] = s / k as f64;
    }
    l
}

/// Truncated exponential of a series with `a[0] = 0`.
pub fn exp_trunc(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut e = vec![ZERO; n];
    e[0] = ONE;
    let at = |i: usize| a.get(i).copied().unwrap_or(ZERO);
    for k in 1..n {
        let mut s = ZERO;
        for j in 1..=k {
            s += at(j) * e[k - j] * j as f64;
        }
        e[k] = s / k as f64;
    }
    e
}

/// Column count from which [`bivariate_log`] convolves rows in frequency space.
const FFT_COLUMNS: usize = 256;

/// The row recurrence of [`bivariate_log`] with every row product accumulated
/// between a single forward and inverse transform.
fn bivariate_log_rows_fft(p_rows: &[Vec<Complex64>], p0_inv: &[Complex64], cols: usize) -> Vec<Vec<Complex64>> {
    let len = smooth_length(2 * cols - 1);
    let scale = 1.0 / len as f64;
    let p_hat: Vec<Vec<Complex64>> = p_rows.iter().map(|r| padded(r, len)).collect();
    let inv_hat = padded(p0_inv, len);
    let back = |mut x: Vec<Complex64>| -> Vec<Complex64> {
        fft::inverse(&mut x);
        x.truncate(cols);
        x.iter_mut().for_each(|v| *v *= scale);
        x
    };
    let mut l_rows = vec![log_trunc(&p_rows[0], cols)];
    let mut l_hat: Vec<Vec<Complex64>> = vec![Vec::new()];
    for m in 1..p_rows.len() {
        let mut acc = vec![ZERO; len];
        for j in 1..m {
            let w = j as f64;
            for ((a, l), p) in acc.iter_mut().zip(&l_hat[j]).zip(&p_hat[m - j]) {
                *a += l * p * w;
            }
        }
        let sum = back(acc);
        let s: Vec<Complex64> = p_rows[m].iter().zip(&sum).map(|(p, q)| p * m as f64 - q).collect();
        let mut s_hat = padded(&s, len);
        for (a, b) in s_hat.iter_mut().zip(&inv_hat) {
            *a *= b / m as f64;
        }
        let row = back(s_hat);
        l_hat.push(padded(&row, len));
        l_rows.push(row);
    }
    l_rows
}

/// Logarithm of a bivariate series `P(x, y) = Σ p[m][n] x^m y^n` with
/// `p[0][0] != 0`, returned as the coefficient matrix of `log(P / p[0][0])`
/// truncated to the shape of `p`.
///
/// Rows are solved one power of `x` at a time from `x ∂ₓL · P = x ∂ₓP`.
pub fn bivariate_log(p: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (rows, cols) = p.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("empty bivariate series".into()));
    }
    let p00 = p[(0, 0)];
    if p00 == ZERO {
        return Err(Error::Singular("bivariate series vanishes at the origin".into()));
    }
    let scale = p00.inv();
    let prow = |m: usize| -> Vec<Complex64> { (0..cols).map(|n| p[(m, n)] * scale).collect() };
    let p0_inv = inv_trunc(&prow(0), cols);

    let p_rows: Vec<Vec<Complex64>> = (0..rows).map(prow).collect();
    let l_rows = if cols >= FFT_COLUMNS {
        bivariate_log_rows_fft(&p_rows, &p0_inv, cols)
    } else {
        let mut l_rows: Vec<Vec<Complex64>> = Vec::with_capacity(rows);
        l_rows.push(log_trunc(&p_rows[0], cols));
        for m in 1..rows {
            let mut s: Vec<Complex64> = p_rows[m].iter().map(|c| c * m as f64).collect();
            for j in 1..m {
                let prod = mul_trunc(&l_rows[j], &p_rows[m - j], cols);
                for (sv, pv) in s.iter_mut().zip(prod) {
                    *sv -= pv * j as f64;
                }
            }
            let row: Vec<Complex64> = mul_trunc(&s, &p0_inv, cols)
                .into_iter()
                .map(|c| c / m as f64)
                .collect();
            l_rows.push(row);
        }
        l_rows
    };
    Ok(DMatrix::from_fn(rows, cols, |m, n| l_rows[m][n]))
}
