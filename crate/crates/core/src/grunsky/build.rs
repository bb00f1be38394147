//! Truncated Grunsky matrices from generating functions.
//!
//! Bases: `e_n(z) = √(n/π) z^{n−1}` on the disk and `e*_n(w) = √(n/π) w^{−n−1}`
//! on its exterior. Every block is `−√(mn)` times a coefficient of a
//! logarithmic generating function; the global sign never matters since all
//! reported quantities factor through `B B*`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::maps::WeldingPair;
use crate::series::{bivariate_log, inv_trunc, mul_trunc, mul_trunc_fft, ComplexSeries, SeriesKind};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn require_order(s: &ComplexSeries, required: usize) -> Result<()> {
    if s.order() < required {
        return Err(Error::InsufficientOrder { required, available: s.order() });
    }
    Ok(())
}

fn scaled(l: &CMatrix, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| {
        let (m, k) = ((i + 1) as f64, (j + 1) as f64);
        -(m * k).sqrt() * l[(i + 1, j + 1)]
    })
}

/// `B1` from `log((f(z) − f(w))/(z − w)) = Σ b_mn z^m w^n`.
///
/// The difference quotient has `z^i w^j` coefficient `a_{i+j+1}`, so entries
/// up to index `N` need `f` through `z^{2N+1}`.
pub fn b1_from_series(f: &ComplexSeries, n: usize) -> Result<CMatrix> {
    b1_rect(f, n, n)
}

fn b1_rect(f: &ComplexSeries, rows: usize, cols: usize) -> Result<CMatrix> {
    if f.kind() != SeriesKind::TaylorAtZero {
        return Err(Error::KindMismatch("B1 needs the Taylor series of f".into()));
    }
    require_order(f, rows + cols + 2)?;
    let p = CMatrix::from_fn(rows + 1, cols + 1, |i, j| f.coeff(i + j + 1));
    Ok(scaled(&bivariate_log(&p)?, rows, cols))
}

/// `B4` from `log((g(z) − g(w))/(z − w))` in `u = 1/z`, `v = 1/w`.
///
/// With `g = a z + b + Σ_{k≥2} g_k z^{1−k}` the quotient is
/// `a − Σ_{i,j≥1} g_{i+j} u^i v^j`; `b` drops out and `a` divides out.
pub fn b4_from_series(g: &ComplexSeries, n: usize) -> Result<CMatrix> {
    b4_rect(g, n, n)
}

fn b4_rect(g: &ComplexSeries, rows: usize, cols: usize) -> Result<CMatrix> {
    if g.kind() != SeriesKind::LaurentAtInfinity {
        return Err(Error::KindMismatch("B4 needs the Laurent series of g".into()));
    }
    require_order(g, rows + cols + 1)?;
    let p = CMatrix::from_fn(rows + 1, cols + 1, |i, j| match (i, j) {
        (0, 0) => g.coeff(0),
        (0, _) | (_, 0) => ZERO,
        _ => -g.coeff(i + j),
    });
    Ok(scaled(&bivariate_log(&p)?, rows, cols))
}

pub fn build_b1(pair: &WeldingPair, n: usize) -> Result<CMatrix> {
    b1_from_series(&pair.f, n)
}

pub fn build_b4(pair: &WeldingPair, n: usize) -> Result<CMatrix> {
    b4_from_series(&pair.g, n)
}

/// Taylor coefficients of `G(u) = 1/g(1/u) = u / Σ g_k u^k`, indices `0..=n`.
fn reciprocal_exterior(g: &ComplexSeries, n: usize) -> Vec<Complex64> {
    let inv = inv_trunc(g.coeffs(), n);
    let mut out = vec![ZERO; n + 1];
    out[1..].copy_from_slice(&inv);
    out
}

/// Result of [`build_b2_b3`].
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBlocks {
    pub b2: CMatrix,
    pub b3: CMatrix,
    /// Radii `r < 1 < R` with `max_{|z|=r}|f| < min_{|w|=R}|g|`.
    pub radii: (f64, f64),
    /// Largest deviation of torus-sampled leading entries of `B2` from the
    /// series values, over the radii above and a perturbed pair.
    pub torus_deviation: f64,
}

/// Leading block size checked by torus sampling; sampling at `r < 1 < R`
/// amplifies rounding by `r^{−m} R^{n}`, so only a small corner is sharp.
pub const TORUS_BLOCK: usize = 6;
const TORUS_GRID: usize = 64;
const RADIUS_CANDIDATES: [(f64, f64); 7] =
    [(0.8, 1.25), (0.7, 1.4), (0.6, 1.6), (0.5, 2.0), (0.4, 2.5), (0.3, 3.0), (0.2, 5.0)];

/// `B2` and `B3` from `log(1 − f(z)/g(w)) = Σ γ_mn z^m w^{−n}`.
///
/// `B2[m,n] = −√(mn) γ_mn` comes from the bivariate logarithm recurrence on
/// `1 − f(z) G(u)`. `B3` is assembled independently from the power sums
/// `γ_mn = −Σ_p [z^m] f^p · [u^n] G^p / p`, and `B3 = B2ᵀ` is a check
/// rather than a construction.
pub fn build_b2_b3(pair: &WeldingPair, n: usize) -> Result<MixedBlocks> {
    let f = &pair.f;
    let g = &pair.g;
    require_order(f, n + 1)?;
    require_order(g, n + 1)?;
    let radii = separation_radii(pair)?;

    let big_g = reciprocal_exterior(g, n);
    let b2 = b2_rect(f, &big_g, n, n)?;
    let b3 = b3_rect(f, &big_g, n, n);

    let lead = n.min(TORUS_BLOCK);
    let mut torus_deviation: f64 = 0.0;
    for (r, big_r) in [radii, (radii.0 * 0.9, radii.1 / 0.9)] {
        let t = torus_b2(pair, lead, r, big_r, TORUS_GRID)?;
        for i in 0..lead {
            for j in 0..lead {
                torus_deviation = torus_deviation.max((t[(i, j)] - b2[(i, j)]).norm());
            }
        }
    }
    Ok(MixedBlocks { b2, b3, radii, torus_deviation })
}

/// `B2` restricted to `rows × cols` by the bivariate logarithm of `1 − f(z) G(u)`.
fn b2_rect(f: &ComplexSeries, big_g: &[Complex64], rows: usize, cols: usize) -> Result<CMatrix> {
    let p = CMatrix::from_fn(rows + 1, cols + 1, |i, j| {
        if i == 0 && j == 0 {
            ONE - f.coeff(0) * big_g[0]
        } else {
            -f.coeff(i) * big_g[j]
        }
    });
    Ok(scaled(&bivariate_log(&p)?, rows, cols))
}

fn product(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    if n > 256 {
        mul_trunc_fft(a, b, n)
    } else {
        mul_trunc(a, b, n)
    }
}

/// `B3` restricted to `rows × cols` (exterior index by interior index) from
/// the power sums `γ_mn = −Σ_p [z^m] f^p · [u^n] G^p / p`.
fn b3_rect(f: &ComplexSeries, big_g: &[Complex64], rows: usize, cols: usize) -> CMatrix {
    let (zn, wn) = (cols, rows);
    let fz: Vec<Complex64> = (0..=zn).map(|k| f.coeff(k)).collect();
    let gz = &big_g[..=wn];
    let mut fp = fz.clone();
    let mut gp = gz.to_vec();
    let mut gamma = CMatrix::from_element(zn + 1, wn + 1, ZERO);
    for pw in 1..=zn.min(wn) {
        let w = 1.0 / pw as f64;
        for m in pw..=zn {
            if fp[m] == ZERO {
                continue;
            }
            for k in pw..=wn {
                gamma[(m, k)] -= fp[m] * gp[k] * w;
            }
        }
        fp = product(&fp, &fz, zn + 1);
        gp = product(&gp, gz, wn + 1);
    }
    CMatrix::from_fn(rows, cols, |i, j| {
        let (wi, zi) = (i + 1, j + 1);
        -((zi * wi) as f64).sqrt() * gamma[(zi, wi)]
    })
}

/// First candidate pair `r < 1 < R` separating `f(|z| = r)` from `g(|w| = R)` by modulus.
pub fn separation_radii(pair: &WeldingPair) -> Result<(f64, f64)> {
    let m = 256;
    for &(r, big_r) in &RADIUS_CANDIDATES {
        let mut fmax: f64 = 0.0;
        let mut gmin = f64::INFINITY;
        for j in 0..m {
            let t = 2.0 * PI * j as f64 / m as f64;
            fmax = fmax.max(pair.f.eval(Complex64::from_polar(r, t)).norm());
            gmin = gmin.min(pair.g.eval(Complex64::from_polar(big_r, t)).norm());
            // and the perturbed pair used by the torus check
            fmax = fmax.max(pair.f.eval(Complex64::from_polar(0.9 * r, t)).norm());
        }
        if fmax * 1.05 < gmin {
            return Ok((r, big_r));
        }
    }
    Err(Error::Geometry(
        "no radii r < 1 < R separate |f| on |z| = r from |g| on |w| = R".into(),
    ))
}

/// Leading `lead × lead` block of `B2` by 2-D FFT of
/// `log(1 − f(r e^{iα}) / g(R e^{iβ}))` on a `grid × grid` torus.
pub fn torus_b2(pair: &WeldingPair, lead: usize, r: f64, big_r: f64, grid: usize) -> Result<CMatrix> {
    if !grid.is_power_of_two() || grid < 2 * lead + 2 {
        return Err(Error::InvalidInput(format!("torus grid {grid} too small or not a power of two")));
    }
    let fs: Vec<Complex64> = (0..grid)
        .map(|j| pair.f.eval(Complex64::from_polar(r, 2.0 * PI * j as f64 / grid as f64)))
        .collect();
    let gs: Vec<Complex64> = (0..grid)
        .map(|j| pair.g.eval(Complex64::from_polar(big_r, 2.0 * PI * j as f64 / grid as f64)))
        .collect();
    let mut data = vec![ZERO; grid * grid];
    for (a, fa) in fs.iter().enumerate() {
        for (b, gb) in gs.iter().enumerate() {
            let x = fa / gb;
            if x.norm() >= 1.0 {
                return Err(Error::Geometry(format!("|f/g| >= 1 on the torus r={r}, R={big_r}")));
            }
            data[a * grid + b] = (ONE - x).ln();
        }
    }
    // rows (α) then columns (β)
    for row in data.chunks_mut(grid) {
        fft::forward(row);
    }
    let mut col = vec![ZERO; grid];
    for b in 0..grid {
        for a in 0..grid {
            col[a] = data[a * grid + b];
        }
        fft::forward(&mut col);
        for a in 0..grid {
            data[a * grid + b] = col[a];
        }
    }
    let norm = 1.0 / (grid * grid) as f64;
    // z^m w^{-n}: α-frequency m, β-frequency −n
    Ok(CMatrix::from_fn(lead, lead, |i, j| {
        let (m, k) = (i + 1, j + 1);
        let c = data[m * grid + (grid - k)] * norm;
        let gamma = c / (r.powi(m as i32) * big_r.powi(-(k as i32)));
        -((m * k) as f64).sqrt() * gamma
    }))
}

/// Provenance of a truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub pair: String,
    pub methods: [String; 4],
}

/// The four blocks at a common order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyTruncation {
    pub n: usize,
    pub b1: CMatrix,
    pub b2: CMatrix,
    pub b3: CMatrix,
    pub b4: CMatrix,
    pub provenance: Provenance,
    pub torus_deviation: f64,
}

impl GrunskyTruncation {
    pub fn build(pair: &WeldingPair, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("truncation order must be positive".into()));
        }
        let b1 = build_b1(pair, n)?;
        let b4 = build_b4(pair, n)?;
        let mixed = build_b2_b3(pair, n)?;
        let params: Vec<String> = pair.family.params().iter().map(|p| p.to_string()).collect();
        let tag = format!(
            "{}{}({})",
            if pair.inverted { "inverted " } else { "" },
            pair.family.tag(),
            params.join(",")
        );
        Ok(Self {
            n,
            b1,
            b2: mixed.b2,
            b3: mixed.b3,
            b4,
            provenance: Provenance {
                pair: tag,
                methods: [
                    "bivariate log of (f(z)-f(w))/(z-w)".into(),
                    "bivariate log of 1 - f(z)/g(w)".into(),
                    "power sums of f(w)/g(z)".into(),
                    "bivariate log of (g(z)-g(w))/(z-w)".into(),
                ],
            },
            torus_deviation: mixed.torus_deviation,
        })
    }
}

/// Initial contraction length of the residual products, as a multiple of `N`.
///
/// `B2` is close to unitary and its rows reach out to a multiple of their
/// index, depending on the pair, so square `N × N` truncations lose row norm
/// well inside the leading block.
pub const CONTRACTION_FACTOR: usize = 4;

/// Generalized Grunsky residuals at one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrunskyResidual {
    pub n: usize,
    /// Number of inner indices summed in every block product.
    pub contraction: usize,
    /// Frobenius norms of
    /// `B1B1* + B2B2* − I`, `B3B1* + B4B2*`, `B1B3* + B2B4*`, `B3B3* + B4B4* − I`.
    pub values: [f64; 4],
    /// Whether the last doubling of the contraction changed the values by
    /// less than `1e-12 + 1e-2 · value`; false when the series ran out of terms first.
    pub converged: bool,
}

impl GrunskyResidual {
    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Residuals of the four generalized Grunsky relations on the leading
/// `⌊N/2⌋` block.
///
/// The contraction starts at `CONTRACTION_FACTOR · N` and doubles until the
/// values settle or the coefficients of `f` and `g` run out.
pub fn grunsky_identity_residual(pair: &WeldingPair, n: usize) -> Result<GrunskyResidual> {
    let h = n / 2;
    let limit = (pair.f.order().saturating_sub(h + 2)).min(pair.g.order().saturating_sub(h + 1));
    let mut k = CONTRACTION_FACTOR * n;
    if k > limit {
        return Err(Error::InsufficientOrder { required: k + h + 2, available: pair.f.order().min(pair.g.order() + 1) });
    }
    let mut prev = grunsky_identity_residual_with(pair, n, k)?;
    loop {
        if 2 * k > limit {
            return Ok(GrunskyResidual { n, contraction: k, values: prev, converged: false });
        }
        k *= 2;
        let next = grunsky_identity_residual_with(pair, n, k)?;
        let settled = prev.iter().zip(&next).all(|(a, b)| (a - b).abs() <= 1e-12 + 1e-2 * b);
        prev = next;
        if settled {
            return Ok(GrunskyResidual { n, contraction: k, values: prev, converged: true });
        }
    }
}

/// Residual values with a fixed contraction length `k ≥ N`: `B2` comes from
/// the bivariate logarithm and `B3` from power sums, as in [`build_b2_b3`].
pub fn grunsky_identity_residual_with(pair: &WeldingPair, n: usize, k: usize) -> Result<[f64; 4]> {
    let h = n / 2;
    if h == 0 || k < n {
        return Err(Error::InvalidInput(format!("residual needs N ≥ 2 and contraction ≥ N, got N={n}, k={k}")));
    }
    require_order(&pair.g, k + 1)?;
    let big_g = reciprocal_exterior(&pair.g, k);
    let b1 = b1_rect(&pair.f, h, k)?;
    let b2 = b2_rect(&pair.f, &big_g, h, k)?;
    let b3 = b3_rect(&pair.f, &big_g, h, k);
    let b4 = b4_rect(&pair.g, h, k)?;
    let frob = |m: CMatrix, sub_identity: bool| -> f64 {
        let mut s = 0.0;
        for i in 0..h {
            for j in 0..h {
                let mut v = m[(i, j)];
                if sub_identity && i == j {
                    v -= ONE;
                }
                s += v.norm_sqr();
            }
        }
        s.sqrt()
    };
    let (b1h, b2h, b3h, b4h) = (b1.adjoint(), b2.adjoint(), b3.adjoint(), b4.adjoint());
    Ok([
        frob(&b1 * &b1h + &b2 * &b2h, true),
        frob(&b3 * &b1h + &b4 * &b2h, false),
        frob(&b1 * &b3h + &b2 * &b4h, false),
        frob(&b3 * &b3h + &b4 * &b4h, true),
    ])
}

/// Matrix dump: header row, then one `row,col,re,im` line per entry in row-major order.
pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut out = String::from("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            out.push_str(&format!("{},{},{:.16e},{:.16e}\n", i + 1, j + 1, v.re, v.im));
        }
    }
    out
}
