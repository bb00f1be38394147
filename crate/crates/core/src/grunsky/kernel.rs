//! Pointwise evaluation of the kernels `K₁ … K₄` of a welding pair.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::WeldingPair;

fn in_disk(z: Complex64) -> bool {
    z.norm() < 1.0
}

fn in_exterior(z: Complex64) -> bool {
    z.norm() > 1.0 && z.is_finite()
}

/// `[Σ c_j h_j, ∂_z, ∂_w, ∂_z∂_w]` with `h_j(z, w) = Σ_{i≤j} z^i w^{j−i}` the
/// complete homogeneous polynomials, so that `(z^{j+1} − w^{j+1})/(z − w) = h_j`.
fn homogeneous_sum(c: &[Complex64], z: Complex64, w: Complex64) -> [Complex64; 4] {
    let zero = Complex64::new(0.0, 0.0);
    // h_0 = 1; h_j = z h_{j−1} + w^j
    let (mut h, mut hz, mut hw, mut hzw) = (Complex64::new(1.0, 0.0), zero, zero, zero);
    let mut wp = Complex64::new(1.0, 0.0);
    let mut acc = [zero; 4];
    for (j, &cj) in c.iter().enumerate() {
        if j > 0 {
            let wprev = wp;
            wp *= w;
            hzw = hw + z * hzw;
            hw = z * hw + wprev * j as f64;
            hz = h + z * hz;
            h = z * h + wp;
        }
        acc[0] += cj * h;
        acc[1] += cj * hz;
        acc[2] += cj * hw;
        acc[3] += cj * hzw;
    }
    acc
}

/// `∂_z∂_w log Q` from `[Q, Q_z, Q_w, Q_zw]`.
fn mixed_log_derivative(q: [Complex64; 4]) -> Result<Complex64> {
    if q[0].norm() == 0.0 {
        return Err(Error::Singular("difference quotient vanishes; the map is not univalent here".into()));
    }
    Ok(q[3] / q[0] - q[1] * q[2] / (q[0] * q[0]))
}

/// Kernel `which ∈ 1..=4` at `(z, w)`:
///
/// * `K₁ = (1/π)[1/(z−w)² − f'(z)f'(w)/(f(z)−f(w))²]` on `𝔻 × 𝔻`
/// * `K₂ = (1/π) f'(z)g'(w)/(f(z)−g(w))²` on `𝔻 × 𝔻*`
/// * `K₃ = (1/π) g'(z)f'(w)/(g(z)−f(w))²` on `𝔻* × 𝔻`
/// * `K₄` as `K₁` with `g` on `𝔻* × 𝔻*`.
///
/// `K₁` and `K₄` are evaluated as `−(1/π) ∂_z∂_w log Q` with the difference
/// quotient `Q = (h(z)−h(w))/(z−w)` summed directly from the series, so the
/// removable singularity on the diagonal never forms; there the value is
/// `−𝒮(h)/(6π)`.
pub fn kernel(pair: &WeldingPair, which: u8, z: Complex64, w: Complex64) -> Result<Complex64> {
    let wrong = |what: &str| Err(Error::InvalidInput(format!("K{which} needs {what}, got z={z}, w={w}")));
    match which {
        1 => {
            if !(in_disk(z) && in_disk(w)) {
                return wrong("z, w in the disk");
            }
            // Q = Σ_{j≥0} a_{j+1} h_j(z, w)
            let q = homogeneous_sum(&pair.f.coeffs()[1..], z, w);
            Ok(-mixed_log_derivative(q)? / PI)
        }
        4 => {
            if !(in_exterior(z) && in_exterior(w)) {
                return wrong("z, w outside the disk");
            }
            // In u = 1/z, v = 1/w: Q = a − uv Σ_{j≥0} g_{j+2} h_j(u, v).
            let (u, v) = (z.inv(), w.inv());
            let g = pair.g.coeffs();
            let r = if g.len() > 2 { homogeneous_sum(&g[2..], u, v) } else { [Complex64::new(0.0, 0.0); 4] };
            let q = [
                g[0] - u * v * r[0],
                -(v * r[0] + u * v * r[1]),
                -(u * r[0] + u * v * r[2]),
                -(r[0] + u * r[1] + v * r[2] + u * v * r[3]),
            ];
            // du/dz · dv/dw = 1/(z² w²)
            Ok(-mixed_log_derivative(q)? * (u * u * v * v) / PI)
        }
        2 => {
            if !(in_disk(z) && in_exterior(w)) {
                return wrong("z in the disk and w outside it");
            }
            let df = pair.f.eval_derivs(z);
            let dg = pair.g.eval_derivs(w);
            let q = df[0] - dg[0];
            Ok(df[1] * dg[1] / (q * q) / PI)
        }
        3 => {
            if !(in_exterior(z) && in_disk(w)) {
                return wrong("z outside the disk and w in it");
            }
            let dg = pair.g.eval_derivs(z);
            let df = pair.f.eval_derivs(w);
            let q = dg[0] - df[0];
            Ok(dg[1] * df[1] / (q * q) / PI)
        }
        _ => Err(Error::InvalidInput(format!("kernel index {which} not in 1..=4"))),
    }
}

/// Reproducing kernel of `A²(𝔻)`, `1/(π(1 − z w̄)²)`.
pub fn bergman_kernel(z: Complex64, w: Complex64) -> Complex64 {
    let q = Complex64::new(1.0, 0.0) - z * w.conj();
    (q * q).inv() / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ComplexSeries;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_pair_kernels() {
        let p = WeldingPair::identity();
        let (z, w) = (c(0.3, 0.1), c(-0.2, 0.5));
        assert_eq!(kernel(&p, 1, z, w).unwrap(), c(0.0, 0.0));
        assert_eq!(kernel(&p, 4, c(1.5, 0.0), c(0.0, -2.0)).unwrap(), c(0.0, 0.0));
        let wo = c(1.2, -0.7);
        let d = z - wo;
        assert_abs_diff_eq!((kernel(&p, 2, z, wo).unwrap() - (d * d).inv() / PI).norm(), 0.0, epsilon = 1e-15);
        assert!(kernel(&p, 2, wo, z).is_err());
        assert!(kernel(&p, 5, z, w).is_err());
    }

    #[test]
    fn quadratic_diagonal_value() {
        for t in [0.1, 0.2] {
            let mut p = WeldingPair::identity();
            p.f = ComplexSeries::taylor(vec![c(0.0, 0.0), c(1.0, 0.0), c(t, 0.0)]).unwrap();
            let k = kernel(&p, 1, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
            // ∂z∂w log(1 + t(z+w)) at 0 is −t², so K₁(0,0) = t²/π.
            assert_abs_diff_eq!((k - c(t * t / PI, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    fn sample_pair() -> WeldingPair {
        let mut p = WeldingPair::identity();
        p.f = ComplexSeries::taylor(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.1), c(-0.05, 0.02)]).unwrap();
        p.g = ComplexSeries::laurent(vec![c(1.2, 0.0), c(0.1, 0.0), c(0.15, -0.05), c(0.03, 0.0)]).unwrap();
        p
    }

    #[test]
    fn diagonal_equals_schwarzian_limit() {
        let p = sample_pair();
        for z in [c(0.2, 0.1), c(-0.4, 0.3)] {
            let k = kernel(&p, 1, z, z).unwrap();
            let s = crate::maps::schwarzian(&p.f, z).unwrap();
            assert_abs_diff_eq!((k + s / (6.0 * PI)).norm(), 0.0, epsilon = 1e-14);
        }
        for z in [c(1.5, 0.2), c(-0.3, -2.0)] {
            let k = kernel(&p, 4, z, z).unwrap();
            let s = crate::maps::schwarzian(&p.g, z).unwrap();
            assert_abs_diff_eq!((k + s / (6.0 * PI)).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn off_diagonal_matches_defining_formula() {
        let p = sample_pair();
        let direct = |h: &ComplexSeries, z: Complex64, w: Complex64| {
            let (a, b) = (h.eval_derivs(z), h.eval_derivs(w));
            let (d, q) = (z - w, a[0] - b[0]);
            (1.0 / (d * d) - a[1] * b[1] / (q * q)) / PI
        };
        let (z, w) = (c(0.3, -0.2), c(-0.5, 0.4));
        assert_abs_diff_eq!((kernel(&p, 1, z, w).unwrap() - direct(&p.f, z, w)).norm(), 0.0, epsilon = 1e-13);
        let (z, w) = (c(1.3, -0.2), c(-0.5, 1.9));
        assert_abs_diff_eq!((kernel(&p, 4, z, w).unwrap() - direct(&p.g, z, w)).norm(), 0.0, epsilon = 1e-13);
        // continuity across the diagonal
        let z = c(0.2, 0.1);
        let near = kernel(&p, 1, z, z + c(1e-6, 0.0)).unwrap();
        assert!((near - kernel(&p, 1, z, z).unwrap()).norm() < 1e-7);
    }
}
