use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use weldlab_core::series::{bivariate_log, exp_trunc, log_trunc, mul_trunc, mul_trunc_fft};
use weldlab_core::{ComplexSeries, SeriesKind};

fn coeffs(max: f64, len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-max..max, -max..max), len).prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn with_unit_head(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v[0] = Complex64::new(1.0, 0.0);
    v
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn reciprocal_inverts(v in coeffs(0.3, 24)) {
        let a = ComplexSeries::taylor(with_unit_head(v)).unwrap();
        let one = a.multiply(&a.reciprocal().unwrap()).unwrap();
        prop_assert!((one.coeff(0) - 1.0).norm() <= 1e-12);
        for k in 1..one.order() {
            prop_assert!(one.coeff(k).norm() <= 1e-10);
        }
    }

    #[test]
    fn exp_undoes_log(v in coeffs(0.3, 24)) {
        let a = with_unit_head(v);
        let back = exp_trunc(&log_trunc(&a, 24), 24);
        prop_assert!(max_diff(&back, &a) <= 1e-10);
    }

    #[test]
    fn fft_product_agrees_with_schoolbook(a in coeffs(1.0, 40), b in coeffs(1.0, 33), n in 1usize..80) {
        prop_assert!(max_diff(&mul_trunc(&a, &b, n), &mul_trunc_fft(&a, &b, n)) <= 1e-12);
    }

    #[test]
    fn log_of_separable_product_splits(a in coeffs(0.3, 7), b in coeffs(0.3, 9)) {
        // P(x, y) = A(x) B(y) gives log P = log A(x) + log B(y).
        let (a, b) = (with_unit_head(a), with_unit_head(b));
        let p = DMatrix::from_fn(7, 9, |i, j| a[i] * b[j]);
        let l = bivariate_log(&p).unwrap();
        let (la, lb) = (log_trunc(&a, 7), log_trunc(&b, 9));
        for i in 0..7 {
            for j in 0..9 {
                let expect = if j == 0 { la[i] } else if i == 0 { lb[j] } else { Complex64::new(0.0, 0.0) };
                prop_assert!((l[(i, j)] - expect).norm() <= 1e-11);
            }
        }
    }

    #[test]
    fn long_rows_take_the_same_values(a in coeffs(0.3, 3), b in coeffs(0.3, 300)) {
        let (a, b) = (with_unit_head(a), with_unit_head(b));
        let p = DMatrix::from_fn(3, 300, |i, j| a[i] * b[j]);
        let l = bivariate_log(&p).unwrap();
        let lb = log_trunc(&b, 300);
        let scale = lb.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for j in 1..300 {
            prop_assert!((l[(0, j)] - lb[j]).norm() <= 1e-11 * scale);
            prop_assert!(l[(1, j)].norm() <= 1e-11 * scale);
        }
    }

    #[test]
    fn sampling_round_trip(v in coeffs(1.0, 16), r in 0.5..2.0f64) {
        let decayed: Vec<Complex64> = v.iter().enumerate().map(|(k, c)| c * 0.5f64.powi(k as i32)).collect();
        for kind in [SeriesKind::TaylorAtZero, SeriesKind::LaurentAtInfinity] {
            let s = ComplexSeries::new(kind, decayed.clone()).unwrap();
            let back = ComplexSeries::coeffs_from_samples(kind, &s.samples_from_coeffs(r, 64), r).unwrap();
            for k in 0..16 {
                prop_assert!((back.coeff(k) - s.coeff(k)).norm() <= 1e-10 * r.max(1.0 / r).powi(16));
            }
        }
    }
}

#[test]
fn composition_with_identity_is_neutral() {
    let f = ComplexSeries::taylor(vec![0.0, 1.0, 0.2, -0.1].into_iter().map(|x| Complex64::new(x, 0.0)).collect()).unwrap();
    let id = ComplexSeries::identity(SeriesKind::TaylorAtZero, 4);
    let c = ComplexSeries::compose(&f, &id).unwrap();
    assert!(max_diff(c.coeffs(), f.coeffs()) <= 1e-15);
    let c = ComplexSeries::compose(&id, &f).unwrap();
    assert!(max_diff(c.coeffs(), f.coeffs()) <= 1e-15);
}

#[test]
fn kinds_do_not_mix() {
    let t = ComplexSeries::identity(SeriesKind::TaylorAtZero, 4);
    let l = ComplexSeries::identity(SeriesKind::LaurentAtInfinity, 4);
    assert!(t.multiply(&l).is_err());
    assert!(ComplexSeries::compose(&l, &t).is_err());
}
