//! Thin wrappers over `rustfft` with the conventions used throughout the crate:
//! `forward` computes X_k = Σ_j x_j e^{-2πijk/M}, `inverse` the unnormalized
//! conjugate transform.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    // Plans are cached per thread; iterative callers transform the same length repeatedly.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn forward(data: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(data.len()));
    plan.process(data);
}

pub fn inverse(data: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(data.len()));
    plan.process(data);
}

/// Signed frequency of bin `k` for a transform of length `m`.
pub fn frequency(k: usize, m: usize) -> i64 {
    if k <= m / 2 {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

/// Discrete harmonic conjugation on uniform samples of a real periodic
/// function: Fourier mode k is multiplied by -i·sign(k); the mean and the
/// Nyquist mode are dropped.
pub fn conjugate(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf);
    for (k, x) in buf.iter_mut().enumerate() {
        let freq = frequency(k, m);
        *x = if freq == 0 || (m.is_multiple_of(2) && k == m / 2) {
            Complex64::new(0.0, 0.0)
        } else if freq > 0 {
            Complex64::new(x.im, -x.re)
        } else {
            Complex64::new(-x.im, x.re)
        };
    }
    inverse(&mut buf);
    buf.iter().map(|x| x.re / m as f64).collect()
}
