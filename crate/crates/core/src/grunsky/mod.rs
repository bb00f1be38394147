//! Grunsky operators of a welding pair and their Fredholm determinants.
//!
//! Sign convention: `S₂^univ = log det(I − B1 B1*) ≤ 0`, and the nonnegative
//! deformation-space quantity is reported as `S₂^dg = −S₂^univ`.

pub mod build;
pub mod iterated;
pub mod kernel;
pub mod logdet;

pub use build::{
    b1_from_series, b4_from_series, build_b1, build_b2_b3, build_b4, grunsky_identity_residual, grunsky_identity_residual_with, matrix_to_csv, GrunskyResidual,
    separation_radii, torus_b2, CMatrix, GrunskyTruncation, MixedBlocks, Provenance,
};
pub use iterated::{iterated_kernel_diag, o1_diag, spectral_norm, vz_norm_sq, Basis, O1Diagonal};
pub use kernel::{bergman_kernel, kernel};
pub use logdet::{log_det_complement, logdet_potential, ConvergenceReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{invert_pair, WeldingPair};

/// Which Grunsky block carries a determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    B1,
    B4,
}

impl Route {
    pub fn build(self, pair: &WeldingPair, n: usize) -> Result<CMatrix> {
        match self {
            Route::B1 => build_b1(pair, n),
            Route::B4 => build_b4(pair, n),
        }
    }

    /// Largest order the pair's series support.
    pub fn max_order(self, pair: &WeldingPair) -> usize {
        match self {
            Route::B1 => pair.f.order().saturating_sub(2) / 2,
            Route::B4 => pair.g.order().saturating_sub(1) / 2,
        }
    }
}

/// `S₂^univ` through `B1` at order `n`.
pub fn s2_via_b1(pair: &WeldingPair, n: usize) -> Result<f64> {
    log_det_complement(&build_b1(pair, n)?)
}

/// `S₂^univ` through `B4` at order `n`.
pub fn s2_via_b4(pair: &WeldingPair, n: usize) -> Result<f64> {
    log_det_complement(&build_b4(pair, n)?)
}

/// `S₂^univ` over the leading blocks of one matrix built at the largest order.
pub fn s2_report(pair: &WeldingPair, route: Route, orders: &[usize]) -> Result<ConvergenceReport> {
    let top = orders.iter().copied().max().ok_or_else(|| Error::InvalidInput("no orders requested".into()))?;
    logdet_potential(&route.build(pair, top)?, orders)
}

/// Truncation orders for adaptive determinant evaluation: start at `start`
/// and double until the geometric error estimate is below `tol` or the next
/// order would exceed `max` (or the pair's series).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderSchedule {
    pub start: usize,
    pub max: usize,
    pub tol: f64,
}

impl Default for OrderSchedule {
    fn default() -> Self {
        Self { start: 64, max: 2048, tol: 1e-8 }
    }
}

impl OrderSchedule {
    /// A single order.
    pub fn fixed(n: usize) -> Self {
        Self { start: n, max: n, tol: f64::INFINITY }
    }
}

/// `S₂^univ` by doubling the order per `schedule`.
pub fn s2_adaptive(pair: &WeldingPair, route: Route, schedule: &OrderSchedule) -> Result<ConvergenceReport> {
    if schedule.start == 0 || schedule.max < schedule.start || !(schedule.tol > 0.0) {
        return Err(Error::InvalidInput(format!("bad order schedule {schedule:?}")));
    }
    let cap = schedule.max.min(route.max_order(pair));
    let mut orders = Vec::new();
    let mut estimates = Vec::new();
    let mut n = schedule.start;
    loop {
        orders.push(n);
        estimates.push(log_det_complement(&route.build(pair, n)?)?);
        let report = ConvergenceReport::new(orders.clone(), estimates.clone())?;
        if (orders.len() > 1 && report.error_estimate() <= schedule.tol) || 2 * n > cap {
            return Ok(report);
        }
        n *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionCheck {
    pub via_b1: ConvergenceReport,
    pub inverted_via_b1: ConvergenceReport,
    pub via_b4: ConvergenceReport,
}

impl InversionCheck {
    pub fn s2_via_b1(&self) -> f64 {
        self.via_b1.extrapolated
    }

    pub fn s2_inverted_via_b1(&self) -> f64 {
        self.inverted_via_b1.extrapolated
    }

    pub fn s2_via_b4(&self) -> f64 {
        self.via_b4.extrapolated
    }

    /// `|S₂(pair) − S₂(inverted pair)|`, both through `B1`.
    pub fn inversion_gap(&self) -> f64 {
        (self.s2_via_b1() - self.s2_inverted_via_b1()).abs()
    }

    /// `|S₂ via B1 − S₂ via B4|` of the original pair.
    pub fn route_gap(&self) -> f64 {
        (self.s2_via_b1() - self.s2_via_b4()).abs()
    }
}

/// `S₂^univ` of a pair and of its image under `w ↦ 1/w̄`, both through `B1`,
/// together with the `B4` value of the original pair.
pub fn inversion_check(pair: &WeldingPair, schedule: &OrderSchedule) -> Result<InversionCheck> {
    let inverted = invert_pair(pair)?;
    Ok(InversionCheck {
        via_b1: s2_adaptive(pair, Route::B1, schedule)?,
        inverted_via_b1: s2_adaptive(&inverted, Route::B1, schedule)?,
        via_b4: s2_adaptive(pair, Route::B4, schedule)?,
    })
}
