//! Normalized welding pairs: `f` on the disk, `g` on its exterior, one shared curve.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::StarDomain;
use super::theodorsen::{theodorsen_interior, TheodorsenMap, TheodorsenOptions};
use crate::error::{Error, Result};
use crate::series::{inv_trunc, ComplexSeries, SeriesKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Samples per curve in the boundary-trace comparison.
pub const BOUNDARY_SAMPLES: usize = 1024;

/// Order given to closed-form series so that every builder sees enough terms.
pub const CLOSED_FORM_ORDER: usize = 1025;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Identity,
    Ellipse { c: f64 },
    FourierBump { eps: f64, k: u32 },
    /// Anything not produced by the catalog (imported or hand-built).
    Custom,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Ellipse { .. } => "ellipse",
            Family::FourierBump { .. } => "fourier_bump",
            Family::Custom => "custom",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Family::Identity | Family::Custom => vec![],
            Family::Ellipse { c } => vec![c],
            Family::FourierBump { eps, k } => vec![eps, k as f64],
        }
    }

    pub fn domain(&self) -> Result<StarDomain> {
        match *self {
            Family::Identity => Ok(StarDomain::circle()),
            Family::Ellipse { c } => StarDomain::ellipse(c),
            Family::FourierBump { eps, k } => StarDomain::fourier_bump(eps, k),
            Family::Custom => Err(Error::InvalidInput("custom pairs have no catalog domain".into())),
        }
    }
}

/// Diagnostics recorded while a pair is built.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PairResiduals {
    /// Hausdorff-type distance between the sampled images of the unit circle under `f` and `g`.
    pub boundary: f64,
    /// Final Theodorsen sweep change for the interior map (0 for closed forms).
    pub theodorsen_interior: f64,
    /// Same for the inverted-domain map, when one was used.
    pub theodorsen_exterior: f64,
    pub negative_frequency: f64,
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldingPair {
    pub f: ComplexSeries,
    pub g: ComplexSeries,
    pub g_prime_at_infinity: Complex64,
    pub family: Family,
    /// Whether this is the image of a catalog pair under inversion.
    pub inverted: bool,
    /// Boundary sample count used to build the maps (0 for closed forms).
    pub m: usize,
    pub residuals: PairResiduals,
}

impl WeldingPair {
    pub fn identity() -> Self {
        let f = ComplexSeries::identity(SeriesKind::TaylorAtZero, CLOSED_FORM_ORDER);
        let g = ComplexSeries::identity(SeriesKind::LaurentAtInfinity, CLOSED_FORM_ORDER);
        Self {
            f,
            g,
            g_prime_at_infinity: ONE,
            family: Family::Identity,
            inverted: false,
            m: 0,
            residuals: PairResiduals::default(),
        }
    }

    pub fn eval_f(&self, z: Complex64) -> Complex64 {
        self.f.eval(z)
    }

    pub fn eval_g(&self, z: Complex64) -> Complex64 {
        self.g.eval(z)
    }

    /// Hausdorff-type distance between `f(S¹)` and `g(S¹)` from `m` samples each.
    ///
    /// Each sample of one curve is compared with the other curve by a local
    /// minimization over its parameter, not only with the other samples.
    pub fn boundary_distance(&self, m: usize) -> f64 {
        let eval_f = |t: f64| self.f.eval(Complex64::from_polar(1.0, t));
        let eval_g = |t: f64| self.g.eval(Complex64::from_polar(1.0, t));
        one_sided(&eval_f, &eval_g, m).max(one_sided(&eval_g, &eval_f, m))
    }

    /// Smallest pairwise distance between images of `m` points on `|z| = r`
    /// (under `f` for `r < 1`, under `g` for `r > 1`).
    pub fn min_separation_on_circle(&self, r: f64, m: usize) -> f64 {
        let pts: Vec<Complex64> = (0..m)
            .map(|j| {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
                if r < 1.0 { self.f.eval(z) } else { self.g.eval(z) }
            })
            .collect();
        let mut best = f64::INFINITY;
        for i in 0..m {
            for j in i + 1..m {
                best = best.min((pts[i] - pts[j]).norm());
            }
        }
        best
    }

    pub fn to_document(&self) -> PairDocument {
        PairDocument {
            family_tag: self.family.tag().to_string(),
            family: self.family,
            params: self.family.params(),
            inverted: self.inverted,
            taylor_coeffs: self.f.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            laurent_coeffs: self.g.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            g_prime_at_infinity: [self.g_prime_at_infinity.re, self.g_prime_at_infinity.im],
            m: self.m,
            residuals: self.residuals,
        }
    }

    pub fn from_document(doc: &PairDocument) -> Result<Self> {
        let to_c = |v: &[[f64; 2]]| v.iter().map(|p| Complex64::new(p[0], p[1])).collect::<Vec<_>>();
        let f = ComplexSeries::taylor(to_c(&doc.taylor_coeffs))?;
        let g = ComplexSeries::laurent(to_c(&doc.laurent_coeffs))?;
        if f.order() < 2 || f.coeff(0) != ZERO || f.coeff(1) != ONE {
            return Err(Error::InvalidInput("interior series is not normalized".into()));
        }
        let a = Complex64::new(doc.g_prime_at_infinity[0], doc.g_prime_at_infinity[1]);
        if a != g.coeff(0) || a == ZERO {
            return Err(Error::InvalidInput("g'(∞) disagrees with the Laurent data".into()));
        }
        Ok(Self {
            f,
            g,
            g_prime_at_infinity: a,
            family: doc.family,
            inverted: doc.inverted,
            m: doc.m,
            residuals: doc.residuals,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("pair document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PairDocument =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("pair JSON: {e}")))?;
        Self::from_document(&doc)
    }
}

/// Serialized form of a pair. Floats are written in shortest round-trip form,
/// so coefficient arrays reload bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDocument {
    pub family_tag: String,
    pub family: Family,
    pub params: Vec<f64>,
    pub inverted: bool,
    pub taylor_coeffs: Vec<[f64; 2]>,
    pub laurent_coeffs: Vec<[f64; 2]>,
    pub g_prime_at_infinity: [f64; 2],
    #[serde(rename = "M")]
    pub m: usize,
    pub residuals: PairResiduals,
}

fn one_sided(from: &dyn Fn(f64) -> Complex64, to: &dyn Fn(f64) -> Complex64, m: usize) -> f64 {
    let h = 2.0 * PI / m as f64;
    let targets: Vec<Complex64> = (0..m).map(|j| to(j as f64 * h)).collect();
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let p = from(j as f64 * h);
        let (mut best_t, mut best_d) = (0.0, f64::INFINITY);
        for (i, q) in targets.iter().enumerate() {
            let d = (q - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best_t = i as f64 * h;
            }
        }
        // golden-section refinement on the bracketing parameter interval
        let dist = |t: f64| (to(t) - p).norm_sqr();
        let (mut a, mut b) = (best_t - h, best_t + h);
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - gr * (b - a);
        let mut d = a + gr * (b - a);
        let (mut fc, mut fd) = (dist(c), dist(d));
        for _ in 0..60 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = dist(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = dist(d);
            }
        }
        worst = worst.max(best_d.min(fc).min(fd).sqrt());
    }
    worst
}

/// Affine normalization `λ(w) = (w − f(0))/f'(0)` applied to both maps.
pub fn normalize_pair(raw_f: &ComplexSeries, raw_g: &ComplexSeries) -> Result<(ComplexSeries, ComplexSeries, Complex64)> {
    if raw_f.kind() != SeriesKind::TaylorAtZero || raw_g.kind() != SeriesKind::LaurentAtInfinity {
        return Err(Error::KindMismatch("normalize_pair expects (Taylor, Laurent)".into()));
    }
    let f0 = raw_f.coeff(0);
    let f1 = raw_f.coeff(1);
    if f1 == ZERO {
        return Err(Error::Singular("f'(0) = 0, the map is not univalent".into()));
    }
    if raw_g.coeff(0) == ZERO {
        return Err(Error::InvalidInput("g must have a simple pole at infinity".into()));
    }
    let s = f1.inv();
    let mut fc: Vec<Complex64> = raw_f.coeffs().iter().map(|c| c * s).collect();
    fc.resize(fc.len().max(2), ZERO);
    fc[0] = ZERO;
    fc[1] = ONE;
    let mut gc: Vec<Complex64> = raw_g.coeffs().to_vec();
    gc.resize(gc.len().max(2), ZERO);
    gc[1] -= f0;
    let gc: Vec<Complex64> = gc.iter().map(|c| c * s).collect();
    let a = gc[0];
    Ok((ComplexSeries::taylor(fc)?, ComplexSeries::laurent(gc)?, a))
}

/// The involution `h ↦ 1/conj(h(1/z̄))`, exchanging interior maps fixing 0
/// and exterior maps fixing ∞.
///
/// Computed on coefficients: for `h(z) = Σ_{k≥1} c_k z^k` one has
/// `1/conj(h(1/z̄)) = z / B(1/z)` with `B(u) = Σ conj(c_{k+1}) u^k`, so the
/// Laurent coefficients are the Taylor coefficients of `1/B`; the reverse
/// direction is the same computation read backwards.
pub fn invert_map(h: &ComplexSeries) -> Result<ComplexSeries> {
    let n = h.order();
    match h.kind() {
        SeriesKind::TaylorAtZero => {
            let scale = h.max_abs();
            if h.coeff(0).norm() > 1e-12 * scale {
                return Err(Error::Geometry(format!(
                    "map does not fix 0 (h(0) = {}), so 1/conj(h(1/z̄)) has no pole at ∞",
                    h.coeff(0)
                )));
            }
            if h.coeff(1).norm() <= 1e-14 * scale || n < 2 {
                return Err(Error::Geometry("h'(0) vanishes; inversion is unbounded near ∞".into()));
            }
            check_no_zero_on_circle(h)?;
            let b: Vec<Complex64> = h.coeffs()[1..].iter().map(|c| c.conj()).collect();
            ComplexSeries::laurent(inv_trunc(&b, n - 1))
        }
        SeriesKind::LaurentAtInfinity => {
            if h.coeff(0) == ZERO {
                return Err(Error::Geometry("exterior map has no pole at ∞".into()));
            }
            check_no_zero_on_circle(h)?;
            let r: Vec<Complex64> = h.coeffs().iter().map(|c| c.conj()).collect();
            let mut out = vec![ZERO; n + 1];
            out[1..].copy_from_slice(&inv_trunc(&r, n));
            ComplexSeries::taylor(out)
        }
    }
}

/// Exterior map of a curve from the interior map of its inverted domain.
pub fn exterior_via_inversion(f_inv: &ComplexSeries) -> Result<ComplexSeries> {
    if f_inv.kind() != SeriesKind::TaylorAtZero {
        return Err(Error::KindMismatch("exterior_via_inversion expects a Taylor series".into()));
    }
    invert_map(f_inv)
}

fn check_no_zero_on_circle(h: &ComplexSeries) -> Result<()> {
    let m = 256;
    let scale = h.max_abs();
    let smallest = (0..m)
        .map(|j| h.eval(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)).norm())
        .fold(f64::INFINITY, f64::min);
    if smallest < 1e-10 * scale {
        return Err(Error::Geometry(format!(
            "boundary image passes through 0 (min |h| = {smallest:.3e}); the inversion is unbounded"
        )));
    }
    Ok(())
}

/// The pair attached to the image of the curve under `w ↦ 1/w̄`.
pub fn invert_pair(pair: &WeldingPair) -> Result<WeldingPair> {
    let raw_f = invert_map(&pair.g)?;
    let raw_g = invert_map(&pair.f)?;
    let (f, g, a) = normalize_pair(&raw_f, &raw_g)?;
    let mut out = WeldingPair {
        f,
        g,
        g_prime_at_infinity: a,
        family: pair.family,
        inverted: !pair.inverted,
        m: pair.m,
        residuals: pair.residuals,
    };
    out.residuals.boundary = out.boundary_distance(BOUNDARY_SAMPLES);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogOptions {
    /// Initial boundary sample count.
    pub m: usize,
    /// Double `m` until the mapped coefficients are resolved, up to `max_m`.
    pub refine: bool,
    pub max_m: usize,
    pub theodorsen: TheodorsenOptions,
    /// Reject the pair if the boundary traces differ by more than this.
    pub boundary_tol: Option<f64>,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        Self {
            m: 1024,
            refine: true,
            max_m: 65536,
            theodorsen: TheodorsenOptions::default(),
            boundary_tol: Some(1e-8),
        }
    }
}

impl CatalogOptions {
    /// Fixed sample count, no refinement, no boundary gate.
    pub fn fixed(m: usize) -> Self {
        Self { m, refine: false, max_m: m, boundary_tol: None, ..Self::default() }
    }
}

/// Thresholds on the sampled boundary spectrum below which `m` is taken as resolving the map.
const RESOLVED_TAIL: f64 = 1e-15;
const RESOLVED_NEGATIVE: f64 = 1e-12;

fn map_domain(domain: &StarDomain, opts: &CatalogOptions) -> Result<TheodorsenMap> {
    let mut m = opts.m;
    loop {
        let t = theodorsen_interior(domain, m, &opts.theodorsen)?;
        let resolved = t.tail <= RESOLVED_TAIL && t.negative_frequency <= RESOLVED_NEGATIVE;
        if !opts.refine || resolved || m >= opts.max_m {
            return Ok(t);
        }
        m *= 2;
    }
}

/// Build the normalized pair of a cataloged family.
pub fn catalog(family: Family, opts: &CatalogOptions) -> Result<WeldingPair> {
    let mut pair = match family {
        Family::Identity => return Ok(WeldingPair::identity()),
        Family::Custom => {
            return Err(Error::InvalidInput("the catalog has no custom family".into()));
        }
        Family::Ellipse { c } => {
            let domain = StarDomain::ellipse(c)?;
            let t = map_domain(&domain, opts)?;
            // z + c/z maps the exterior disk onto the exterior of the ellipse.
            let mut gc = vec![ZERO; CLOSED_FORM_ORDER.max(t.f.order() + 1)];
            gc[0] = ONE;
            gc[2] = Complex64::new(c, 0.0);
            let raw_g = ComplexSeries::laurent(gc)?;
            let (f, g, a) = normalize_pair(&t.f, &raw_g)?;
            WeldingPair {
                f,
                g,
                g_prime_at_infinity: a,
                family,
                inverted: false,
                m: t.phi.len(),
                residuals: PairResiduals {
                    boundary: 0.0,
                    theodorsen_interior: t.residual,
                    theodorsen_exterior: 0.0,
                    negative_frequency: t.negative_frequency,
                    tail: t.tail,
                },
            }
        }
        Family::FourierBump { eps, k } => {
            let domain = StarDomain::fourier_bump(eps, k)?;
            let inner = map_domain(&domain, opts)?;
            let outer = map_domain(&domain.inverted(), opts)?;
            let raw_g = exterior_via_inversion(&outer.f)?;
            let (f, g, a) = normalize_pair(&inner.f, &raw_g)?;
            WeldingPair {
                f,
                g,
                g_prime_at_infinity: a,
                family,
                inverted: false,
                m: inner.phi.len().max(outer.phi.len()),
                residuals: PairResiduals {
                    boundary: 0.0,
                    theodorsen_interior: inner.residual,
                    theodorsen_exterior: outer.residual,
                    negative_frequency: inner.negative_frequency.max(outer.negative_frequency),
                    tail: inner.tail.max(outer.tail),
                },
            }
        }
    };
    pair.residuals.boundary = pair.boundary_distance(BOUNDARY_SAMPLES);
    if let Some(tol) = opts.boundary_tol {
        if !(pair.residuals.boundary <= tol) {
            return Err(Error::Geometry(format!(
                "boundary traces of f and g differ by {:.3e} > {tol:e}",
                pair.residuals.boundary
            )));
        }
    }
    Ok(pair)
}
