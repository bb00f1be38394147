//! The genus-two octagon group at the Fuchsian basepoint.
//!
//! Generators act on `𝔻` in SU(1,1) form `[[a, b], [b̄, ā]]`. The fundamental
//! domain is the Dirichlet polygon about `0`, which for this group is the
//! regular hyperbolic octagon with vertex angles `π/4`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grunsky::build::{build_b2_b3, CMatrix};
use crate::grunsky::iterated::Basis;
use crate::maps::{MoebiusTransform, WeldingPair};
use crate::quadrature::gauss_legendre_on;

pub const MAX_WORD_LENGTH: usize = 8;
/// Projective matrix distance below which two elements are identified,
/// relative to the larger entry modulus.
pub const DEDUPE_TOL: f64 = 1e-8;
pub const DOMAIN_SLACK: f64 = 1e-12;
pub const RELATION_TOL: f64 = 1e-10;

/// Signed generator letter: `(k, +1)` is `G_k`, `(k, −1)` its inverse.
pub type Letter = (usize, i8);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FuchsianGroup {
    /// `G_0, …, G_3` followed by their inverses.
    pub generators: Vec<MoebiusTransform>,
    pub genus: u32,
    pub relation_word: Vec<Letter>,
    /// Euclidean radius of the octagon vertices.
    pub vertex_radius: f64,
    /// Euclidean radius of the side midpoints.
    pub side_radius: f64,
    pub translation_length: f64,
}

/// Interior angle of the regular octagon with vertices at Euclidean radius `s`.
fn vertex_angle(s: f64) -> f64 {
    let (c, _) = side_circle(s);
    let p = Complex64::from_polar(s, PI / 8.0);
    let ca = Complex64::new(c, 0.0);
    let cb = Complex64::from_polar(c, PI / 4.0);
    let (u, v) = (p - ca, p - cb);
    PI - (u.conj() * v).arg().abs()
}

/// Center distance and radius of the geodesic through `s e^{±iπ/8}`.
fn side_circle(s: f64) -> (f64, f64) {
    let c = (s * s + 1.0) / (2.0 * s * (PI / 8.0).cos());
    (c, (c * c - 1.0).sqrt())
}

fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> bool) -> f64 {
    // `f(lo)` is true and `f(hi)` false.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn word_product(gens: &[MoebiusTransform], word: &[Letter]) -> MoebiusTransform {
    word.iter().fold(MoebiusTransform::identity(), |acc, &(k, e)| {
        acc * if e > 0 { gens[k] } else { gens[k + 4] }
    })
}

/// Finds a relation in which each generator appears once with each sign,
/// starting with `G_0`; the first hit in lexicographic order is returned.
fn find_relation(gens: &[MoebiusTransform]) -> Option<Vec<Letter>> {
    let letters: Vec<Letter> = (0..4).flat_map(|k| [(k, 1i8), (k, -1i8)]).collect();
    let mut word = vec![(0usize, 1i8)];
    let mut used = [false; 8];
    used[0] = true;
    fn rec(
        gens: &[MoebiusTransform],
        letters: &[Letter],
        word: &mut Vec<Letter>,
        used: &mut [bool; 8],
    ) -> bool {
        if word.len() == letters.len() {
            return word_product(gens, word).distance_projective(&MoebiusTransform::identity()) <= RELATION_TOL;
        }
        for i in 0..letters.len() {
            if used[i] {
                continue;
            }
            let last = *word.last().unwrap();
            if last.0 == letters[i].0 {
                continue;
            }
            used[i] = true;
            word.push(letters[i]);
            if rec(gens, letters, word, used) {
                return true;
            }
            word.pop();
            used[i] = false;
        }
        false
    }
    rec(gens, &letters, &mut word, &mut used).then_some(word)
}

/// The regular-octagon group with opposite sides paired.
///
/// The vertex radius is found by bisection on the angle condition (eight
/// angles of `π/4` summing to `2π`); the translation length then follows from
/// the side midpoint. Panics if no relation word closes to `±I`, which would
/// mean the geometry is wrong.
pub fn octagon_group() -> FuchsianGroup {
    // The angle decreases from 3π/4 (Euclidean limit) to 0 as s → 1.
    let vertex_radius = bisect(1e-6, 1.0 - 1e-15, |s| vertex_angle(s) > PI / 4.0);
    let (c, rho) = side_circle(vertex_radius);
    let side_radius = c - rho;
    let d = 2.0 * side_radius.atanh();
    let translation_length = 2.0 * d;
    let t = MoebiusTransform {
        a: Complex64::new(d.cosh(), 0.0),
        b: Complex64::new(d.sinh(), 0.0),
        c: Complex64::new(d.sinh(), 0.0),
        d: Complex64::new(d.cosh(), 0.0),
    };
    let mut generators: Vec<MoebiusTransform> = (0..4)
        .map(|k| {
            let phi = k as f64 * PI / 4.0;
            MoebiusTransform::rotation(phi) * t * MoebiusTransform::rotation(-phi)
        })
        .collect();
    let inverses: Vec<_> = generators.iter().map(|g| g.inverse()).collect();
    generators.extend(inverses);
    let relation_word = find_relation(&generators).expect("octagon side pairings admit no relation word");
    FuchsianGroup { generators, genus: 2, relation_word, vertex_radius, side_radius, translation_length }
}

impl FuchsianGroup {
    /// Entrywise distance of the relation product from `±I`.
    pub fn relation_residual(&self) -> f64 {
        word_product(&self.generators, &self.relation_word).distance_projective(&MoebiusTransform::identity())
    }

    /// Product of a signed word.
    pub fn word(&self, word: &[Letter]) -> MoebiusTransform {
        word_product(&self.generators, word)
    }

    /// Largest deviation of `|G(e^{iθ})|` from 1 over `samples` boundary points.
    pub fn boundary_residual(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for g in &self.generators {
            for j in 0..samples {
                let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / samples as f64);
                worst = worst.max((g.apply(z).norm() - 1.0).abs());
            }
        }
        worst
    }

    /// Octagon vertices `r e^{i(2j+1)π/8}`.
    pub fn vertices(&self) -> Vec<Complex64> {
        (0..8).map(|j| Complex64::from_polar(self.vertex_radius, (2 * j + 1) as f64 * PI / 8.0)).collect()
    }

    /// Interior angle at each vertex from the side geodesics.
    pub fn vertex_angle(&self) -> f64 {
        vertex_angle(self.vertex_radius)
    }

    /// Analytic distance to the boundary of the octagon along direction `phi`.
    pub fn boundary_radius_closed_form(&self, phi: f64) -> f64 {
        let (c, _) = side_circle(self.vertex_radius);
        let k = (phi / (PI / 4.0)).round();
        let cos = (phi - k * PI / 4.0).cos();
        let x = c * cos;
        x - (x * x - 1.0).sqrt()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupEnumeration {
    pub max_word_length: usize,
    pub elements: Vec<MoebiusTransform>,
    /// Length of the shortest word found for each element.
    pub word_lengths: Vec<usize>,
}

type Key = (i32, [i64; 4]);

fn sign_normalized(m: &MoebiusTransform) -> MoebiusTransform {
    if m.a.re < 0.0 || (m.a.re == 0.0 && m.a.im < 0.0) {
        MoebiusTransform { a: -m.a, b: -m.b, c: -m.c, d: -m.d }
    } else {
        *m
    }
}

/// Bucket keys whose cells may hold a duplicate of `m`. Cells have width
/// proportional to `|a|`, rounded to a power of two.
fn candidate_keys(m: &MoebiusTransform) -> Vec<Key> {
    let near_zero_re = m.a.re.abs() <= 4.0 * DEDUPE_TOL * m.a.norm();
    let signs: &[f64] = if near_zero_re { &[1.0, -1.0] } else { &[1.0] };
    let scale = m.a.norm().max(1.0);
    let exps: Vec<i32> = {
        let l = scale.log2();
        let e = l.floor() as i32;
        let frac = l - e as f64;
        let mut v = vec![e];
        if frac < 1e-6 {
            v.push(e - 1);
        }
        if frac > 1.0 - 1e-6 {
            v.push(e + 1);
        }
        v
    };
    let mut keys = Vec::new();
    for &s in signs {
        let n = sign_normalized(&MoebiusTransform { a: m.a * s, b: m.b * s, c: m.c * s, d: m.d * s });
        let vals = [n.a.re, n.a.im, n.b.re, n.b.im];
        for &e in &exps {
            let width = 1e-5 * 2f64.powi(e);
            let mut opts: Vec<[i64; 4]> = vec![[0; 4]];
            for (i, v) in vals.iter().enumerate() {
                let x = v / width;
                let r = x.round();
                let mut choices = vec![r as i64];
                if (x - r).abs() > 0.5 - 1e-2 {
                    choices.push(if x > r { r as i64 + 1 } else { r as i64 - 1 });
                }
                opts = opts
                    .into_iter()
                    .flat_map(|o| {
                        choices.iter().map(move |&c| {
                            let mut o = o;
                            o[i] = c;
                            o
                        })
                    })
                    .collect();
            }
            keys.extend(opts.into_iter().map(|o| (e, o)));
        }
    }
    keys
}

fn primary_key(m: &MoebiusTransform) -> Key {
    let n = sign_normalized(m);
    let e = n.a.norm().max(1.0).log2().floor() as i32;
    let width = 1e-5 * 2f64.powi(e);
    (e, [n.a.re, n.a.im, n.b.re, n.b.im].map(|v| (v / width).round() as i64))
}

fn same_element(p: &MoebiusTransform, q: &MoebiusTransform) -> bool {
    p.distance_projective(q) <= DEDUPE_TOL * p.max_entry().max(q.max_entry()).max(1.0)
}

/// All distinct elements given by words of length at most `max_len`,
/// breadth first.
pub fn enumerate(group: &FuchsianGroup, max_len: usize) -> Result<GroupEnumeration> {
    if max_len > MAX_WORD_LENGTH {
        return Err(Error::InvalidInput(format!("word length {max_len} exceeds {MAX_WORD_LENGTH}")));
    }
    let mut elements = vec![MoebiusTransform::identity()];
    let mut word_lengths = vec![0];
    let mut buckets: HashMap<Key, Vec<usize>> = HashMap::new();
    buckets.entry(primary_key(&elements[0])).or_default().push(0);
    let mut frontier = vec![0usize];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for &i in &frontier {
            for g in &group.generators {
                let m = elements[i] * *g;
                let dup = candidate_keys(&m)
                    .iter()
                    .filter_map(|k| buckets.get(k))
                    .flatten()
                    .any(|&j| same_element(&elements[j], &m));
                if dup {
                    continue;
                }
                let id = elements.len();
                elements.push(m);
                word_lengths.push(len);
                buckets.entry(primary_key(&m)).or_default().push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(GroupEnumeration { max_word_length: max_len, elements, word_lengths })
}

impl GroupEnumeration {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of `m` in the enumeration, if present.
    pub fn position(&self, m: &MoebiusTransform) -> Option<usize> {
        self.elements.iter().position(|e| same_element(e, m))
    }
}

/// Whether `z` is at least as close to `0` as to every orbit point `γ·0`.
///
/// Compares `|z|²` with `|z − p|²/(1 − |p|²)`, which orders the hyperbolic
/// distances `d(z, 0)` and `d(z, p)`.
pub fn in_dirichlet_domain(enumeration: &GroupEnumeration, z: Complex64) -> bool {
    let r2 = z.norm_sqr();
    enumeration.elements.iter().skip(1).all(|g| {
        let p = g.apply(Complex64::new(0.0, 0.0));
        r2 <= (z - p).norm_sqr() / (1.0 - p.norm_sqr()) + DOMAIN_SLACK
    })
}

/// Largest radius along direction `phi` still inside the Dirichlet domain.
pub fn boundary_radius(enumeration: &GroupEnumeration, phi: f64) -> f64 {
    let dir = Complex64::from_polar(1.0, phi);
    bisect(0.0, 1.0 - 1e-12, |r| in_dirichlet_domain(enumeration, dir * r))
}

/// `1/(π(1 − |z|²)²)`, the Bergman kernel on the diagonal.
pub fn area_density(z: Complex64) -> f64 {
    let s = 1.0 - z.norm_sqr();
    1.0 / (PI * s * s)
}

/// Angular sub-intervals between consecutive vertex directions, so that
/// the boundary radius is smooth on each.
pub const ANGULAR_SUBDIVISIONS: usize = 16;
pub const AREA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AreaReport {
    pub value: f64,
    /// Values at successive angular refinements.
    pub refinements: Vec<f64>,
    pub angular_nodes: usize,
}

fn angular_rule(nodes: usize) -> Vec<(f64, f64)> {
    let step = 2.0 * PI / ANGULAR_SUBDIVISIONS as f64;
    let start = PI / 8.0;
    (0..ANGULAR_SUBDIVISIONS)
        .flat_map(|i| {
            let a = start + i as f64 * step;
            let (x, w) = gauss_legendre_on(nodes, a, a + step);
            x.into_iter().zip(w)
        })
        .collect()
}

/// `∫_F 1/(π(1 − |z|²)²) d²z` over the Dirichlet domain of `L = 2` words.
///
/// The radial integral is closed form, `R²/(2π(1 − R²))`, with the boundary
/// radius found by bisection on domain membership. The angular rule is
/// doubled until two refinements agree within [`AREA_TOL`].
pub fn domain_area_integral(group: &FuchsianGroup) -> Result<AreaReport> {
    let enumeration = enumerate(group, 2)?;
    let mut refinements = Vec::new();
    let mut nodes = 4;
    while nodes <= 64 {
        let value: f64 = angular_rule(nodes)
            .into_iter()
            .map(|(phi, w)| {
                let r2 = boundary_radius(&enumeration, phi).powi(2);
                w * r2 / (2.0 * PI * (1.0 - r2))
            })
            .sum();
        refinements.push(value);
        let n = refinements.len();
        if n >= 2 && (refinements[n - 1] - refinements[n - 2]).abs() <= AREA_TOL {
            return Ok(AreaReport { value, refinements, angular_nodes: nodes });
        }
        nodes *= 2;
    }
    let n = refinements.len();
    Err(Error::NonConvergence {
        what: "octagon area quadrature".into(),
        iterations: n,
        residual: (refinements[n - 1] - refinements[n - 2]).abs(),
    })
}

/// How a kernel transforms under simultaneous Möbius change of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Automorphy {
    /// `K(γz, γw) γ'(z) γ'(w)`, for kernels holomorphic in both variables.
    Bilinear,
    /// `K(γz, γw) γ'(z) conj(γ'(w))`, for kernels antiholomorphic in `w`.
    Sesquilinear,
}

/// Largest `|K(γz, γw)·γ'(z)·γ'(w) − K(z, w)|` over the sample pairs.
pub fn automorphy_residual(
    kernel: impl Fn(Complex64, Complex64) -> Complex64,
    form: Automorphy,
    gamma: &MoebiusTransform,
    samples: &[(Complex64, Complex64)],
) -> f64 {
    samples
        .iter()
        .map(|&(z, w)| {
            let dw = gamma.derivative(w);
            let dw = match form {
                Automorphy::Bilinear => dw,
                Automorphy::Sesquilinear => dw.conj(),
            };
            (kernel(gamma.apply(z), gamma.apply(w)) * gamma.derivative(z) * dw - kernel(z, w)).norm()
        })
        .fold(0.0, f64::max)
}

/// Basis size for the basepoint trace terms; the truncation error on the
/// octagon is of order `N r_v^{2N}` with `r_v² = 1/√2`.
pub const TRACE_BASIS: usize = 120;
const TRACE_RADIAL_NODES: usize = 40;
const TRACE_ANGULAR_NODES: usize = 16;

/// `∫_F (𝒦₂^k)(z, z) d²z` at the basepoint, with `𝒦₂ = K₂K₂*` assembled from
/// the truncated `B2` of the identity pair. Requires `k ≥ 1`.
pub fn basepoint_trace_terms(group: &FuchsianGroup, pair: &WeldingPair, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("trace terms start at k = 1".into()));
    }
    if !is_basepoint(pair) {
        return Err(Error::InvalidInput("trace terms are only defined at the basepoint pair".into()));
    }
    let b2 = build_b2_b3(pair, TRACE_BASIS)?.b2;
    let gram = &b2 * b2.adjoint();
    let mut power = gram.clone();
    for _ in 1..k {
        power = &power * &gram;
    }
    integrate_over_domain(group, |z| quadratic_form(&power, z))
}

fn quadratic_form(m: &CMatrix, z: Complex64) -> f64 {
    let e = Basis::Interior.vector(z, m.nrows());
    let x = CMatrix::from_iterator(e.len(), 1, e.into_iter().map(|v| v.conj()));
    (x.adjoint() * m * x)[(0, 0)].re
}

fn is_basepoint(pair: &WeldingPair) -> bool {
    let id = WeldingPair::identity();
    let close = |a: &[Complex64], b: &[Complex64]| {
        (0..a.len().max(b.len())).all(|i| {
            let x = a.get(i).copied().unwrap_or_default();
            let y = b.get(i).copied().unwrap_or_default();
            (x - y).norm() <= 1e-14
        })
    };
    close(pair.f.coeffs(), id.f.coeffs()) && close(pair.g.coeffs(), id.g.coeffs())
}

fn integrate_over_domain(group: &FuchsianGroup, f: impl Fn(Complex64) -> f64) -> Result<f64> {
    let enumeration = enumerate(group, 2)?;
    let mut total = 0.0;
    for (phi, wa) in angular_rule(TRACE_ANGULAR_NODES) {
        let big_r = boundary_radius(&enumeration, phi);
        let (rs, ws) = gauss_legendre_on(TRACE_RADIAL_NODES, 0.0, big_r);
        let dir = Complex64::from_polar(1.0, phi);
        for (r, wr) in rs.into_iter().zip(ws) {
            total += wa * wr * r * f(dir * r);
        }
    }
    Ok(total)
}

/// `Σ_{k=0}^n (−1)^k C(n,k) T_k`, with `T_0` the area integral and `T_k`
/// the trace terms for `k ≥ 1`. Vanishes at the basepoint for `n ≥ 1`.
pub fn alternating_trace_sum(area: f64, terms: &[f64], n: usize) -> Result<f64> {
    if terms.len() < n {
        return Err(Error::InvalidInput(format!("{n} trace terms needed, {} given", terms.len())));
    }
    let mut binom = 1.0;
    let mut sum = area;
    for k in 1..=n {
        binom = binom * (n + 1 - k) as f64 / k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * terms[k - 1];
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn octagon_geometry_matches_hyperbolic_trigonometry() {
        let g = octagon_group();
        // cosh(circumradius) = cot²(π/8) gives r_v⁴ = 1/2.
        assert_abs_diff_eq!(g.vertex_radius, 0.5f64.powf(0.25), epsilon = 1e-12);
        // cosh(inradius) = cot(π/8) = 1 + √2.
        let inradius = 2.0 * g.side_radius.atanh();
        assert_abs_diff_eq!(inradius.cosh(), 1.0 + 2f64.sqrt(), epsilon = 1e-12);
        for h in &g.generators[..4] {
            assert_abs_diff_eq!(h.trace().re.abs(), 2.0 + 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn relation_is_found_and_closes() {
        let g = octagon_group();
        let expected: Vec<Letter> = vec![(0, 1), (1, -1), (2, 1), (3, -1), (0, -1), (1, 1), (2, -1), (3, 1)];
        assert_eq!(g.relation_word, expected);
        assert!(g.relation_residual() <= 1e-10);
        assert!(g.boundary_residual(64) <= 1e-12);
    }

    #[test]
    fn generator_pairs_opposite_sides() {
        let g = octagon_group();
        for k in 0..4 {
            let phi = k as f64 * PI / 4.0;
            let from = Complex64::from_polar(g.side_radius, phi + PI);
            let to = Complex64::from_polar(g.side_radius, phi);
            assert_abs_diff_eq!((g.generators[k].apply(from) - to).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn small_enumerations() {
        let g = octagon_group();
        assert_eq!(enumerate(&g, 0).unwrap().len(), 1);
        assert_eq!(enumerate(&g, 1).unwrap().len(), 9);
        assert_eq!(enumerate(&g, 2).unwrap().len(), 1 + 8 + 56);
        assert!(enumerate(&g, 9).is_err());
    }

    #[test]
    fn boundary_radius_bisection_matches_closed_form() {
        let g = octagon_group();
        let e = enumerate(&g, 2).unwrap();
        for j in 0..40 {
            let phi = 0.1 + j as f64 * 0.157;
            assert_abs_diff_eq!(boundary_radius(&e, phi), g.boundary_radius_closed_form(phi), epsilon = 1e-11);
        }
    }

    #[test]
    fn binomial_sum_cancels_constant_terms() {
        assert_abs_diff_eq!(alternating_trace_sum(1.0, &[1.0, 1.0, 1.0], 3).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(alternating_trace_sum(3.0, &[1.0, 0.0], 2).unwrap(), 1.0, epsilon = 1e-15);
    }
}
