use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weldlab_core::fuchsian::*;
use weldlab_core::grunsky::bergman_kernel;
use weldlab_core::{MoebiusTransform, WeldingPair};

fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
    let q = (z - w).norm_sqr() / ((1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()));
    (1.0 + 2.0 * q).acosh()
}

fn disk_point(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    let r = r_max * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

#[test]
fn element_counts_respect_word_bound() {
    let g = octagon_group();
    let mut last = 0;
    for l in 0..=5 {
        let n = enumerate(&g, l).unwrap().len();
        let bound: usize = 1 + (1..=l).map(|k| 8 * 7usize.pow(k as u32 - 1)).sum::<usize>();
        assert!(n >= last && n <= bound, "L = {l}: {n} elements, bound {bound}");
        last = n;
    }
}

#[test]
fn enumeration_is_closed_under_inverse_and_deduplicated() {
    let g = octagon_group();
    let e = enumerate(&g, 3).unwrap();
    for m in &e.elements {
        assert!(e.position(&m.inverse()).is_some());
    }
    for i in 0..e.len() {
        for j in 0..i {
            assert!(e.elements[i].distance_projective(&e.elements[j]) >= 1e-8);
        }
    }
}

#[test]
fn products_of_short_words_are_enumerated() {
    let g = octagon_group();
    let e = enumerate(&g, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let short: Vec<usize> = (0..e.len()).filter(|&i| e.word_lengths[i] <= 2).collect();
    for _ in 0..300 {
        let a = short[rng.random_range(0..short.len())];
        let b = short[rng.random_range(0..short.len())];
        assert!(e.position(&(e.elements[a] * e.elements[b])).is_some());
    }
}

#[test]
fn dirichlet_domain_membership() {
    let g = octagon_group();
    let e = enumerate(&g, 2).unwrap();
    assert!(in_dirichlet_domain(&e, Complex64::new(0.0, 0.0)));
    for h in &g.generators {
        assert!(!in_dirichlet_domain(&e, h.apply(Complex64::new(0.0, 0.0))));
    }
    for v in g.vertices() {
        assert!(in_dirichlet_domain(&e, v));
        assert!(!in_dirichlet_domain(&e, v * (1.0 + 1e-6)));
    }
    assert!((g.vertex_angle() - PI / 4.0).abs() <= 1e-12);
}

#[test]
fn translates_of_the_domain_tile_the_disk() {
    let g = octagon_group();
    let domain = enumerate(&g, 2).unwrap();
    let orbit = enumerate(&g, 5).unwrap();
    let circumradius = hyperbolic_distance(Complex64::new(0.0, 0.0), Complex64::new(g.vertex_radius, 0.0));
    let origin = Complex64::new(0.0, 0.0);
    let points: Vec<Complex64> = orbit.elements.iter().map(|m| m.apply(origin)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..10_000 {
        let z = disk_point(&mut rng, g.vertex_radius);
        let mut near: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (hyperbolic_distance(z, p), i))
            .filter(|(d, _)| *d <= circumradius + 1e-9)
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0));
        if near.len() > 1 && near[1].0 - near[0].0 < 1e-9 {
            continue;
        }
        let hits = near
            .iter()
            .filter(|(_, i)| in_dirichlet_domain(&domain, orbit.elements[*i].inverse().apply(z)))
            .count();
        assert_eq!(hits, 1, "z = {z}");
        checked += 1;
    }
    assert!(checked > 9_900);
}

#[test]
fn area_integral_is_stable_under_refinement() {
    let g = octagon_group();
    let r = domain_area_integral(&g).unwrap();
    let n = r.refinements.len();
    assert!((r.refinements[n - 1] - r.refinements[n - 2]).abs() <= 1e-4);
    assert!((r.value - 1.0).abs() <= 1e-4);
    assert!((area_density(Complex64::new(0.0, 0.0)) - 1.0 / PI).abs() <= 1e-15);
}

#[test]
fn trace_terms_need_the_basepoint() {
    let g = octagon_group();
    let id = WeldingPair::identity();
    assert!(basepoint_trace_terms(&g, &id, 0).is_err());
    let mut other = id.clone();
    other.f = weldlab_core::ComplexSeries::taylor(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.1, 0.0),
    ])
    .unwrap()
    .with_order(id.f.order());
    assert!(basepoint_trace_terms(&g, &other, 1).is_err());
}

fn su11(alpha: f64, r: f64, beta: f64) -> MoebiusTransform {
    // Rotation by `alpha`, then the disk automorphism moving 0 to `r e^{iβ}`.
    let p = Complex64::from_polar(r, beta);
    let s = (1.0 - r * r).sqrt();
    let shift = MoebiusTransform {
        a: Complex64::new(1.0 / s, 0.0),
        b: p / s,
        c: p.conj() / s,
        d: Complex64::new(1.0 / s, 0.0),
    };
    shift * MoebiusTransform::rotation(alpha)
}

proptest! {
    #[test]
    fn bergman_kernel_is_invariant(alpha in 0.0..TAU, r in 0.0..0.9f64, beta in 0.0..TAU,
                                   z in (0.0..0.8f64, 0.0..TAU), w in (0.0..0.8f64, 0.0..TAU)) {
        let gamma = su11(alpha, r, beta);
        let pts = [(Complex64::from_polar(z.0, z.1), Complex64::from_polar(w.0, w.1))];
        let res = automorphy_residual(bergman_kernel, Automorphy::Sesquilinear, &gamma, &pts);
        prop_assert!(res <= 1e-10 * (1.0 + bergman_kernel(pts[0].0, pts[0].1).norm()));
    }

    #[test]
    fn cross_kernel_is_invariant(alpha in 0.0..TAU, r in 0.0..0.9f64, beta in 0.0..TAU,
                                 z in (0.0..0.8f64, 0.0..TAU), w in (1.3..3.0f64, 0.0..TAU)) {
        let gamma = su11(alpha, r, beta);
        let k2 = |z: Complex64, w: Complex64| (z - w).powi(-2) / PI;
        let pts = [(Complex64::from_polar(z.0, z.1), Complex64::from_polar(w.0, w.1))];
        let res = automorphy_residual(k2, Automorphy::Bilinear, &gamma, &pts);
        prop_assert!(res <= 1e-10);
    }
}
