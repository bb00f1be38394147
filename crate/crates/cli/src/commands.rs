//! One function per command, each producing a report.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;
use weldlab_core::fuchsian::{
    alternating_trace_sum, automorphy_residual, basepoint_trace_terms, domain_area_integral, enumerate,
    octagon_group, Automorphy, MAX_WORD_LENGTH,
};
use weldlab_core::grunsky::{
    bergman_kernel, grunsky_identity_residual, inversion_check, matrix_to_csv, s2_report, spectral_norm,
    GrunskyTruncation,
};
use weldlab_core::liouville::{identity_report, s1, s1_spectral, s_cl_report, GRID_REFINEMENTS};
use weldlab_core::maps::{catalog, CatalogOptions};
use weldlab_core::{Family, WeldingPair};

use crate::config::{Cli, Command};
use crate::report::{num, Report};

/// Why a command could not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration; exit 2.
    Input(String),
    /// The numerics broke down; exit 3.
    Numerical(String),
}

impl From<weldlab_core::Error> for Failure {
    fn from(e: weldlab_core::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Input(s)
    }
}

pub struct Outcome {
    pub report: Report,
    /// Replaces the flattened report for `--format csv`.
    pub csv: Option<String>,
    /// Sweep rows that failed, which fail the run even though a table was written.
    pub failed_rows: usize,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, csv: None, failed_rows: 0 }
    }
}

const DEFAULT_ORDERS: [usize; 2] = [32, 64];

fn progress(cli: &Cli, msg: &str) {
    if cli.verbose > 0 {
        eprintln!("weldlab: {msg}");
    }
}

fn catalog_options(cli: &Cli) -> CatalogOptions {
    match cli.samples {
        Some(m) => CatalogOptions::fixed(m),
        None => CatalogOptions::default(),
    }
}

fn build_pair(cli: &Cli, family: Family) -> Result<WeldingPair, Failure> {
    progress(cli, &format!("building {} pair", family.tag()));
    if let Some(m) = cli.samples {
        if m < 8 || !m.is_power_of_two() {
            return Err(Failure::Input(format!("--M must be a power of two >= 8, got {m}")));
        }
    }
    Ok(catalog(family, &catalog_options(cli))?)
}

fn pair_label(pair: &WeldingPair) -> serde_json::Value {
    json!({
        "family": pair.family.tag(),
        "params": pair.family.params(),
        "inverted": pair.inverted,
        "M": pair.m,
        "residuals": pair.residuals,
    })
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match cli.command()? {
        Command::Pair => pair(cli),
        Command::Grunsky => grunsky(cli),
        Command::Logdet => logdet(cli),
        Command::S1 => s1_cmd(cli),
        Command::Identity => identity(cli),
        Command::Invert => invert(cli),
        Command::Fuchsian => fuchsian(cli),
        Command::Scl => scl(cli),
        Command::Sweep => sweep(cli),
    }
}

fn pair(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol(1e-8)?;
    let p = build_pair(cli, cli.family()?)?;
    let mut report = Report::new("pair", cli.echo(), serde_json::to_value(p.to_document()).expect("pair serializes"));
    report.check("boundary_distance", p.residuals.boundary, tol);
    let mut csv = String::from("k,f_re,f_im,g_re,g_im\n");
    for k in 0..p.f.order().max(p.g.order()) {
        let (f, g) = (p.f.coeff(k), p.g.coeff(k));
        csv.push_str(&format!("{k},{},{},{},{}\n", num(f.re), num(f.im), num(g.re), num(g.im)));
    }
    Ok(Outcome { report, csv: Some(csv), failed_rows: 0 })
}

fn grunsky(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol(1e-6)?;
    let n = *cli.orders(&[64])?.last().unwrap();
    let p = build_pair(cli, cli.family()?)?;
    progress(cli, &format!("building blocks at N = {n}"));
    let t = GrunskyTruncation::build(&p, n)?;
    let r = grunsky_identity_residual(&p, n)?;
    let symmetry = (&t.b3 - t.b2.transpose()).norm() / t.b2.norm().max(1.0);
    let result = json!({
        "pair": pair_label(&p),
        "N": n,
        "provenance": t.provenance,
        "spectral_norm": {"b1": spectral_norm(&t.b1), "b2": spectral_norm(&t.b2), "b4": spectral_norm(&t.b4)},
        "torus_deviation": t.torus_deviation,
        "b3_minus_b2_transpose": symmetry,
        "identity_residuals": r,
    });
    let mut report = Report::new("grunsky", cli.echo(), result);
    report.check("identity_residual", r.max(), tol);
    report.check("b3_minus_b2_transpose", symmetry, 1e-10);
    let block = match cli.block.as_deref().unwrap_or("b1") {
        "b1" => &t.b1,
        "b2" => &t.b2,
        "b3" => &t.b3,
        "b4" => &t.b4,
        other => return Err(Failure::Input(format!("unknown block {other:?}"))),
    };
    Ok(Outcome { csv: Some(matrix_to_csv(block)), report, failed_rows: 0 })
}

fn logdet(cli: &Cli) -> Result<Outcome, Failure> {
    let orders = cli.orders(&DEFAULT_ORDERS)?;
    let route = cli.route()?;
    let p = build_pair(cli, cli.family()?)?;
    progress(cli, &format!("determinants at {orders:?}"));
    let r = s2_report(&p, route, &orders)?;
    let result = json!({
        "pair": pair_label(&p),
        "route": route,
        "report": r,
        "s2_univ": r.extrapolated,
        "s2_dg": 0.0 - r.extrapolated,
        "error_estimate": r.error_estimate(),
    });
    let mut report = Report::new("logdet", cli.echo(), result);
    report.check("s2_univ_nonpositive", r.extrapolated.max(0.0), 0.0);
    Ok(report.into())
}

fn s1_cmd(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol(1e-3)?;
    let grids = cli.grids(&GRID_REFINEMENTS)?;
    let p = build_pair(cli, cli.family()?)?;
    progress(cli, &format!("quadrature on {grids:?}"));
    let r = s1(&p, &grids)?;
    let spectral = s1_spectral(&p)?;
    let gap = (r.extrapolated - spectral.total()).abs() / r.extrapolated.abs().max(1.0);
    let result = json!({
        "pair": pair_label(&p),
        "report": r,
        "s1": r.extrapolated,
        "s1_spectral": spectral.total(),
        "spectral_terms": spectral,
    });
    let mut report = Report::new("s1", cli.echo(), result);
    report.check("quadrature_vs_spectral_rel", gap, tol);
    Ok(report.into())
}

fn identity(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol(1e-3)?;
    let grids = cli.grids(&GRID_REFINEMENTS)?;
    let orders = cli.orders(&DEFAULT_ORDERS)?;
    let p = build_pair(cli, cli.family()?)?;
    progress(cli, &format!("identity check on {grids:?} at {orders:?}"));
    let r = identity_report(&p, &grids, &orders)?;
    let rel = r.residual_identity.rel.abs();
    let result = json!({"pair": pair_label(&p), "report": r});
    let mut report = Report::new("identity", cli.echo(), result);
    report.check("residual_identity_rel", rel, tol);
    Ok(report.into())
}

fn invert(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol(1e-6)?;
    let schedule = cli.schedule()?;
    let p = build_pair(cli, cli.family()?)?;
    progress(cli, &format!("inversion check with {schedule:?}"));
    let r = inversion_check(&p, &schedule)?;
    let result = json!({
        "pair": pair_label(&p),
        "schedule": schedule,
        "s2_univ_via_b1": r.s2_via_b1(),
        "s2_univ_inverted_via_b1": r.s2_inverted_via_b1(),
        "s2_univ_via_b4": r.s2_via_b4(),
        "inversion_gap": r.inversion_gap(),
        "route_gap": r.route_gap(),
        "reports": r,
    });
    let mut report = Report::new("invert", cli.echo(), result);
    report.check("inversion_gap", r.inversion_gap(), tol);
    report.check("route_gap", r.route_gap(), tol);
    Ok(report.into())
}

fn fuchsian(cli: &Cli) -> Result<Outcome, Failure> {
    let l = cli.word_length.unwrap_or(2);
    if l > MAX_WORD_LENGTH {
        return Err(Failure::Input(format!("--L must be at most {MAX_WORD_LENGTH}")));
    }
    let g = octagon_group();
    progress(cli, &format!("enumerating words up to length {l}"));
    let e = enumerate(&g, l)?;
    let area = domain_area_integral(&g)?;
    let samples: Vec<(Complex64, Complex64)> = (0..64)
        .map(|j| {
            let r = g.vertex_radius * (0.1 + 0.85 * ((j * 37) % 64) as f64 / 64.0);
            let a = 0.7 * j as f64;
            (Complex64::from_polar(r, a), Complex64::from_polar(0.9 * r, 2.3 * a + 1.0))
        })
        .collect();
    let exterior: Vec<(Complex64, Complex64)> = samples.iter().map(|&(z, w)| (z, w.conj().inv())).collect();
    let k2 = |z: Complex64, w: Complex64| (z - w).powi(-2) / PI;
    let bergman = g
        .generators
        .iter()
        .map(|h| automorphy_residual(bergman_kernel, Automorphy::Sesquilinear, h, &samples))
        .fold(0.0, f64::max);
    let cross = g.generators.iter().map(|h| automorphy_residual(k2, Automorphy::Bilinear, h, &exterior)).fold(0.0, f64::max);
    progress(cli, "basepoint trace terms");
    let id = WeldingPair::identity();
    let terms: Vec<f64> = (1..=3).map(|k| basepoint_trace_terms(&g, &id, k)).collect::<Result<_, _>>()?;
    let sums: Vec<f64> = (1..=3).map(|n| alternating_trace_sum(area.value, &terms, n)).collect::<Result<_, _>>()?;
    let generators: Vec<[[f64; 2]; 4]> = g
        .generators
        .iter()
        .map(|m| [m.a, m.b, m.c, m.d].map(|x| [x.re, x.im]))
        .collect();
    let result = json!({
        "genus": g.genus,
        "generators": generators,
        "relation_word": g.relation_word,
        "L": l,
        "element_count": e.len(),
        "vertex_radius": g.vertex_radius,
        "translation_length": g.translation_length,
        "relation_residual": g.relation_residual(),
        "area": area,
        "automorphy": {"bergman": bergman, "cross_kernel": cross},
        "trace_terms": terms,
        "alternating_sums": sums,
    });
    let mut report = Report::new("fuchsian", cli.echo(), result);
    report.check("relation_residual", g.relation_residual(), 1e-10);
    report.check("area_minus_one", (area.value - 1.0).abs(), 1e-4);
    report.check("bergman_automorphy", bergman, 1e-10);
    report.check("cross_kernel_automorphy", cross, 1e-10);
    for (n, s) in sums.iter().enumerate() {
        report.check(&format!("alternating_sum_{}", n + 1), s.abs(), 1e-3);
    }
    Ok(report.into())
}

fn scl(cli: &Cli) -> Result<Outcome, Failure> {
    let s2 = cli.s2.ok_or_else(|| Failure::Input("scl needs --s2".into()))?;
    let r = s_cl_report(s2, cli.genus.unwrap_or(2))?;
    let mut report = Report::new("scl", cli.echo(), serde_json::to_value(r).expect("report serializes"));
    report.check("s_cl_minus_bound", (r.s_cl - r.bound).max(0.0), 0.0);
    Ok(report.into())
}

const SWEEP_HEADER: &str =
    "param,s1,s1_spectral,s2_univ,s2_dg,residual_identity_abs,residual_identity_rel,residual_operators,s_cl,slack,passed,error";

fn sweep(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol(1e-3)?;
    let grids = cli.grids(&GRID_REFINEMENTS)?;
    let orders = cli.orders(&DEFAULT_ORDERS)?;
    let genus = cli.genus.unwrap_or(2);
    let values = match (cli.family_with(Some(0.5))?, cli.range()?) {
        (Family::Identity, _) => vec![0.0],
        (_, Some(v)) => v,
        (_, None) => return Err(Failure::Input("sweep needs --range start:stop:step".into())),
    };
    for &v in &values {
        cli.family_with(Some(v))?;
    }
    let mut csv = format!("{SWEEP_HEADER}\n");
    let mut rows = Vec::new();
    let mut failed = 0;
    for &v in &values {
        progress(cli, &format!("sweep value {v}"));
        let row = cli
            .family_with(Some(v))
            .map_err(Failure::Input)
            .and_then(|fam| build_pair(cli, fam))
            .and_then(|p| Ok(identity_report(&p, &grids, &orders)?))
            .and_then(|r| Ok((s_cl_report(r.s2_dg.max(0.0), genus)?, r)));
        match row {
            Ok((s, r)) => {
                let passed = r.residual_identity.rel.abs() <= tol;
                failed += usize::from(!passed);
                let cells = [
                    v,
                    r.s1.extrapolated,
                    r.s1_spectral,
                    r.s2_univ,
                    r.s2_dg,
                    r.residual_identity.abs,
                    r.residual_identity.rel,
                    r.residual_operators.abs,
                    s.s_cl,
                    s.slack,
                ];
                let nums: Vec<String> = cells.iter().map(|&x| num(x)).collect();
                csv.push_str(&format!("{},{passed},\n", nums.join(",")));
                rows.push(json!({"param": v, "identity": r, "scl": s, "passed": passed}));
            }
            Err(e) => {
                failed += 1;
                let msg = match e {
                    Failure::Input(m) | Failure::Numerical(m) => m,
                };
                let blanks = ",".repeat(9);
                csv.push_str(&format!("{}{blanks},false,{}\n", num(v), msg.replace([',', '\n'], ";")));
                rows.push(json!({"param": v, "error": msg, "passed": false}));
            }
        }
    }
    let report = Report::new("sweep", cli.echo(), json!({"rows": rows, "failed_rows": failed}));
    Ok(Outcome { report, csv: Some(csv), failed_rows: failed })
}
