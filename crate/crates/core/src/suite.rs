//! The verification suite behind `sslab verify`.

use crate::catalog::{self, CatalogEntry, Essential};
use crate::config::Config;
use crate::curv::{hopf_consistency, ledger_rows, total_curvature_area, total_curvature_contour};
use crate::ends::{classify_end, end_records, predicted_index, winding, EndKind};
use crate::error::{Error, Result};
use crate::intersect::self_intersection_scan;
use crate::locus::{residual_ok, scan, LocusKind, Window};
use crate::mesh::sample_mesh;
use crate::mfun::{unimodular, Point};
use crate::wdata::{completeness_probe, immerse, lorentz_isotropy_check, metric_identity_residual, period_report, PathSpec, WeierstrassData};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::fmt::Write;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fail(msg: impl Into<String>) -> Error {
    Error::InconsistentLedger(msg.into())
}

/// Golden-angle spiral in the disc of radius `r`, avoiding `avoid`.
pub fn sample_points(n: usize, r: f64, avoid: &[C64]) -> Vec<C64> {
    let ga = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| C64::from_polar(r * ((k as f64 + 0.5) / n as f64).sqrt(), ga * k as f64))
        .filter(|z| avoid.iter().all(|p| (z - p).norm() > 1e-3))
        .collect()
}

fn catenoid_totals(cfg: &Config, log: &mut String) -> Result<()> {
    for t in [0.0, 0.4, 0.9] {
        let e = catalog::catenoid(t, 1.0)?;
        let k = total_curvature_contour(&e.data, cfg)?;
        let a = total_curvature_area(&e.data, cfg)?;
        let rc = (k.k_total + 4.0 * PI).abs().max(k.kperp_total.abs());
        let ra = (a.k_total - k.k_total).abs().max((a.kperp_total - k.kperp_total).abs());
        let _ = write!(log, "t={t}: contour off {rc:.1e}, area off {ra:.1e}; ");
        if rc > 1e-8 || ra > 1e-3 {
            return Err(fail(format!("t = {t}")));
        }
    }
    Ok(())
}

fn essential_totals(cfg: &Config, log: &mut String) -> Result<()> {
    for k in [2u32, 3] {
        let e = catalog::essential(Essential::M, k, 0.3)?;
        let want = -4.0 * PI * k as f64;
        for t in [total_curvature_contour(&e.data, cfg)?, total_curvature_area(&e.data, cfg)?] {
            let r = (t.k_total - want).abs().max(t.kperp_total.abs());
            let _ = write!(log, "k={k} {:?} off {r:.1e}; ", t.method);
            if r > 5e-3 {
                return Err(fail(format!("k = {k}, {:?}", t.method)));
            }
        }
    }
    Ok(())
}

fn singular_ledger(cfg: &Config, log: &mut String) -> Result<()> {
    let e = catalog::singular1(c(2.0, 0.0))?;
    let ends = end_records(&e.data, cfg)?;
    let at = |p: Point| ends.iter().find(|r| r.puncture == p).cloned().ok_or_else(|| fail(format!("no end at {p}")));
    let (e0, ei) = (at(Point::finite(0.0, 0.0))?, at(Point::Infinity)?);
    let o = |x: Option<i32>| x.map_or("none".to_string(), |v| v.to_string());
    let _ = write!(log, "ind {}/{}, reduced {}/{}; ", o(e0.index), o(ei.index), o(e0.d_tilde), o(ei.d_tilde));
    if e0.index != Some(2) || ei.index != Some(-2) || e0.d_tilde != Some(1) || ei.d_tilde != Some(3) {
        return Err(fail("indices or multiplicities"));
    }
    let t = total_curvature_contour(&e.data, cfg)?;
    let l = ledger_rows(&e.data, &ends, &t)?;
    for r in &l.rows {
        if ["deg1", "deg2", "deg3", "deg4", "jorge_meeks"].contains(&r.name) {
            let off = (r.lhs - r.rhs).abs();
            let wanted = if r.name == "deg3" { 0.0 } else { (r.rhs + 8.0 * PI).abs() };
            if off > 1e-3 || wanted > 1e-3 {
                return Err(fail(format!("{} = {} vs {}", r.name, r.lhs, r.rhs)));
            }
        }
    }
    let _ = write!(log, "K = {:.9}", t.k_total);
    Ok(())
}

fn winding_table(log: &mut String) -> Result<()> {
    for m in 1..=3u32 {
        for n in 1..=3u32 {
            if m == n {
                continue;
            }
            let g = |z: C64| Some(z.powu(m) - z.conj().powu(n));
            let w = winding(&g, C64::default(), 0.5, 256)?;
            let p = predicted_index(m, n).unwrap();
            let _ = write!(log, "({m},{n})={w:.0} ");
            if (w - p as f64).abs() > 1e-6 {
                return Err(fail(format!("m = {m}, n = {n}: {w} vs {p}")));
            }
        }
    }
    Ok(())
}

fn periods(cfg: &Config, log: &mut String) -> Result<()> {
    let passing: Vec<CatalogEntry> = vec![
        catalog::catenoid(0.5, 1.0)?,
        catalog::enneper1(c(-1.0, 0.0), c(1.0, 0.0))?,
        catalog::enneper2(c(-1.0, 0.0), c(0.0, 1.0))?,
        catalog::enneper_k(2, c(0.0, 1.0), c(1.0, 0.0))?,
        catalog::knoid(3, c(3f64.sqrt() / 2.0, 0.0), c(0.0, 0.5))?,
        catalog::graph1()?,
        catalog::graph2(2)?,
        catalog::essential(Essential::M, 2, 0.3)?,
        catalog::singular1(c(2.0, 0.0))?,
        catalog::singular2(c(0.0, 0.0), c(4.0, 0.0))?,
    ];
    for e in &passing {
        if !period_report(&e.data, cfg)?.pass() {
            return Err(fail(format!("{} periods fail", e.name)));
        }
    }
    let lambda = c(0.0, 1.0);
    let h = catalog::helicoid(0.5, lambda)?;
    let t = period_report(&h.data, cfg)?;
    let row = t.rows.iter().find(|r| r.puncture == Point::finite(0.0, 0.0)).ok_or_else(|| fail("no loop at 0"))?;
    let off = (row.dh.re + 2.0 * PI * lambda.im).abs();
    let _ = write!(log, "{} entries pass; helicoid Re(dh loop) = {:.12} (off {off:.1e})", passing.len(), row.dh.re);
    if t.pass() || off > 1e-9 {
        return Err(fail("helicoid"));
    }
    Ok(())
}

fn regularity_frontier(cfg: &Config, log: &mut String) -> Result<()> {
    let w = Window::Disc { radius: cfg.locus_disc };
    let good = catalog::enneper2(c(-1.0, 0.0), c(0.0, 1.0))?;
    let bad = catalog::enneper2_unchecked(c(1.0, 0.0), c(0.0, 1.0))?;
    let fg = scan(&good.data, w, cfg.locus_grid)?;
    let fb = scan(&bad.data, w, cfg.locus_grid)?;
    let pts = fb.all_points();
    let _ = write!(log, "c=-1: {} points; c=1: {} points", fg.all_points().len(), pts.len());
    if !fg.is_empty() || pts.is_empty() || pts.iter().any(|z| z.im.abs() > 1e-8) {
        return Err(fail("frontier"));
    }
    Ok(())
}

fn curve_loci(cfg: &Config, log: &mut String) -> Result<()> {
    let a = catalog::enneper1_unchecked(c(1.0, 0.0), c(1.0, 0.0))?;
    let b = catalog::maximal_catenoid()?;
    for (e, w) in [(&a, Window::Disc { radius: 3.0 }), (&b, Window::Annulus { r_min: 0.1, r_max: 10.0 })] {
        let f = scan(&e.data, w, cfg.locus_grid)?;
        let pts = f.all_points();
        let worst_r = pts.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        // the residual bound is relative: 1e-10 (1 + |phi|)
        let bad = pts.iter().filter(|&&z| residual_ok(&e.data, z).is_none()).count();
        let _ = write!(log, "{}: {:?} with {} samples, |z|-1 {worst_r:.1e}, {bad} over bound; ", e.name, f.kind, pts.len());
        if f.kind != LocusKind::Curve || worst_r > 1e-8 || bad > 0 {
            return Err(fail(e.name.clone()));
        }
    }
    Ok(())
}

fn self_intersections(cfg: &Config, log: &mut String) -> Result<()> {
    let e = catalog::enneper_k(1, c(0.0, 1.0), c(1.0, 0.0))?;
    let m = sample_mesh(&e.data, e.chart, 128, cfg)?;
    let r = self_intersection_scan(&e.data, &m, true, cfg);
    let ok = r.clusters.len() == 2
        && r.clusters.iter().all(|cl| cl.preimages.len() == 2 && cl.preimages.iter().all(|z| (z.norm() - 3f64.sqrt()).abs() <= 1e-4));
    let _ = write!(log, "enneper_k: {} clusters; ", r.clusters.len());
    if !ok {
        return Err(fail("enneper_k clusters"));
    }
    for e in [catalog::catenoid(0.5, 1.0)?, catalog::knoid(3, c(3f64.sqrt() / 2.0, 0.0), c(0.0, 0.5))?] {
        let m = sample_mesh(&e.data, e.chart, 128, cfg)?;
        let r = self_intersection_scan(&e.data, &m, true, cfg);
        let _ = write!(log, "{}: {} clusters; ", e.name, r.clusters.len());
        if !r.is_empty() {
            return Err(fail(format!("{} not embedded", e.name)));
        }
    }
    Ok(())
}

/// `x` at `z0 + d` relative to `z0`, along a straight path.
fn rel(data: &WeierstrassData, z0: C64, d: C64, cfg: &Config) -> Result<[f64; 4]> {
    immerse(data, &PathSpec::line(z0, z0 + d), cfg)
}

fn laplacian(data: &WeierstrassData, z0: C64, h: f64, cfg: &Config) -> Result<f64> {
    let mut s = [0.0; 4];
    for d in [c(h, 0.0), c(-h, 0.0), c(0.0, h), c(0.0, -h)] {
        let x = rel(data, z0, d, cfg)?;
        for k in 0..4 {
            s[k] += x[k];
        }
    }
    Ok(s.iter().map(|v| v * v).sum::<f64>().sqrt() / (h * h))
}

fn structural(cfg: &Config, log: &mut String) -> Result<()> {
    let entries: Vec<CatalogEntry> = ["catenoid", "helicoid", "enneper1", "enneper2", "enneper_k", "knoid", "graph2", "singular1", "singular2", "alias_palmer"]
        .iter()
        .map(|n| catalog::build_default(n))
        .collect::<Result<_>>()?;
    let mut worst = [0.0f64; 3];
    for e in &entries {
        let pts = sample_points(64, 2.5, &e.data.finite_singularities());
        worst[0] = worst[0].max(lorentz_isotropy_check(&e.data, &pts)?);
        worst[1] = worst[1].max(metric_identity_residual(&e.data, &pts)?);
        worst[2] = worst[2].max(hopf_consistency(&e.data, &pts)?);
        let ends = end_records(&e.data, cfg)?;
        if ends.iter().any(|r| r.d_tilde.unwrap_or(0) < 1) {
            return Err(fail(format!("{}: reduced multiplicity below 1", e.name)));
        }
        let t = total_curvature_contour(&e.data, cfg)?;
        let l = ledger_rows(&e.data, &ends, &t)?;
        for name in ["chern_osserman", "quantization"] {
            if !l.rows.iter().any(|r| r.name == name && r.ok) {
                return Err(fail(format!("{}: {name}", e.name)));
            }
        }
    }
    let _ = write!(log, "isotropy {:.1e}, metric {:.1e}, hopf {:.1e}; ", worst[0], worst[1], worst[2]);
    if worst[0] > 1e-10 || worst[1] > 1e-10 || worst[2] > 1e-9 {
        return Err(fail("pointwise identities"));
    }
    let e = catalog::enneper_k(2, c(0.0, 1.0), c(1.0, 0.0))?;
    let z0 = c(0.6, 0.35);
    let (l1, l2) = (laplacian(&e.data, z0, 0.02, cfg)?, laplacian(&e.data, z0, 0.01, cfg)?);
    let _ = write!(log, "laplacian ratio {:.2}; ", l1 / l2);
    if l1 / l2 < 3.5 {
        return Err(fail("harmonicity"));
    }
    let m = unimodular(c(1.0, 0.2), c(0.3, -0.1), c(-0.2, 0.4), c(1.1, 0.0)).unwrap();
    for e in [catalog::catenoid(0.5, 1.0)?, catalog::singular1(c(2.0, 0.0))?] {
        let d2 = e.data.lorentz_frame_change(&m)?;
        let (t1, t2) = (total_curvature_contour(&e.data, cfg)?, total_curvature_contour(&d2, cfg)?);
        let mut i1: Vec<i32> = end_records(&e.data, cfg)?.iter().filter_map(|r| r.index).collect();
        let mut i2: Vec<i32> = end_records(&d2, cfg)?.iter().filter_map(|r| r.index).collect();
        i1.sort();
        i2.sort();
        let off = (t1.complex() - t2.complex()).norm();
        if off > 1e-6 || i1 != i2 {
            return Err(fail(format!("{}: frame change moved totals by {off:.1e} or indices {i1:?} -> {i2:?}", e.name)));
        }
    }
    let _ = write!(log, "frame change invariant");
    Ok(())
}

fn completeness(cfg: &Config, log: &mut String) -> Result<()> {
    let cat = catalog::catenoid(0.5, 1.0)?;
    let ess = catalog::essential(Essential::M, 2, 0.3)?;
    for e in [&cat, &ess] {
        for &p in e.data.domain().punctures() {
            let pr = completeness_probe(&e.data, p, cfg);
            let _ = write!(log, "{} at {p}: {:.2}; ", e.name, pr.ds_exponent);
            if !pr.divergent {
                return Err(fail(format!("{} at {p}", e.name)));
            }
        }
    }
    let inc = catalog::incomplete()?;
    let pr = completeness_probe(&inc.data, Point::Infinity, cfg);
    let _ = write!(log, "incomplete at inf: {:.2}", pr.ds_exponent);
    if pr.divergent {
        return Err(fail("incomplete end reads as complete"));
    }
    Ok(())
}

fn bad_end(cfg: &Config, log: &mut String) -> Result<()> {
    let e = catalog::catenoid_opt_in(1.0, 1.0)?;
    let k = classify_end(&e.data, Point::finite(0.0, 0.0))?;
    let con = total_curvature_contour(&e.data, cfg);
    let area = total_curvature_area(&e.data, cfg);
    let _ = write!(log, "end {k}; contour {}; area {}", con.as_ref().err().map(|e| e.kind()).unwrap_or("converged"), area.as_ref().err().map(|e| e.kind()).unwrap_or("converged"));
    if k != EndKind::BadSingular || !matches!(con, Err(Error::BadEnd(_))) || !matches!(area, Err(Error::NonConvergent(_))) {
        return Err(fail("bad end accepted"));
    }
    Ok(())
}

pub const CRITERIA: [&str; 11] = [
    "catenoid quantization",
    "essential-singularity totals",
    "index ledger",
    "winding table",
    "period discrimination",
    "regularity frontier",
    "curve locus",
    "self-intersection",
    "structural identities",
    "completeness",
    "bad-end refusal",
];

/// Runs criterion `id` (1-based).
pub fn run_one(id: u32, cfg: &Config) -> Outcome {
    let t0 = Instant::now();
    let mut log = String::new();
    let r = match id {
        1 => catenoid_totals(cfg, &mut log),
        2 => essential_totals(cfg, &mut log),
        3 => singular_ledger(cfg, &mut log),
        4 => winding_table(&mut log),
        5 => periods(cfg, &mut log),
        6 => regularity_frontier(cfg, &mut log),
        7 => curve_loci(cfg, &mut log),
        8 => self_intersections(cfg, &mut log),
        9 => structural(cfg, &mut log),
        10 => completeness(cfg, &mut log),
        11 => bad_end(cfg, &mut log),
        _ => Err(Error::Param(format!("no criterion {id}"))),
    };
    let pass = r.is_ok();
    if let Err(e) = r {
        let _ = write!(log, " -> {e}");
    }
    Outcome { id, name: CRITERIA.get(id as usize - 1).copied().unwrap_or("?"), pass, detail: log, seconds: t0.elapsed().as_secs_f64() }
}

pub fn run_all(cfg: &Config) -> Vec<Outcome> {
    (1..=CRITERIA.len() as u32).map(|i| run_one(i, cfg)).collect()
}
