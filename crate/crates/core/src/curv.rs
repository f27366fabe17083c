//! Curvature fields and total curvature, by area integration and by small
//! loop integrals around the ends and the poles of the Gauss maps.

use crate::config::Config;
use crate::ends::{classify_end, EndKind, EndRecord};
use crate::error::{Error, Result};
use crate::mfun::{MeroExpr, Point};
use crate::quad::{adaptive, aitken, circle_trapezoid, circle_trapezoid_conj};
use crate::wdata::{Jet, WeierstrassData};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureSample {
    pub z: C64,
    /// e^{2w}
    pub conformal: f64,
    pub k: f64,
    pub kperp: f64,
    pub omega: C64,
    pub omega_star: C64,
}

pub fn curvature_at(data: &WeierstrassData, z: C64) -> Result<CurvatureSample> {
    let j = data.jet(z)?;
    if j.separation() < 1e-12 {
        return Err(Error::SingularPoint(format!("phi = conj psi at {z}")));
    }
    let c = j.curvature();
    let conformal = j.density();
    if !(conformal > 0.0) || !c.is_finite() {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok(CurvatureSample { z, conformal, k: -c.re, kperp: c.im, omega: j.omega(), omega_star: j.omega_star() })
}

/// Largest relative residual of `-K + i K_perp = 8 e^{-4w} Omega conj(Omega*)`.
pub fn hopf_consistency(data: &WeierstrassData, samples: &[C64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in samples {
        let s = curvature_at(data, z)?;
        let lhs = C64::new(-s.k, s.kperp);
        let rhs = 8.0 * s.omega * s.omega_star.conj() / (s.conformal * s.conformal);
        let scale = lhs.norm().max(rhs.norm());
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Area,
    Contour,
}

/// One small loop: limits of `int phi'/(phi - conj psi) dz` and
/// `int conj(psi')/(phi - conj psi) conj(dz)` on positively oriented loops in the
/// local chart, with the values predicted by the end indices when available.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopTerm {
    pub point: Point,
    pub phi_side: C64,
    pub psi_side: C64,
    pub phi_predicted: Option<C64>,
    pub psi_predicted: Option<C64>,
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TotalCurvature {
    pub k_total: f64,
    pub kperp_total: f64,
    pub method: Method,
    pub certified: bool,
    pub error: f64,
    /// `-int K + i int K_perp` from the psi-side loops (contour method only)
    pub dual: Option<C64>,
    pub terms: Vec<LoopTerm>,
}

impl TotalCurvature {
    /// `-int K + i int K_perp`
    pub fn complex(&self) -> C64 {
        C64::new(-self.k_total, self.kperp_total)
    }
}

fn pole_order(f: &MeroExpr, p: Point) -> Option<u32> {
    let o = match p {
        Point::Finite(_) => f.order_at(p).ok()?,
        Point::Infinity => f.change_chart_to_infinity(false).order_at(Point::Finite(C64::default())).ok()?,
    };
    Some((-o).max(0) as u32)
}

/// Punctures plus interior poles of phi and psi (infinity included).
fn loop_points(data: &WeierstrassData) -> Result<Vec<Point>> {
    let dom = data.domain();
    let mut pts: Vec<Point> = dom.punctures().to_vec();
    for f in [data.phi(), data.psi()] {
        let inv = f.zeros_and_poles()?;
        for (z, _) in inv.poles() {
            let p = Point::Finite(z);
            if !pts.iter().any(|q| q.approx_eq(&p, 1e-9)) {
                pts.push(p);
            }
        }
        if dom.contains_infinity() && !pts.contains(&Point::Infinity) && pole_order(f, Point::Infinity).unwrap_or(0) > 0 {
            pts.push(Point::Infinity);
        }
    }
    Ok(pts)
}

/// Chart radius for loops at `p`: below half the distance to every other
/// singular point, capped by `cap`.
fn base_radius(data: &WeierstrassData, p: Point, cap: f64) -> f64 {
    let sing = data.finite_singularities();
    match p {
        Point::Finite(z0) => {
            let d = sing.iter().map(|q| (q - z0).norm()).filter(|&d| d > 1e-12).fold(f64::INFINITY, f64::min);
            (0.5 * d).min(cap)
        }
        Point::Infinity => {
            let m = sing.iter().map(|q| q.norm()).fold(0.0, f64::max);
            (0.5 / m.max(1e-300)).min(cap)
        }
    }
}

#[derive(Clone, Copy)]
enum Side {
    Phi,
    Psi,
}

fn side_value(j: &Jet, side: Side) -> C64 {
    match side {
        Side::Phi => j.f_phi(),
        Side::Psi => j.f_psi(),
    }
}

/// Positively oriented loop integral in the chart at `p`, chart radius `rho`.
fn loop_integral(data: &WeierstrassData, p: Point, rho: f64, side: Side) -> Result<C64> {
    let (center, r, sign) = match p {
        Point::Finite(z) => (z, rho, 1.0),
        Point::Infinity => (C64::default(), 1.0 / rho, -1.0),
    };
    let f = |z: C64| -> Result<C64> {
        let v = side_value(&data.jet(z)?, side);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonConvergent(format!("integrand blows up at {z}")))
        }
    };
    // integral of |f| |dz|
    let abs = |n: usize| -> Result<f64> {
        let mut a = 0.0;
        for k in 0..n {
            a += f(center + C64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / n as f64))?.norm();
        }
        Ok(a * 2.0 * PI * r / n as f64)
    };
    let integrate = |n: usize| match side {
        Side::Phi => circle_trapezoid(&f, center, r, n),
        Side::Psi => circle_trapezoid_conj(&f, center, r, n),
    };
    let mut n = 256;
    let mut prev = integrate(n)?;
    loop {
        n *= 2;
        let cur = integrate(n)?;
        let scale = abs(n)?;
        if (cur - prev).norm() <= 1e-12 * scale + 1e-300 {
            return Ok(sign * cur);
        }
        if n >= 1 << 17 {
            return Err(Error::NonConvergent(format!("loop at {p}, radius {r}: nodes exhausted")));
        }
        prev = cur;
    }
}

/// Limit of the loop integral as the chart radius shrinks geometrically,
/// accelerated by Aitken's process. Returns (limit, spread of the last three
/// accelerated values).
fn loop_limit(data: &WeierstrassData, p: Point, side: Side, cfg: &Config) -> Result<(C64, f64)> {
    let cap = match p {
        Point::Finite(_) => cfg.contour_r0,
        Point::Infinity => 1.0 / cfg.contour_big0,
    };
    let rho0 = base_radius(data, p, cap);
    let mut raw: Vec<C64> = Vec::new();
    let mut acc: Vec<C64> = Vec::new();
    for j in 0..=cfg.contour_steps {
        let rho = rho0 * 0.5f64.powi(j as i32);
        raw.push(loop_integral(data, p, rho, side)?);
        let n = raw.len();
        if n >= 3 {
            acc.push(aitken(raw[n - 3], raw[n - 2], raw[n - 1]));
        }
        let m = acc.len();
        if m >= 3 {
            let last = acc[m - 1];
            let spread = (last - acc[m - 2]).norm().max((last - acc[m - 3]).norm());
            if spread <= 1e-12 * (1.0 + last.norm()) {
                return Ok((last, spread));
            }
        }
    }
    let m = acc.len();
    if m < 3 {
        return Err(Error::NonConvergent(format!("too few radii at {p}")));
    }
    let last = acc[m - 1];
    let spread = (last - acc[m - 2]).norm().max((last - acc[m - 3]).norm());
    Ok((last, spread))
}

/// Loop values predicted from the index and the pole orders at `p`:
/// `pi i (ind+ + ind) - 2 pi i ord(phi)` and `pi i (ind+ - ind) - 2 pi i ord(psi)`.
fn predictions(data: &WeierstrassData, p: Point, index: Option<i32>) -> (Option<C64>, Option<C64>) {
    let i = C64::new(0.0, 1.0);
    let (Some(ind), Some(kp), Some(ks)) = (index, pole_order(data.phi(), p), pole_order(data.psi(), p)) else {
        return (None, None);
    };
    let plus = ind.abs() as f64;
    let ind = ind as f64;
    (
        Some(PI * i * (plus + ind) - 2.0 * PI * i * kp as f64),
        Some(PI * i * (plus - ind) - 2.0 * PI * i * ks as f64),
    )
}

/// Sum of `2i` times the loop limits around every puncture and every pole of
/// the Gauss maps; the psi-side sum is carried along as a cross-check.
pub fn total_curvature_contour(data: &WeierstrassData, cfg: &Config) -> Result<TotalCurvature> {
    let mut kinds = Vec::new();
    for &p in data.domain().punctures() {
        let k = classify_end(data, p)?;
        if k == EndKind::BadSingular {
            return Err(Error::BadEnd(format!("bad singular end at {p}")));
        }
        kinds.push((p, k));
    }
    let pts = loop_points(data)?;
    let mut terms = Vec::new();
    let mut t_phi = C64::default();
    let mut t_psi = C64::default();
    let mut err = 0.0;
    for p in pts {
        let (lp, sp) = loop_limit(data, p, Side::Phi, cfg)?;
        let (ls, ss) = loop_limit(data, p, Side::Psi, cfg)?;
        let index = match kinds.iter().find(|(q, _)| *q == p).map(|x| x.1) {
            None | Some(EndKind::Regular) => Some(0),
            Some(EndKind::GoodSingular { m, n }) => crate::ends::predicted_index(m, n),
            _ => None,
        };
        let (pp, ps) = predictions(data, p, index);
        t_phi += 2.0 * C64::new(0.0, 1.0) * lp;
        t_psi += 2.0 * C64::new(0.0, 1.0) * ls;
        err += 2.0 * sp;
        terms.push(LoopTerm { point: p, phi_side: lp, psi_side: ls, phi_predicted: pp, psi_predicted: ps, spread: sp.max(ss) });
    }
    let scale = 1.0 + t_phi.norm();
    let certified = err <= cfg.contour_conv * scale && (t_phi - t_psi).norm() <= cfg.contour_conv * scale;
    if !certified && err > 1e-3 * scale {
        return Err(Error::NonConvergent(format!("loop limits did not settle (spread {err:.3e})")));
    }
    Ok(TotalCurvature {
        k_total: -t_phi.re,
        kperp_total: t_phi.im,
        method: Method::Contour,
        certified,
        error: err,
        dual: Some(t_psi),
        terms,
    })
}

/// Smooth step: 1 for x <= 0, 0 for x >= 1.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    f(1.0 - x) / (f(1.0 - x) + f(x))
}

struct Patch {
    center: C64,
    /// cutoff radius (finite punctures other than the origin); None for the origin chart
    rho: Option<f64>,
}

fn weight(patches: &[Patch], which: usize, z: C64) -> f64 {
    let bump = |p: &Patch| {
        let rho = p.rho.unwrap();
        smooth_step(((z - p.center).norm() - 0.5 * rho) / (0.5 * rho))
    };
    match patches[which].rho {
        Some(_) => bump(&patches[which]),
        None => 1.0 - patches.iter().filter(|p| p.rho.is_some()).map(bump).sum::<f64>(),
    }
}

/// `int_0^{2 pi} G e^{2s} w dtheta` on the circle `|z - c| = e^s`.
fn ring(data: &WeierstrassData, patches: &[Patch], which: usize, s: f64, n0: usize) -> Result<C64> {
    let c = patches[which].center;
    let r = s.exp();
    let eval = |k: usize, n: usize| -> Result<(C64, f64)> {
        let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
        let z = c + C64::from_polar(r, th);
        let w = weight(patches, which, z);
        if w == 0.0 {
            return Ok((C64::default(), 0.0));
        }
        let j = data.jet(z)?;
        let v = 4.0 * w * (j.ldphi + j.ldpsi.conj() - 2.0 * j.ld + 2.0 * s).exp();
        if !v.is_finite() {
            return Err(Error::NonConvergent(format!("area integrand blows up near {z}")));
        }
        Ok((v, v.norm()))
    };
    let mut n = n0;
    let sum = |n: usize| -> Result<(C64, f64)> {
        let mut t = C64::default();
        let mut a = 0.0;
        for k in 0..n {
            let (v, m) = eval(k, n)?;
            t += v;
            a += m;
        }
        let h = 2.0 * PI / n as f64;
        Ok((t * h, a * h))
    };
    let (mut prev, _) = sum(n)?;
    loop {
        n *= 2;
        let (cur, abs) = sum(n)?;
        if (cur - prev).norm() <= 1e-10 * abs + 1e-300 {
            return Ok(cur);
        }
        if n >= 1 << 16 {
            return Err(Error::NonConvergent(format!("angular resolution exhausted at radius {r:.3e}")));
        }
        prev = cur;
    }
}

fn radial(data: &WeierstrassData, patches: &[Patch], which: usize, a: f64, b: f64, cfg: &Config) -> Result<(C64, f64)> {
    if b <= a {
        return Ok((C64::default(), 0.0));
    }
    let f = |s: f64| -> Result<[C64; 1]> { Ok([ring(data, patches, which, s, cfg.area_theta)?]) };
    let (v, e) = adaptive(&f, a, b, 1e-2 * cfg.area_tol)?;
    Ok((v[0], e))
}

/// Integrates `4 phi' conj(psi') / (phi - conj psi)^2 du dv` over an exhaustion
/// of the domain: a log-polar chart about the origin reaching out toward
/// infinity, plus a smoothly cut-off log-polar patch about every other finite
/// puncture. All margins shrink by 4x per level; the level sums are
/// Aitken-extrapolated.
pub fn total_curvature_area(data: &WeierstrassData, cfg: &Config) -> Result<TotalCurvature> {
    let dom = data.domain();
    let origin = Point::finite(0.0, 0.0);
    let others: Vec<C64> = dom.finite_punctures().into_iter().filter(|z| z.norm() > 1e-12).collect();
    let mut special: Vec<C64> = data.finite_singularities();
    special.push(C64::default());
    let mut patches = vec![Patch { center: C64::default(), rho: None }];
    for &p in &others {
        let d = special.iter().map(|q| (q - p).norm()).filter(|&d| d > 1e-12).fold(f64::INFINITY, f64::min);
        patches.push(Patch { center: p, rho: Some((0.5 * d).min(1.0)) });
    }
    let far = special.iter().map(|q| q.norm()).fold(0.0, f64::max);
    let inner0 = if dom.is_puncture(origin) { base_radius(data, origin, 0.25) } else { 0.25f64.min(base_radius(data, origin, 0.25)) };
    let outer0 = (2.0 * far).max(4.0);
    // the origin chart starts as [inner0, outer0]; patches as [rho/4, rho]
    let mut total = C64::default();
    let mut qerr = 0.0;
    {
        let (v, e) = radial(data, &patches, 0, inner0.ln(), outer0.ln(), cfg)?;
        total += v;
        qerr += e;
        for i in 1..patches.len() {
            let rho = patches[i].rho.unwrap();
            let (v, e) = radial(data, &patches, i, (0.25 * rho).ln(), rho.ln(), cfg)?;
            total += v;
            qerr += e;
        }
    }
    let step = 4f64.ln();
    let mut levels = vec![total];
    let mut incs: Vec<f64> = Vec::new();
    let mut acc: Vec<C64> = Vec::new();
    for k in 0..cfg.area_levels {
        let kf = k as f64;
        let mut inc = C64::default();
        let lo = inner0.ln() - step * kf;
        let (v, e) = radial(data, &patches, 0, lo - step, lo, cfg)?;
        inc += v;
        qerr += e;
        let hi = outer0.ln() + step * kf;
        let (v, e) = radial(data, &patches, 0, hi, hi + step, cfg)?;
        inc += v;
        qerr += e;
        for i in 1..patches.len() {
            let top = (0.25 * patches[i].rho.unwrap()).ln() - step * kf;
            let (v, e) = radial(data, &patches, i, top - step, top, cfg)?;
            inc += v;
            qerr += e;
        }
        total += inc;
        levels.push(total);
        incs.push(inc.norm());
        let n = levels.len();
        if n >= 3 {
            acc.push(aitken(levels[n - 3], levels[n - 2], levels[n - 1]));
        }
        let m = acc.len();
        let tol = cfg.area_tol * (1.0 + total.norm());
        if m >= 3 {
            let last = acc[m - 1];
            let spread = (last - acc[m - 2]).norm().max((last - acc[m - 3]).norm());
            let shrinking = incs[incs.len() - 1] <= incs[incs.len() - 2] * 0.95 || incs[incs.len() - 1] <= 1e-3 * tol;
            if spread <= tol && shrinking {
                return Ok(TotalCurvature {
                    k_total: -last.re,
                    kperp_total: last.im,
                    method: Method::Area,
                    certified: true,
                    error: spread + qerr,
                    dual: None,
                    terms: Vec::new(),
                });
            }
        }
        let j = incs.len() - 1;
        let grows = (j >= 2 && incs[j] > incs[j - 2] * 1.05) || (j >= 1 && incs[j] > incs[j - 1] * 2.0);
        if grows && incs[j] > tol {
            return Err(Error::NonConvergent(format!(
                "area exhaustion grows: increment {:.3e} at level {k}",
                incs[incs.len() - 1]
            )));
        }
    }
    Err(Error::NonConvergent("margin extrapolation did not settle".into()))
}

/// One identity of the Gauss-Bonnet ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ledger {
    pub deg_phi: u32,
    pub deg_psi: u32,
    pub rows: Vec<LedgerRow>,
}

impl Ledger {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn failures(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| !r.ok)
            .map(|r| format!("{}: {} vs {} (off by {:.3e})", r.name, r.lhs, r.rhs, r.residual))
            .collect()
    }
}

pub const LEDGER_TOL: f64 = 1e-3;

/// Every degree / index / multiplicity identity for the total curvature,
/// each set against the contour total.
pub fn ledger_rows(data: &WeierstrassData, ends: &[EndRecord], total: &TotalCurvature) -> Result<Ledger> {
    if !data.is_algebraic() {
        return Err(Error::NotAlgebraic);
    }
    let dp = data.phi().degree()?;
    let ds = data.psi().degree()?;
    let mut sum_ind = 0i32;
    let mut sum_plus = 0i32;
    let mut sum_dt = 0i32;
    for e in ends {
        match e.kind {
            EndKind::BadSingular => return Err(Error::BadEnd(e.puncture.to_string())),
            EndKind::Transcendental => return Err(Error::NotAlgebraic),
            _ => {}
        }
        let ind = e.index.ok_or_else(|| Error::InconsistentLedger(format!("no index at {}", e.puncture)))?;
        sum_ind += ind;
        sum_plus += ind.abs();
        sum_dt += e.d_tilde.ok_or_else(|| Error::InconsistentLedger(format!("no multiplicity at {}", e.puncture)))?;
    }
    let r = ends.len() as f64;
    let k = total.k_total;
    let tol = LEDGER_TOL;
    let row = |name: &'static str, lhs: f64, rhs: f64, tol: f64| LedgerRow { name, lhs, rhs, residual: (lhs - rhs).abs(), ok: (lhs - rhs).abs() <= tol };
    let (dpf, dsf) = (dp as f64, ds as f64);
    let (si, sp) = (sum_ind as f64, sum_plus as f64);
    let q = k / (-4.0 * PI);
    let mut rows = vec![
        row("deg0", total.kperp_total, 0.0, tol),
        row("deg1", k, -4.0 * PI * dpf + 2.0 * PI * (sp + si), tol),
        row("deg2", k, -4.0 * PI * dsf + 2.0 * PI * (sp - si), tol),
        row("deg3", si, dpf - dsf, 0.0),
        row("deg4", k, -2.0 * PI * (dpf + dsf - sp), tol),
        row("jorge_meeks", k, 2.0 * PI * (2.0 - r - sum_dt as f64), tol),
        row("quantization", q, q.round().max(1.0), tol),
    ];
    let bound = 4.0 * PI * (1.0 - r);
    rows.push(LedgerRow { name: "chern_osserman", lhs: k, rhs: bound, residual: (k - bound).max(0.0), ok: k <= bound + tol });
    Ok(Ledger { deg_phi: dp, deg_psi: ds, rows })
}

/// Like `ledger_rows`, but any failed identity is an error.
pub fn gauss_bonnet_ledger(data: &WeierstrassData, ends: &[EndRecord], total: &TotalCurvature) -> Result<Ledger> {
    let l = ledger_rows(data, ends, total)?;
    if l.pass() {
        Ok(l)
    } else {
        Err(Error::InconsistentLedger(l.failures().join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdata::PuncturedSphere;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn catenoid(t: f64) -> WeierstrassData {
        let phi = MeroExpr::linear(c(-t, 0.0));
        let psi = MeroExpr::linear(c(t, 0.0)).recip().unwrap().neg();
        let dh = MeroExpr::linear(c(t, 0.0)).mul(&MeroExpr::monomial(c(1.0, 0.0), -2));
        let dom = PuncturedSphere::new(vec![Point::finite(0.0, 0.0), Point::Infinity]).unwrap();
        WeierstrassData::new("cat", phi, psi, dh, dom).unwrap()
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-0.1), 1.0);
        assert_eq!(smooth_step(1.1), 0.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn catenoid_contour() {
        let t = total_curvature_contour(&catenoid(0.5), &Config::default()).unwrap();
        assert!((t.k_total + 4.0 * PI).abs() < 1e-8, "{t:?}");
        assert!(t.kperp_total.abs() < 1e-8);
        assert!(t.certified);
        for term in &t.terms {
            let p = term.phi_predicted.unwrap();
            assert!((term.phi_side - p).norm() < 1e-6, "{term:?}");
        }
    }

    #[test]
    fn minimal_case_has_nonpositive_curvature() {
        let d = catenoid(0.0);
        for z in [c(0.3, 0.4), c(-2.0, 1.0), c(0.1, -0.7)] {
            let s = curvature_at(&d, z).unwrap();
            assert!(s.k <= 0.0 && s.kperp.abs() < 1e-12 * s.k.abs().max(1.0));
        }
        assert!(hopf_consistency(&d, &[c(0.3, 0.4), c(1.5, -0.2)]).unwrap() < 1e-12);
    }

    #[test]
    fn catenoid_area() {
        let t = total_curvature_area(&catenoid(0.5), &Config::default()).unwrap();
        assert!((t.k_total + 4.0 * PI).abs() < 1e-3, "{t:?}");
        assert!(t.kperp_total.abs() < 1e-3);
    }
}
