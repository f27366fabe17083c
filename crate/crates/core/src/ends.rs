//! End classification, winding indices and multiplicities at punctures.

use crate::config::Config;
use crate::error::{Error, Result};
use crate::mfun::{Extended, Mat2, MeroExpr, Point};
use crate::wdata::WeierstrassData;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndKind {
    Regular,
    GoodSingular { m: u32, n: u32 },
    BadSingular,
    Transcendental,
}

impl std::fmt::Display for EndKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EndKind::Regular => write!(f, "regular"),
            EndKind::GoodSingular { m, n } => write!(f, "good_singular({m},{n})"),
            EndKind::BadSingular => write!(f, "bad_singular"),
            EndKind::Transcendental => write!(f, "transcendental"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndRecord {
    pub puncture: Point,
    pub kind: EndKind,
    pub index: Option<i32>,
    pub ind_plus: Option<u32>,
    pub d: Option<i32>,
    pub d_tilde: Option<i32>,
}

/// Index predicted from vanishing orders: m if m < n, -n if m > n.
pub fn predicted_index(m: u32, n: u32) -> Option<i32> {
    match m.cmp(&n) {
        std::cmp::Ordering::Less => Some(m as i32),
        std::cmp::Ordering::Greater => Some(-(n as i32)),
        std::cmp::Ordering::Equal => None,
    }
}

/// The function in the chart at `p` (w = 1/z at infinity) and the chart point.
fn local(f: &MeroExpr, p: Point) -> (MeroExpr, C64) {
    match p {
        Point::Finite(z) => (f.clone(), z),
        Point::Infinity => (f.change_chart_to_infinity(false), C64::default()),
    }
}

/// Smallest j >= 1 with a Taylor coefficient of f at z0 above the threshold.
pub fn vanishing_order(f: &MeroExpr, z0: C64, max: u32) -> Option<u32> {
    let scale = 1.0 + f.eval(z0).ok()?.norm();
    let mut g = f.clone();
    let mut fact = 1.0;
    for j in 1..=max {
        g = g.differentiate();
        fact *= j as f64;
        let a = g.eval(z0).ok()? / fact;
        if a.norm() > 1e-10 * scale {
            return Some(j);
        }
    }
    None
}

fn differs(a: C64, b: C64) -> bool {
    (a - b).norm() > 1e-10 * (1.0 + a.norm().max(b.norm()))
}

/// Regular / good singular / bad singular / transcendental.
pub fn classify_end(data: &WeierstrassData, p: Point) -> Result<EndKind> {
    if data.phi().is_essential_at(p) || data.psi().is_essential_at(p) {
        return Ok(EndKind::Transcendental);
    }
    let (phi, w0) = local(data.phi(), p);
    let (psi, _) = local(data.psi(), p);
    let vp = phi.value_at(Point::Finite(w0))?;
    let vs = psi.value_at(Point::Finite(w0))?;
    match (vp, vs) {
        (Extended::Infinite, Extended::Infinite) => {
            // after z -> -1/z both vanish, to the orders of the poles
            let m = (-phi.order_at(Point::Finite(w0))?) as u32;
            let n = (-psi.order_at(Point::Finite(w0))?) as u32;
            Ok(if m == n { EndKind::BadSingular } else { EndKind::GoodSingular { m, n } })
        }
        (Extended::Finite(a), Extended::Finite(b)) if !differs(a, b.conj()) => {
            let m = vanishing_order(&phi, w0, 40).ok_or_else(|| Error::NotIsolated(format!("phi constant near {p}")))?;
            let n = vanishing_order(&psi, w0, 40).ok_or_else(|| Error::NotIsolated(format!("psi constant near {p}")))?;
            Ok(if m == n { EndKind::BadSingular } else { EndKind::GoodSingular { m, n } })
        }
        _ => Ok(EndKind::Regular),
    }
}

fn ext(v: C64) -> Extended {
    if v.is_finite() {
        Extended::Finite(v)
    } else {
        Extended::Infinite
    }
}

fn apply(m: &Mat2, v: Extended) -> Option<C64> {
    let (num, den) = match v {
        Extended::Finite(x) => (m[0][0] * x + m[0][1], m[1][0] * x + m[1][1]),
        Extended::Infinite => (m[0][0], m[1][0]),
    };
    let q = num / den;
    q.is_finite().then_some(q)
}

fn conj_mat(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

/// A frame change under which neither Gauss map has a pole at the end.
fn normalizing_frame(vp: Extended, vs: Extended) -> Mat2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64, y: f64| C64::new(x, y);
    let cands: [Mat2; 5] = [
        crate::mfun::identity(),
        [[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(0.0, 0.0)]],
        [[c(r, 0.0), c(r, 0.0)], [c(-r, 0.0), c(r, 0.0)]],
        [[c(r, 0.0), c(0.0, r)], [c(0.0, r), c(r, 0.0)]],
        [[c(r, 0.0), c(-r, 0.0)], [c(r, 0.0), c(r, 0.0)]],
    ];
    let health = |m: &Mat2| -> f64 {
        let mc = conj_mat(m);
        let den = |mm: &Mat2, v: Extended| match v {
            Extended::Finite(x) => (mm[1][0] * x + mm[1][1]).norm() / (mm[1][0].norm() * x.norm() + mm[1][1].norm()).max(1e-300),
            Extended::Infinite => mm[1][0].norm() / (mm[1][0].norm() + mm[0][0].norm()).max(1e-300),
        };
        den(m, vp).min(den(&mc, vs))
    };
    let mut best = cands[0];
    let mut bh = health(&best);
    for m in &cands[1..] {
        let h = health(m);
        if h > bh + 1e-12 {
            best = *m;
            bh = h;
        }
    }
    best
}

/// Winding number of `g` around `center` on the circle of radius `r`: sum of
/// argument increments, doubling nodes until every increment is small.
pub fn winding<G: Fn(C64) -> Option<C64>>(g: &G, center: C64, r: f64, n0: usize) -> Result<f64> {
    let mut n = n0.max(16);
    loop {
        let mut total = 0.0;
        let mut worst = 0.0f64;
        let z = |k: usize| center + C64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
        let first = g(z(0)).ok_or_else(|| Error::NotAnInteger(format!("g undefined at r = {r}")))?;
        let mut prev = first;
        for k in 1..=n {
            let cur = if k == n {
                first
            } else {
                g(z(k)).ok_or_else(|| Error::NotAnInteger(format!("g undefined at r = {r}")))?
            };
            if cur == C64::default() || !cur.is_finite() {
                return Err(Error::NotAnInteger(format!("g vanishes or blows up on the circle r = {r}")));
            }
            let inc = (cur / prev).arg();
            worst = worst.max(inc.abs());
            total += inc;
            prev = cur;
        }
        if worst < 0.25 {
            return Ok(total / (2.0 * PI));
        }
        if n >= 1 << 20 {
            return Err(Error::NotAnInteger(format!("winding unresolved at r = {r}")));
        }
        n *= 2;
    }
}

/// Certified winding: agreement of two nested radii, each within 1e-6 of an integer.
pub fn certified_winding<G: Fn(C64) -> Option<C64>>(g: &G, center: C64, r0: f64, n0: usize) -> Result<i32> {
    let mut prev: Option<f64> = None;
    let mut r = r0;
    for _ in 0..12 {
        match winding(g, center, r, n0) {
            Ok(w) => {
                if (w - w.round()).abs() > 1e-6 {
                    return Err(Error::NotAnInteger(format!("{w}")));
                }
                if let Some(p) = prev {
                    if p.round() == w.round() {
                        return Ok(w.round() as i32);
                    }
                }
                prev = Some(w);
            }
            Err(_) => prev = None,
        }
        r *= 0.25;
    }
    Err(Error::NotAnInteger(format!("winding around {center} did not stabilize")))
}

/// Distance from the chart point of `p` to the nearest other special point.
fn chart_radius(data: &WeierstrassData, p: Point) -> f64 {
    let sing = data.finite_singularities();
    let d = match p {
        Point::Finite(z0) => sing.iter().map(|q| (q - z0).norm()).filter(|&d| d > 1e-12).fold(f64::INFINITY, f64::min),
        Point::Infinity => {
            let m = sing.iter().map(|q| q.norm()).fold(0.0, f64::max);
            if m > 0.0 { 1.0 / m } else { f64::INFINITY }
        }
    };
    (0.5 * d).min(0.25)
}

/// Winding of `phi - conj psi` around the end after a frame change that removes
/// poles at the end (the index is invariant under frame changes).
pub fn end_index(data: &WeierstrassData, p: Point, cfg: &Config) -> Result<i32> {
    let kind = classify_end(data, p)?;
    let predicted = match kind {
        EndKind::Regular => 0,
        EndKind::GoodSingular { m, n } => predicted_index(m, n).unwrap(),
        EndKind::BadSingular => return Err(Error::BadEnd(p.to_string())),
        EndKind::Transcendental => {
            return Err(Error::UnsupportedExpr(format!("no index at the essential end {p}")))
        }
    };
    let (phi, w0) = local(data.phi(), p);
    let (psi, _) = local(data.psi(), p);
    let vp = phi.value_at(Point::Finite(w0))?;
    let vs = psi.value_at(Point::Finite(w0))?;
    let a = normalizing_frame(vp, vs);
    let ac = conj_mat(&a);
    let g = |w: C64| -> Option<C64> {
        let x = apply(&a, ext(phi.eval(w).ok()?))?;
        let y = apply(&ac, ext(psi.eval(w).ok()?))?;
        Some(x - y.conj())
    };
    let got = certified_winding(&g, w0, chart_radius(data, p), cfg.winding_nodes)?;
    if got != predicted {
        return Err(Error::InconsistentLedger(format!(
            "winding {got} at {p} disagrees with the vanishing-order prediction {predicted}"
        )));
    }
    Ok(got)
}

/// `(d, d_tilde)`: `d + 1` is the largest pole order of the components of `x_z dz`.
pub fn end_multiplicity(data: &WeierstrassData, p: Point, index: i32) -> Result<(i32, i32)> {
    let mut worst = 0;
    for c in data.xz_components() {
        if c.is_zero() {
            continue;
        }
        let (g, w0) = match p {
            Point::Finite(z) => (c.clone(), z),
            Point::Infinity => (c.change_chart_to_infinity(true), C64::default()),
        };
        if !g.is_single_term() {
            return Err(Error::NotAlgebraic);
        }
        let ord = g.order_at(Point::Finite(w0)).map_err(|_| Error::NotAlgebraic)?;
        worst = worst.max(-ord);
    }
    let d = worst - 1;
    Ok((d, d - index.abs()))
}

/// Classification, index and multiplicity at one puncture; fields that do not
/// apply stay unset.
pub fn end_record(data: &WeierstrassData, p: Point, cfg: &Config) -> Result<EndRecord> {
    let kind = classify_end(data, p)?;
    let index = match kind {
        EndKind::Regular | EndKind::GoodSingular { .. } => Some(end_index(data, p, cfg)?),
        _ => None,
    };
    let md = index.and_then(|i| end_multiplicity(data, p, i).ok());
    Ok(EndRecord {
        puncture: p,
        kind,
        index,
        ind_plus: index.map(|i| i.unsigned_abs()),
        d: md.map(|x| x.0),
        d_tilde: md.map(|x| x.1),
    })
}

pub fn end_records(data: &WeierstrassData, cfg: &Config) -> Result<Vec<EndRecord>> {
    data.domain().punctures().iter().map(|&p| end_record(data, p, cfg)).collect()
}

/// Sum of indices over all zeros of `phi - conj psi` (ends and interior) equals
/// `deg phi - deg psi`.
pub fn index_theorem_check(data: &WeierstrassData, ends: &[EndRecord], interior: &[i32]) -> Result<(i32, i32)> {
    let dphi = data.phi().degree()? as i32;
    let dpsi = data.psi().degree()? as i32;
    let mut total: i32 = interior.iter().sum();
    for e in ends {
        total += e.index.ok_or_else(|| Error::InconsistentLedger(format!("end {} has no index", e.puncture)))?;
    }
    if total != dphi - dpsi {
        return Err(Error::InconsistentLedger(format!(
            "sum of indices {total} != deg phi - deg psi = {}",
            dphi - dpsi
        )));
    }
    Ok((total, dphi - dpsi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdata::PuncturedSphere;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn winding_table() {
        for m in 1..=3u32 {
            for n in 1..=3u32 {
                if m == n {
                    continue;
                }
                let g = |z: C64| Some(z.powu(m) - z.conj().powu(n));
                let w = winding(&g, C64::default(), 0.1, 1024).unwrap();
                let want = predicted_index(m, n).unwrap() as f64;
                assert!((w - want).abs() < 1e-6, "m={m} n={n}: {w}");
            }
        }
    }

    #[test]
    fn classify_catenoid_origin() {
        let t = 0.5;
        let phi = MeroExpr::linear(c(-t, 0.0));
        let psi = MeroExpr::linear(c(t, 0.0)).recip().unwrap().neg();
        let dh = MeroExpr::linear(c(t, 0.0)).mul(&MeroExpr::monomial(c(1.0, 0.0), -2));
        let dom = PuncturedSphere::new(vec![Point::finite(0.0, 0.0), Point::Infinity]).unwrap();
        let d = WeierstrassData::new("cat", phi, psi, dh, dom).unwrap();
        let cfg = Config::default();
        assert_eq!(classify_end(&d, Point::finite(0.0, 0.0)).unwrap(), EndKind::Regular);
        assert_eq!(classify_end(&d, Point::Infinity).unwrap(), EndKind::Regular);
        let r = end_record(&d, Point::finite(0.0, 0.0), &cfg).unwrap();
        assert_eq!((r.index, r.d, r.d_tilde), (Some(0), Some(1), Some(1)));
        let r = end_record(&d, Point::Infinity, &cfg).unwrap();
        assert_eq!((r.index, r.d, r.d_tilde), (Some(0), Some(1), Some(1)));
    }
}
