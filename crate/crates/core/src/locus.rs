//! Solutions of `phi(z) = conj(psi(z))`: grid scan, damped Newton refinement,
//! and isolated-point versus curve classification.

use crate::config::Config;
use crate::ends::{certified_winding, predicted_index, vanishing_order};
use crate::error::{Error, Result};
use crate::wdata::WeierstrassData;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    Annulus { r_min: f64, r_max: f64 },
    Disc { radius: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Window::Annulus { r_min, r_max } => write!(f, "annulus:{r_min},{r_max}"),
            Window::Disc { radius } => write!(f, "disc:{radius}"),
            Window::Rect { x0, x1, y0, y1 } => write!(f, "rect:{x0},{x1},{y0},{y1}"),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;
    /// `annulus:RMIN,RMAX`, `disc:R` or `rect:X0,X1,Y0,Y1`
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("bad window {s}")))?;
        let nums: Vec<f64> = rest
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number in window {s}"))))
            .collect::<Result<_>>()?;
        let w = match (kind.trim(), nums.as_slice()) {
            ("annulus", [a, b]) if 0.0 < *a && a < b => Window::Annulus { r_min: *a, r_max: *b },
            ("disc", [r]) if *r > 0.0 => Window::Disc { radius: *r },
            ("rect", [a, b, c, d]) if a < b && c < d => Window::Rect { x0: *a, x1: *b, y0: *c, y1: *d },
            _ => return Err(Error::Parse(format!("bad window {s}"))),
        };
        Ok(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocusPoint {
    pub z: C64,
    pub residual: f64,
    /// `|phi'| = |psi'|` at the root: the real Jacobian is singular
    pub degenerate: bool,
    pub m: Option<u32>,
    pub n: Option<u32>,
    /// winding of `phi - conj psi` around the root
    pub winding: Option<i32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocusKind {
    Empty,
    IsolatedPoints,
    Curve,
    Mixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocusFinding {
    pub kind: LocusKind,
    pub points: Vec<LocusPoint>,
    pub curves: Vec<Vec<C64>>,
    pub window: Window,
    pub grid: usize,
    /// smallest |phi - conj psi| relative to 1 + |phi| seen on the grid
    pub min_rel: f64,
}

impl LocusFinding {
    pub fn is_empty(&self) -> bool {
        self.kind == LocusKind::Empty
    }

    /// Every root and curve sample.
    pub fn all_points(&self) -> Vec<C64> {
        self.points.iter().map(|p| p.z).chain(self.curves.iter().flatten().copied()).collect()
    }
}

/// `(F, dF/dz, dF/dzbar)` with `F = phi - conj psi`, or None at a singularity.
fn eval_f(data: &WeierstrassData, z: C64) -> Option<(C64, C64, C64, f64)> {
    let p = data.phi().eval(z).ok()?;
    let s = data.psi().eval(z).ok()?;
    let dp = data.dphi().eval(z).ok()?;
    let ds = data.dpsi().eval(z).ok()?;
    let f = p - s.conj();
    if !(f.is_finite() && dp.is_finite() && ds.is_finite()) {
        return None;
    }
    Some((f, dp, -ds.conj(), p.norm()))
}

pub fn residual_ok(data: &WeierstrassData, z: C64) -> Option<f64> {
    let (f, _, _, pn) = eval_f(data, z)?;
    let r = f.norm();
    (r <= 1e-10 * (1.0 + pn)).then_some(r)
}

/// Levenberg-Marquardt on the real 2x2 system; handles the rank-one Jacobian
/// met along curves of solutions.
fn refine(data: &WeierstrassData, z0: C64) -> Option<C64> {
    let mut z = z0;
    let mut mu = 1e-3;
    let (mut f, mut fz, mut fzb, _) = eval_f(data, z)?;
    for _ in 0..200 {
        if residual_ok(data, z).is_some() {
            return Some(z);
        }
        // columns: dF/dx = F_z + F_zbar, dF/dy = i (F_z - F_zbar)
        let cx = fz + fzb;
        let cy = C64::new(0.0, 1.0) * (fz - fzb);
        let j = [[cx.re, cy.re], [cx.im, cy.im]];
        let r = [f.re, f.im];
        let jtj = [
            [j[0][0] * j[0][0] + j[1][0] * j[1][0], j[0][0] * j[0][1] + j[1][0] * j[1][1]],
            [j[0][1] * j[0][0] + j[1][1] * j[1][0], j[0][1] * j[0][1] + j[1][1] * j[1][1]],
        ];
        let jtr = [j[0][0] * r[0] + j[1][0] * r[1], j[0][1] * r[0] + j[1][1] * r[1]];
        let scale = jtj[0][0] + jtj[1][1];
        if !(scale > 0.0) {
            return None;
        }
        let mut improved = false;
        for _ in 0..30 {
            let a = jtj[0][0] + mu * scale;
            let d = jtj[1][1] + mu * scale;
            let b = jtj[0][1];
            let det = a * d - b * b;
            let dx = -(d * jtr[0] - b * jtr[1]) / det;
            let dy = -(a * jtr[1] - b * jtr[0]) / det;
            let zn = z + C64::new(dx, dy);
            if let Some((fnew, a2, b2, _)) = eval_f(data, zn) {
                if fnew.norm() < f.norm() {
                    z = zn;
                    f = fnew;
                    fz = a2;
                    fzb = b2;
                    mu = (mu * 0.1).max(1e-15);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            return residual_ok(data, z).map(|_| z);
        }
    }
    residual_ok(data, z).map(|_| z)
}

struct Grid {
    pts: Vec<Option<C64>>,
    spacing: Vec<f64>,
}

fn build_grid(w: &Window, n: usize) -> Grid {
    let mut pts = Vec::with_capacity(n * n);
    let mut spacing = Vec::with_capacity(n * n);
    match *w {
        Window::Annulus { r_min, r_max } => {
            let (a, b) = (r_min.ln(), r_max.ln());
            let ds = (b - a) / (n - 1) as f64;
            let dt = 2.0 * PI / n as f64;
            for i in 0..n {
                let r = (a + ds * i as f64).exp();
                for k in 0..n {
                    pts.push(Some(C64::from_polar(r, dt * k as f64)));
                    spacing.push(r * ds.max(dt));
                }
            }
            Grid { pts, spacing }
        }
        Window::Disc { radius } => {
            let h = 2.0 * radius / (n - 1) as f64;
            for i in 0..n {
                for k in 0..n {
                    let z = C64::new(-radius + h * i as f64, -radius + h * k as f64);
                    pts.push((z.norm() <= radius).then_some(z));
                    spacing.push(h);
                }
            }
            Grid { pts, spacing }
        }
        Window::Rect { x0, x1, y0, y1 } => {
            let hx = (x1 - x0) / (n - 1) as f64;
            let hy = (y1 - y0) / (n - 1) as f64;
            for i in 0..n {
                for k in 0..n {
                    pts.push(Some(C64::new(x0 + hx * i as f64, y0 + hy * k as f64)));
                    spacing.push(hx.max(hy));
                }
            }
            Grid { pts, spacing }
        }
    }
}

/// Grid scan, refinement and classification on one window.
pub fn scan(data: &WeierstrassData, window: Window, grid_n: usize) -> Result<LocusFinding> {
    if grid_n < 64 {
        return Err(Error::Param(format!("grid_n = {grid_n} < 64")));
    }
    let g = build_grid(&window, grid_n);
    let vals: Vec<Option<(f64, f64, f64)>> = g
        .pts
        .par_iter()
        .map(|z| {
            let (f, fz, fzb, pn) = eval_f(data, (*z)?)?;
            Some((f.norm(), fz.norm() + fzb.norm(), pn))
        })
        .collect();
    let mut min_rel = f64::INFINITY;
    let mut seeds = Vec::new();
    for (idx, v) in vals.iter().enumerate() {
        let Some((fa, grad, pn)) = *v else { continue };
        min_rel = min_rel.min(fa / (1.0 + pn));
        if fa < 10.0 * g.spacing[idx] * grad {
            seeds.push(g.pts[idx].unwrap());
        }
    }
    let roots: Vec<C64> = seeds.par_iter().filter_map(|&z| refine(data, z)).collect();
    let inside = |z: C64| match window {
        Window::Annulus { r_min, r_max } => z.norm() >= r_min * (1.0 - 1e-9) && z.norm() <= r_max * (1.0 + 1e-9),
        Window::Disc { radius } => z.norm() <= radius * (1.0 + 1e-9),
        Window::Rect { x0, x1, y0, y1 } => z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1,
    };
    let mut uniq: Vec<C64> = Vec::new();
    for z in roots.into_iter().filter(|z| inside(*z)) {
        if !uniq.iter().any(|q| (q - z).norm() < 1e-8 * (1.0 + z.norm())) {
            uniq.push(z);
        }
    }
    uniq.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    classify(data, window, grid_n, uniq, min_rel)
}

fn spacing_at(w: &Window, n: usize, z: C64) -> f64 {
    match *w {
        Window::Annulus { r_min, r_max } => {
            let ds = (r_max / r_min).ln() / (n - 1) as f64;
            z.norm() * ds.max(2.0 * PI / n as f64)
        }
        Window::Disc { radius } => 2.0 * radius / (n - 1) as f64,
        Window::Rect { x0, x1, y0, y1 } => (x1 - x0).max(y1 - y0) / (n - 1) as f64,
    }
}

fn classify(data: &WeierstrassData, window: Window, grid: usize, roots: Vec<C64>, min_rel: f64) -> Result<LocusFinding> {
    // single-linkage components at a few grid spacings
    let hs: Vec<f64> = roots.iter().map(|&z| spacing_at(&window, grid, z)).collect();
    let n = roots.len();
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..n {
                if comp[j] == usize::MAX && (roots[i] - roots[j]).norm() <= 4.0 * hs[i].max(hs[j]) {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        comps.push(members);
    }
    let mut points = Vec::new();
    let mut curves = Vec::new();
    for members in comps {
        let pts: Vec<C64> = members.iter().map(|&i| roots[i]).collect();
        if pts.len() >= 8 {
            if let Some(chain) = as_chain(&pts) {
                curves.push(chain);
                continue;
            }
        }
        for z in pts {
            points.push(point_record(data, z));
        }
    }
    let kind = match (points.is_empty(), curves.is_empty()) {
        (true, true) => LocusKind::Empty,
        (false, true) => LocusKind::IsolatedPoints,
        (true, false) => LocusKind::Curve,
        (false, false) => LocusKind::Mixed,
    };
    Ok(LocusFinding { kind, points, curves, window, grid, min_rel })
}

/// Orders points along a nearest-neighbour chain and accepts it when the
/// turning between consecutive steps stays small.
fn as_chain(pts: &[C64]) -> Option<Vec<C64>> {
    let c: C64 = pts.iter().sum::<C64>() / pts.len() as f64;
    let start = (0..pts.len()).max_by(|&a, &b| (pts[a] - c).norm().partial_cmp(&(pts[b] - c).norm()).unwrap())?;
    let mut used = vec![false; pts.len()];
    let mut chain = vec![pts[start]];
    used[start] = true;
    let mut cur = start;
    for _ in 1..pts.len() {
        let next = (0..pts.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| (pts[a] - pts[cur]).norm().partial_cmp(&(pts[b] - pts[cur]).norm()).unwrap())?;
        used[next] = true;
        chain.push(pts[next]);
        cur = next;
    }
    let mut good = 0;
    let mut total = 0;
    for w in chain.windows(3) {
        let (a, b) = (w[1] - w[0], w[2] - w[1]);
        if a.norm() == 0.0 || b.norm() == 0.0 {
            continue;
        }
        total += 1;
        if (a * b.conj()).re / (a.norm() * b.norm()) > 0.5 {
            good += 1;
        }
    }
    (total > 0 && good as f64 >= 0.8 * total as f64).then_some(chain)
}

fn point_record(data: &WeierstrassData, z: C64) -> LocusPoint {
    let (f, fz, fzb, _) = eval_f(data, z).unwrap();
    let (a, b) = (fz.norm(), fzb.norm());
    let degenerate = (a - b).abs() <= 1e-6 * (a + b).max(1e-300);
    let (m, n) = (vanishing_order(data.phi(), z, 20), vanishing_order(data.psi(), z, 20));
    let winding = winding_at(data, z).ok();
    LocusPoint { z, residual: f.norm(), degenerate, m, n, winding }
}

fn winding_at(data: &WeierstrassData, z0: C64) -> Result<i32> {
    let d = data
        .finite_singularities()
        .iter()
        .map(|q| (q - z0).norm())
        .filter(|&d| d > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let r = (0.25 * d).min(1e-2 * (1.0 + z0.norm()));
    let g = |z: C64| eval_f(data, z).map(|v| v.0);
    certified_winding(&g, z0, r, 1024)
}

/// Multiplicities of `phi - phi(z0)` and `psi - psi(z0)` and the index at an
/// isolated root; `index` is None when `m = n` (the point is of bad type).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalData {
    pub m: u32,
    pub n: u32,
    pub winding: i32,
    pub index: Option<i32>,
}

pub fn local_data(data: &WeierstrassData, z0: C64) -> Result<LocalData> {
    let m = vanishing_order(data.phi(), z0, 40).ok_or_else(|| Error::NotIsolated(format!("phi constant at {z0}")))?;
    let n = vanishing_order(data.psi(), z0, 40).ok_or_else(|| Error::NotIsolated(format!("psi constant at {z0}")))?;
    let winding = winding_at(data, z0).map_err(|e| Error::NotIsolated(format!("{z0}: {e}")))?;
    let index = predicted_index(m, n);
    if let Some(i) = index {
        if i != winding {
            return Err(Error::InconsistentLedger(format!("winding {winding} at {z0}, multiplicities predict {i}")));
        }
    }
    Ok(LocalData { m, n, winding, index })
}

/// Windows covering the domain away from its ends.
pub fn default_windows(data: &WeierstrassData, cfg: &Config) -> Vec<Window> {
    let dom = data.domain();
    let origin_punctured = dom.finite_punctures().iter().any(|z| z.norm() < 1e-12);
    let (a, b) = cfg.locus_annulus;
    let mut w = Vec::new();
    if origin_punctured {
        w.push(Window::Annulus { r_min: a, r_max: b });
        if dom.contains_infinity() {
            w.push(Window::Annulus { r_min: b, r_max: 1e2 * b });
        }
    } else {
        w.push(Window::Disc { radius: cfg.locus_disc });
        if dom.contains_infinity() {
            w.push(Window::Annulus { r_min: cfg.locus_disc, r_max: 1e3 * cfg.locus_disc });
        }
    }
    w
}

/// Pass iff every window scans empty.
pub fn regularity_verdict(data: &WeierstrassData, windows: &[Window], grid_n: usize) -> Result<(bool, Vec<LocusFinding>)> {
    let mut out = Vec::new();
    for w in windows {
        out.push(scan(data, *w, grid_n)?);
    }
    Ok((out.iter().all(|f| f.is_empty()), out))
}

/// Scan of the family `phi = z^m (z+a)`, `psi = z^{m+1}/(z+b)`, `b = 1 - a`.
pub fn fourpi_scan(m: u32, a: C64, cfg: &Config) -> Result<LocusFinding> {
    let e = crate::catalog::fourpi(m, a)?;
    let (r0, r1) = cfg.locus_annulus;
    scan(&e.data, Window::Annulus { r_min: r0, r_max: r1 }, cfg.locus_grid)
}
