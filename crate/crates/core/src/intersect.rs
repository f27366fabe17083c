//! Self-intersections of a sampled immersion.

use crate::config::Config;
use crate::mesh::SurfaceMesh;
use crate::wdata::{immerse, PathSpec, WeierstrassData};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub position: [f64; 4],
    /// distinct preimages
    pub preimages: Vec<C64>,
    /// largest `|x(z) - x(w)|` over the refined pairs (0 when unrefined)
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionReport {
    pub clusters: Vec<Cluster>,
    pub candidates: usize,
    pub cell: f64,
    pub refined: bool,
    /// grid distance below which vertex pairs are treated as neighbours
    pub min_grid_gap: usize,
}

impl IntersectionReport {
    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

const GAP: usize = 3;

fn dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

/// Candidate pairs: vertices in the same or adjacent hash cells (cell size
/// twice the longest edge) that are closer than the sum of their local edge
/// lengths but at least `GAP` grid steps apart.
fn candidates(mesh: &SurfaceMesh) -> (Vec<(usize, usize)>, f64) {
    let nv = mesh.vertices.len();
    let mut reach = vec![0.0f64; nv];
    for (a, b) in mesh.edges() {
        let d = dist(&mesh.vertices[a].x, &mesh.vertices[b].x);
        reach[a] = reach[a].max(d);
        reach[b] = reach[b].max(d);
    }
    let cell = 2.0 * reach.iter().cloned().fold(0.0, f64::max);
    if !(cell > 0.0) || !cell.is_finite() {
        return (Vec::new(), cell);
    }
    let key = |x: &[f64; 4]| -> [i64; 4] { [0, 1, 2, 3].map(|k| (x[k] / cell).floor() as i64) };
    let mut table: HashMap<[i64; 4], Vec<usize>> = HashMap::new();
    for (i, v) in mesh.vertices.iter().enumerate() {
        table.entry(key(&v.x)).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = (0..nv)
        .into_par_iter()
        .flat_map_iter(|a| {
            let ka = key(&mesh.vertices[a].x);
            let mut out = Vec::new();
            for off in 0..81i64 {
                let d = [off % 3 - 1, (off / 3) % 3 - 1, (off / 9) % 3 - 1, off / 27 - 1];
                let k = [ka[0] + d[0], ka[1] + d[1], ka[2] + d[2], ka[3] + d[3]];
                if let Some(list) = table.get(&k) {
                    for &b in list {
                        if b > a
                            && mesh.grid_distance(a, b) >= GAP
                            && dist(&mesh.vertices[a].x, &mesh.vertices[b].x) <= reach[a] + reach[b]
                        {
                            out.push((a, b));
                        }
                    }
                }
            }
            out
        })
        .collect();
    pairs.sort_unstable();
    (pairs, cell)
}

/// Position at `z`, integrated from the mesh vertex `v`.
fn position(data: &WeierstrassData, mesh: &SurfaceMesh, v: usize, z: C64, cfg: &Config) -> Option<[f64; 4]> {
    let base = &mesh.vertices[v];
    let d = immerse(data, &PathSpec::line(base.z, z), cfg).ok()?;
    Some([0, 1, 2, 3].map(|k| base.x[k] + d[k]))
}

fn jacobian(dz: &[C64; 4], dw: &[C64; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| match c {
        0 => 2.0 * dz[r].re,
        1 => -2.0 * dz[r].im,
        2 => -2.0 * dw[r].re,
        _ => 2.0 * dw[r].im,
    })
}

/// One linearized step from the vertex pair must land within two cells.
fn promising(data: &WeierstrassData, mesh: &SurfaceMesh, a: usize, b: usize, h: f64) -> bool {
    let (va, vb) = (&mesh.vertices[a], &mesh.vertices[b]);
    let (Ok(dz), Ok(dw)) = (data.xz_at(va.z), data.xz_at(vb.z)) else { return false };
    let f = Vector4::from_fn(|k, _| va.x[k] - vb.x[k]);
    match jacobian(&dz, &dw).lu().solve(&(-f)) {
        Some(s) => C64::new(s[0], s[1]).norm() <= 2.0 * h && C64::new(s[2], s[3]).norm() <= 2.0 * h,
        None => false,
    }
}

/// Newton on `x(z) - x(w) = 0` in `(Re z, Im z, Re w, Im w)`.
fn refine(data: &WeierstrassData, mesh: &SurfaceMesh, spacing: &[f64], a: usize, b: usize, cfg: &Config) -> Option<(C64, C64, [f64; 4], f64)> {
    let (za, zb) = (mesh.vertices[a].z, mesh.vertices[b].z);
    let h = spacing[a].max(spacing[b]);
    let (mut z, mut w) = (za, zb);
    if !promising(data, mesh, a, b, h) {
        return None;
    }
    for _ in 0..40 {
        let xz = position(data, mesh, a, z, cfg)?;
        let xw = position(data, mesh, b, w, cfg)?;
        let f = Vector4::from_fn(|k, _| xz[k] - xw[k]);
        let scale = 1.0 + xz.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if f.norm() <= 1e-11 * scale {
            if (z - w).norm() < 1e-6 * (1.0 + z.norm()) {
                return None;
            }
            let mid = [0, 1, 2, 3].map(|k| 0.5 * (xz[k] + xw[k]));
            return Some((z, w, mid, f.norm()));
        }
        let (dz, dw) = (data.xz_at(z).ok()?, data.xz_at(w).ok()?);
        let j = jacobian(&dz, &dw);
        let step = j.lu().solve(&(-f))?;
        let mut s = C64::new(step[0], step[1]);
        let mut t = C64::new(step[2], step[3]);
        let len = s.norm().max(t.norm());
        if len > h {
            s *= h / len;
            t *= h / len;
        }
        z += s;
        w += t;
        if (z - za).norm() > 4.0 * h || (w - zb).norm() > 4.0 * h {
            return None;
        }
    }
    None
}

/// Scans a mesh for pairs of distant parameter points with nearby images and,
/// with `refine`, solves for exact double points.
pub fn self_intersection_scan(data: &WeierstrassData, mesh: &SurfaceMesh, refine_roots: bool, cfg: &Config) -> IntersectionReport {
    let (pairs, cell) = candidates(mesh);
    let mut clusters: Vec<Cluster> = Vec::new();
    let scale = 1.0 + mesh.vertices.iter().map(|v| v.x.iter().map(|c| c.abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
    let merge = |clusters: &mut Vec<Cluster>, pos: [f64; 4], zs: [C64; 2], res: f64, tol: f64| {
        let i = match clusters.iter().position(|c| dist(&c.position, &pos) <= tol) {
            Some(i) => i,
            None => {
                clusters.push(Cluster { position: pos, preimages: Vec::new(), residual: 0.0 });
                clusters.len() - 1
            }
        };
        let c = &mut clusters[i];
        c.residual = c.residual.max(res);
        for z in zs {
            if !c.preimages.iter().any(|q| (q - z).norm() <= 1e-7 * (1.0 + z.norm())) {
                c.preimages.push(z);
            }
        }
    };
    if refine_roots {
        // local chart spacing bounds each Newton step and the search region
        let mut spacing = vec![0.0f64; mesh.vertices.len()];
        for (p, q) in mesh.edges() {
            let d = (mesh.vertices[p].z - mesh.vertices[q].z).norm();
            spacing[p] = spacing[p].max(d);
            spacing[q] = spacing[q].max(d);
        }
        let roots: Vec<_> = pairs.par_iter().filter_map(|&(a, b)| refine(data, mesh, &spacing, a, b, cfg)).collect();
        for (z, w, pos, res) in roots {
            merge(&mut clusters, pos, [z, w], res, 1e-6 * scale);
        }
    } else {
        for &(a, b) in &pairs {
            let (va, vb) = (&mesh.vertices[a], &mesh.vertices[b]);
            let pos = [0, 1, 2, 3].map(|k| 0.5 * (va.x[k] + vb.x[k]));
            merge(&mut clusters, pos, [va.z, vb.z], 0.0, cell);
        }
    }
    for c in &mut clusters {
        c.preimages.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    }
    clusters.sort_by(|p, q| {
        let (a, b) = (p.preimages[0], q.preimages[0]);
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    IntersectionReport { clusters, candidates: pairs.len(), cell, refined: refine_roots, min_grid_gap: GAP }
}
