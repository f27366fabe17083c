//! Parameter-grid meshes of the immersion and their export.

use crate::catalog::Chart;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::wdata::{immerse, PathSpec, Segment, WeierstrassData};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshVertex {
    pub z: C64,
    pub x: [f64; 4],
    pub density: f64,
    /// grid indices
    pub ij: (usize, usize),
}

/// Seam of an annulus chart at `theta`; crossing it in the positive direction
/// adds `offset` to the positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub theta: f64,
    pub offset: [f64; 4],
}

#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    pub chart: Chart,
    /// cells along each grid axis
    pub nu: usize,
    pub nv: usize,
    /// whether the second axis wraps around (closed annulus)
    pub wrap: bool,
    pub vertices: Vec<MeshVertex>,
    /// quads, counterclockwise in the parameter plane
    pub faces: Vec<[usize; 4]>,
    pub cuts: Vec<Cut>,
    /// translation between consecutive sheets of a multi-sheet annulus
    pub sheet_period: Option<[f64; 4]>,
    grid: Vec<Option<usize>>,
}

impl SurfaceMesh {
    fn cols(&self) -> usize {
        if self.wrap {
            self.nv
        } else {
            self.nv + 1
        }
    }

    /// Vertex index at grid position `(i, j)`, if present.
    pub fn at(&self, i: usize, j: usize) -> Option<usize> {
        if i > self.nu || j >= self.cols() {
            return None;
        }
        self.grid[i * self.cols() + j]
    }

    /// Grid distance between two vertices in the max norm (wrapping if closed).
    pub fn grid_distance(&self, a: usize, b: usize) -> usize {
        let (ia, ja) = self.vertices[a].ij;
        let (ib, jb) = self.vertices[b].ij;
        let di = ia.abs_diff(ib);
        let mut dj = ja.abs_diff(jb);
        if self.wrap {
            dj = dj.min(self.nv - dj);
        }
        di.max(dj)
    }

    /// Unordered pairs of grid-adjacent vertices.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.nu {
            for j in 0..self.cols() {
                let Some(a) = self.at(i, j) else { continue };
                if let Some(b) = self.at(i + 1, j) {
                    out.push((a, b));
                }
                let jn = if self.wrap { (j + 1) % self.nv } else { j + 1 };
                if let Some(b) = self.at(i, jn) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Largest relative mismatch between the Lorentz length of an edge and
    /// `sqrt(density) |dz|` at its first endpoint. First order in the spacing.
    pub fn isometry_defect(&self) -> f64 {
        self.edges()
            .iter()
            .map(|&(a, b)| {
                let (va, vb) = (&self.vertices[a], &self.vertices[b]);
                let d: Vec<f64> = (0..4).map(|k| vb.x[k] - va.x[k]).collect();
                let l2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - d[3] * d[3];
                let want = va.density.sqrt() * (vb.z - va.z).norm();
                (l2.max(0.0).sqrt() - want).abs() / want
            })
            .fold(0.0, f64::max)
    }
}

fn chart_point(chart: &Chart, nu: usize, nv: usize, i: usize, j: usize) -> C64 {
    match *chart {
        Chart::Annulus { r_min, r_max, sheets } => {
            let s = r_min.ln() + (r_max.ln() - r_min.ln()) * i as f64 / nu as f64;
            let th = 2.0 * PI * sheets as f64 * j as f64 / nv as f64;
            C64::from_polar(s.exp(), th)
        }
        Chart::Square { half, .. } => C64::new(-half + 2.0 * half * i as f64 / nu as f64, -half + 2.0 * half * j as f64 / nv as f64),
    }
}

fn edge_segment(chart: &Chart, nu: usize, nv: usize, a: (usize, usize), b: (usize, usize)) -> Segment {
    let (za, zb) = (chart_point(chart, nu, nv, a.0, a.1), chart_point(chart, nu, nv, b.0, b.1));
    match *chart {
        Chart::Annulus { sheets, .. } if a.0 == b.0 => {
            let dth = 2.0 * PI * sheets as f64 / nv as f64;
            // neighbours along theta; the wrap edge goes from the last column to 0
            let forward = b.1 == a.1 + 1 || (b.1 == 0 && a.1 + 1 == nv);
            let start = 2.0 * PI * sheets as f64 * a.1 as f64 / nv as f64;
            Segment::Arc { center: C64::default(), radius: za.norm(), start, sweep: if forward { dth } else { -dth } }
        }
        _ => Segment::Line { from: za, to: zb },
    }
}

/// Samples the immersion on the chart grid with `res` cells per axis (per
/// sheet along theta). Positions are integrated along a breadth-first
/// spanning tree of grid edges rooted at the grid center.
pub fn sample_mesh(data: &WeierstrassData, chart: Chart, res: usize, cfg: &Config) -> Result<SurfaceMesh> {
    if res < 16 {
        return Err(Error::Param("mesh resolution must be at least 16".into()));
    }
    let sing = data.xz_singularities();
    let (nu, nv) = match chart {
        Chart::Annulus { r_min, r_max, sheets } => {
            if !(r_min > 0.0 && r_max > r_min) || sheets == 0 {
                return Err(Error::Param("annulus chart needs 0 < r_min < r_max and sheets >= 1".into()));
            }
            (res, res * sheets as usize)
        }
        Chart::Square { half, .. } => {
            if !(half > 0.0) {
                return Err(Error::Param("square chart needs half > 0".into()));
            }
            (res, res)
        }
    };
    // the seam closes when the loop period vanishes
    let mut cuts = Vec::new();
    let mut sheet_period = None;
    let mut wrap = false;
    if let Chart::Annulus { sheets, .. } = chart {
        let r = chart_point(&chart, nu, nv, nu / 2, 0).norm();
        let period = immerse(data, &PathSpec::circle(C64::default(), r, 0.0), cfg)?;
        let half = immerse(data, &PathSpec { segments: vec![Segment::Arc { center: C64::default(), radius: r, start: 0.0, sweep: PI }] }, cfg)?;
        let scale = 1.0 + half.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if sheets == 1 && period.iter().all(|p| p.abs() <= 1e-8 * scale) {
            wrap = true;
        } else {
            cuts.push(Cut { theta: 2.0 * PI * sheets as f64, offset: period.map(|p| p * sheets as f64) });
            sheet_period = Some(period);
        }
    }
    let cols = if wrap { nv } else { nv + 1 };
    let spacing = match chart {
        Chart::Square { half, .. } => 2.0 * half / res as f64,
        _ => 0.0,
    };
    let hole = match chart {
        Chart::Square { hole, .. } => hole.max(spacing * 1e-3),
        _ => 0.0,
    };
    let mut grid = vec![None; (nu + 1) * cols];
    let mut vertices = Vec::new();
    for i in 0..=nu {
        for j in 0..cols {
            let z = chart_point(&chart, nu, nv, i, j);
            if matches!(chart, Chart::Square { .. }) && sing.iter().any(|p| (p - z).norm() < hole) {
                continue;
            }
            grid[i * cols + j] = Some(vertices.len());
            vertices.push(MeshVertex { z, x: [0.0; 4], density: 0.0, ij: (i, j) });
        }
    }
    if vertices.is_empty() {
        return Err(Error::Param("chart removes every vertex".into()));
    }
    let at = |i: usize, j: usize| if i <= nu && j < cols { grid[i * cols + j] } else { None };
    // breadth-first tree without crossing the seam
    let root = at(nu / 2, cols / 2).or_else(|| grid.iter().flatten().next().copied()).unwrap();
    let mut parent = vec![usize::MAX; vertices.len()];
    let mut order = Vec::with_capacity(vertices.len());
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        let (i, j) = vertices[v].ij;
        let nb = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
        for (a, b) in nb {
            if let Some(w) = at(a, b) {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
    }
    if order.len() != vertices.len() {
        return Err(Error::Param("chart grid is disconnected".into()));
    }
    let increments: Vec<Result<[f64; 4]>> = order
        .par_iter()
        .map(|&v| {
            if v == root {
                return Ok([0.0; 4]);
            }
            let p = parent[v];
            let seg = edge_segment(&chart, nu, nv, vertices[p].ij, vertices[v].ij);
            immerse(data, &PathSpec { segments: vec![seg] }, cfg)
        })
        .collect();
    let mut inc = vec![[0.0; 4]; vertices.len()];
    for (&v, r) in order.iter().zip(increments) {
        inc[v] = r?;
    }
    for &v in &order {
        if v != root {
            let p = vertices[parent[v]].x;
            for k in 0..4 {
                vertices[v].x[k] = p[k] + inc[v][k];
            }
        }
    }
    // 2 <x_z, conj x_z>, finite where the Gauss maps have removable poles
    let dens: Vec<Result<f64>> = vertices
        .par_iter()
        .map(|v| {
            let w = data.xz_at(v.z)?;
            Ok(2.0 * (w[0].norm_sqr() + w[1].norm_sqr() + w[2].norm_sqr() - w[3].norm_sqr()))
        })
        .collect();
    for (v, d) in vertices.iter_mut().zip(dens) {
        v.density = d?;
    }
    let mut faces = Vec::new();
    let jmax = if wrap { nv } else { cols - 1 };
    for i in 0..nu {
        for j in 0..jmax {
            let jn = if wrap { (j + 1) % nv } else { j + 1 };
            if let (Some(a), Some(b), Some(c), Some(d)) = (at(i, j), at(i + 1, j), at(i + 1, jn), at(i, jn)) {
                faces.push([a, b, c, d]);
            }
        }
    }
    Ok(SurfaceMesh { chart, nu, nv, wrap, vertices, faces, cuts, sheet_period, grid })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Projection {
    /// drop coordinate `k` (0-based)
    Drop(usize),
    /// level set of `x_3` at 0
    SliceX3,
    /// level set of `x_4` at the given value
    SliceX4(f64),
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Drop(k) => write!(f, "drop-x{}", k + 1),
            Projection::SliceX3 => write!(f, "slice-x3=0"),
            Projection::SliceX4(c) => write!(f, "slice-x4={c}"),
        }
    }
}

impl FromStr for Projection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("drop-x") {
            return match k {
                "1" | "2" | "3" | "4" => Ok(Projection::Drop(k.parse::<usize>().unwrap() - 1)),
                _ => Err(Error::Parse(format!("unknown projection {s}"))),
            };
        }
        if s == "slice-x3=0" {
            return Ok(Projection::SliceX3);
        }
        if let Some(c) = s.strip_prefix("slice-x4=") {
            let v: f64 = c.parse().map_err(|_| Error::Parse(format!("bad slice level in {s}")))?;
            return Ok(Projection::SliceX4(v));
        }
        Err(Error::Parse(format!("unknown projection {s} (drop-x1..drop-x4, slice-x3=0, slice-x4=c)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply,
}

impl Format {
    /// `.ply` gives PLY, anything else OBJ.
    pub fn from_path(p: &Path) -> Format {
        match p.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ply") => Format::Ply,
            _ => Format::Obj,
        }
    }
}

fn keep3(x: &[f64; 4], drop: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    let mut n = 0;
    for (k, &v) in x.iter().enumerate() {
        if k != drop {
            out[n] = v;
            n += 1;
        }
    }
    out
}

/// Polylines of a level set, as segments between points on mesh edges.
fn level_segments(mesh: &SurfaceMesh, coord: usize, level: f64) -> Vec<([f64; 4], [f64; 4])> {
    let mut out = Vec::new();
    for f in &mesh.faces {
        let mut hits = Vec::new();
        for e in 0..4 {
            let (a, b) = (&mesh.vertices[f[e]].x, &mesh.vertices[f[(e + 1) % 4]].x);
            let (fa, fb) = (a[coord] - level, b[coord] - level);
            if (fa < 0.0) != (fb < 0.0) {
                let t = fa / (fa - fb);
                let mut p = [0.0; 4];
                for k in 0..4 {
                    p[k] = a[k] + t * (b[k] - a[k]);
                }
                hits.push(p);
            }
        }
        // 2 or 4 crossings; pair them in order around the quad
        for pair in hits.chunks_exact(2) {
            out.push((pair[0], pair[1]));
        }
    }
    out
}

/// Renders the mesh under a projection. Drops give surfaces, slices polylines.
pub fn render(mesh: &SurfaceMesh, proj: Projection, format: Format) -> String {
    let mut s = String::new();
    match proj {
        Projection::Drop(k) => {
            let pts: Vec<[f64; 3]> = mesh.vertices.iter().map(|v| keep3(&v.x, k)).collect();
            match format {
                Format::Obj => {
                    let _ = writeln!(s, "# {proj}, {} vertices, {} quads", pts.len(), mesh.faces.len());
                    for p in &pts {
                        let _ = writeln!(s, "v {:.12e} {:.12e} {:.12e}", p[0], p[1], p[2]);
                    }
                    for f in &mesh.faces {
                        let _ = writeln!(s, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
                    }
                }
                Format::Ply => {
                    let _ = write!(
                        s,
                        "ply\nformat ascii 1.0\ncomment {proj}\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
                        pts.len(),
                        mesh.faces.len()
                    );
                    for p in &pts {
                        let _ = writeln!(s, "{:.12e} {:.12e} {:.12e}", p[0], p[1], p[2]);
                    }
                    for f in &mesh.faces {
                        let _ = writeln!(s, "4 {} {} {} {}", f[0], f[1], f[2], f[3]);
                    }
                }
            }
        }
        Projection::SliceX3 | Projection::SliceX4(_) => {
            let (coord, level) = match proj {
                Projection::SliceX3 => (2, 0.0),
                Projection::SliceX4(c) => (3, c),
                _ => unreachable!(),
            };
            let segs = level_segments(mesh, coord, level);
            match format {
                Format::Obj => {
                    let _ = writeln!(s, "# {proj}, {} segments", segs.len());
                    for (a, b) in &segs {
                        for p in [a, b] {
                            let q = keep3(p, coord);
                            let _ = writeln!(s, "v {:.12e} {:.12e} {:.12e}", q[0], q[1], q[2]);
                        }
                    }
                    for n in 0..segs.len() {
                        let _ = writeln!(s, "l {} {}", 2 * n + 1, 2 * n + 2);
                    }
                }
                Format::Ply => {
                    let _ = write!(
                        s,
                        "ply\nformat ascii 1.0\ncomment {proj}\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement edge {}\nproperty int vertex1\nproperty int vertex2\nend_header\n",
                        2 * segs.len(),
                        segs.len()
                    );
                    for (a, b) in &segs {
                        for p in [a, b] {
                            let q = keep3(p, coord);
                            let _ = writeln!(s, "{:.12e} {:.12e} {:.12e}", q[0], q[1], q[2]);
                        }
                    }
                    for n in 0..segs.len() {
                        let _ = writeln!(s, "{} {}", 2 * n, 2 * n + 1);
                    }
                }
            }
        }
    }
    s
}

/// Writes the rendered mesh; the format follows the file extension.
pub fn export_mesh(mesh: &SurfaceMesh, proj: Projection, path: &Path) -> Result<()> {
    let text = render(mesh, proj, Format::from_path(path));
    let mut f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn projection_names_round_trip() {
        for s in ["drop-x1", "drop-x2", "drop-x3", "drop-x4", "slice-x3=0", "slice-x4=0.5"] {
            assert_eq!(s.parse::<Projection>().unwrap().to_string(), s);
        }
        assert!("drop-x5".parse::<Projection>().is_err());
        assert!("slice-x4=".parse::<Projection>().is_err());
    }

    #[test]
    fn ccw_quads_on_square() {
        let e = catalog::graph1().unwrap();
        let m = sample_mesh(&e.data, Chart::Square { half: 1.0, hole: 0.0 }, 16, &Config::default()).unwrap();
        assert_eq!(m.vertices.len(), 17 * 17);
        assert_eq!(m.faces.len(), 256);
        for f in &m.faces {
            let z: Vec<C64> = f.iter().map(|&k| m.vertices[k].z).collect();
            let area: f64 = (0..4).map(|k| (z[k].conj() * z[(k + 1) % 4]).im).sum::<f64>() / 2.0;
            assert!(area > 0.0);
        }
    }

    #[test]
    fn closed_annulus_wraps() {
        let e = catalog::catenoid(0.5, 1.0).unwrap();
        let m = sample_mesh(&e.data, Chart::Annulus { r_min: 0.1, r_max: 10.0, sheets: 1 }, 16, &Config::default()).unwrap();
        assert!(m.wrap && m.cuts.is_empty());
        assert_eq!(m.faces.len(), 16 * 16);
    }

    #[test]
    fn open_seam_records_period() {
        let e = catalog::helicoid(0.5, C64::new(0.0, 1.0)).unwrap();
        let m = sample_mesh(&e.data, Chart::Annulus { r_min: 0.1, r_max: 10.0, sheets: 1 }, 16, &Config::default()).unwrap();
        assert!(!m.wrap);
        assert_eq!(m.faces.len(), 16 * 16);
        // 2 Re(2 pi i * 2 lambda) in the third coordinate
        assert!((m.cuts[0].offset[2] + 8.0 * PI).abs() < 1e-8, "{:?}", m.cuts);
        for i in 0..=16 {
            let (a, b) = (m.at(i, 0).unwrap(), m.at(i, 16).unwrap());
            for k in 0..4 {
                assert!((m.vertices[b].x[k] - m.vertices[a].x[k] - m.cuts[0].offset[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn resolution_floor() {
        let e = catalog::graph1().unwrap();
        assert!(sample_mesh(&e.data, Chart::Square { half: 1.0, hole: 0.0 }, 8, &Config::default()).is_err());
    }
}
