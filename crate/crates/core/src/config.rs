//! Tunable tolerances, schedules and node counts, read from `key = value` text.

use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

pub const ENV_VAR: &str = "SSLAB_CONFIG";
pub const DEFAULT_PATH: &str = "sslab.conf";

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// trapezoid nodes on period circles
    pub period_nodes: usize,
    pub period_radius_cap: f64,
    pub period_tol: f64,
    /// minimum distance between an integration path and a singularity
    pub clearance: f64,
    pub immerse_tol: f64,
    /// contour schedule: r_j = r0 2^-j, R_j = big0 2^j, j = 0..=steps
    pub contour_r0: f64,
    pub contour_big0: f64,
    pub contour_steps: usize,
    pub contour_conv: f64,
    pub winding_nodes: usize,
    /// area method: number of margin refinements (each shrinks the margins 4x)
    pub area_levels: usize,
    pub area_theta: usize,
    pub area_tol: f64,
    pub probe_angle: f64,
    pub probe_steps: usize,
    pub locus_grid: usize,
    pub locus_annulus: (f64, f64),
    pub locus_disc: f64,
    pub mesh_res: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            period_nodes: 512,
            period_radius_cap: 0.5,
            period_tol: 1e-9,
            clearance: 1e-6,
            immerse_tol: 1e-11,
            contour_r0: 0.5,
            contour_big0: 4.0,
            contour_steps: 20,
            contour_conv: 1e-6,
            winding_nodes: 1024,
            area_levels: 12,
            area_theta: 128,
            area_tol: 1e-4,
            probe_angle: 0.5,
            probe_steps: 40,
            locus_grid: 256,
            locus_annulus: (1e-2, 1e2),
            locus_disc: 10.0,
            mesh_res: 64,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("bad value for {key}: {v}")))
}

impl Config {
    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Config> {
        let mut c = Config::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", ln + 1)))?;
            let k = k.trim();
            match k {
                "period.nodes" => c.period_nodes = num(k, v)?,
                "period.radius_cap" => c.period_radius_cap = num(k, v)?,
                "period.tol" => c.period_tol = num(k, v)?,
                "clearance" => c.clearance = num(k, v)?,
                "immerse.tol" => c.immerse_tol = num(k, v)?,
                "contour.r0" => c.contour_r0 = num(k, v)?,
                "contour.big0" => c.contour_big0 = num(k, v)?,
                "contour.steps" => c.contour_steps = num(k, v)?,
                "contour.conv" => c.contour_conv = num(k, v)?,
                "winding.nodes" => c.winding_nodes = num(k, v)?,
                "area.levels" => c.area_levels = num(k, v)?,
                "area.theta" => c.area_theta = num(k, v)?,
                "area.tol" => c.area_tol = num(k, v)?,
                "probe.angle" => c.probe_angle = num(k, v)?,
                "probe.steps" => c.probe_steps = num(k, v)?,
                "locus.grid" => c.locus_grid = num(k, v)?,
                "locus.annulus" => {
                    let (a, b) = v
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("{k} expects two numbers")))?;
                    c.locus_annulus = (num(k, a)?, num(k, b)?);
                }
                "locus.disc" => c.locus_disc = num(k, v)?,
                "mesh.res" => c.mesh_res = num(k, v)?,
                _ => return Err(Error::Parse(format!("line {}: unknown key {k}", ln + 1))),
            }
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    /// Path from `SSLAB_CONFIG`, else `sslab.conf` in the working directory.
    pub fn default_path() -> PathBuf {
        std::env::var_os(ENV_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_PATH))
    }

    /// Loads the file at `default_path()`; a missing default file means defaults,
    /// a missing file named by the environment variable is an error.
    pub fn load() -> Result<Config> {
        let p = Config::default_path();
        if p.exists() {
            Config::from_file(&p)
        } else if std::env::var_os(ENV_VAR).is_some() {
            Err(Error::Io(format!("config file {} not found", p.display())))
        } else {
            Ok(Config::default())
        }
    }
}
