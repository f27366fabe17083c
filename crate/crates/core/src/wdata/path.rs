use super::WeierstrassData;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// `center + radius e^{i(start + t sweep)}`, t in [0, 1]
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn at(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + t * sweep),
        }
    }

    /// dz/dt
    pub fn velocity(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => {
                C64::new(0.0, sweep) * C64::from_polar(radius, start + t * sweep)
            }
        }
    }

    /// Euclidean distance from `p` to the segment.
    pub fn distance(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let l2 = d.norm_sqr();
                if l2 == 0.0 {
                    return (p - from).norm();
                }
                let t = (((p - from) * d.conj()).re / l2).clamp(0.0, 1.0);
                (p - (from + d * t)).norm()
            }
            Segment::Arc { center, radius, start, sweep } => {
                let w = p - center;
                let ang = w.arg();
                let full = sweep.abs() >= 2.0 * std::f64::consts::PI;
                let rel = if sweep >= 0.0 { ang - start } else { start - ang };
                let rel = rel.rem_euclid(2.0 * std::f64::consts::PI);
                if full || rel <= sweep.abs() {
                    (w.norm() - radius).abs()
                } else {
                    (p - self.at(0.0)).norm().min((p - self.at(1.0)).norm())
                }
            }
        }
    }
}

/// Piecewise path made of line segments and circular arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub segments: Vec<Segment>,
}

impl PathSpec {
    pub fn line(a: C64, b: C64) -> Self {
        PathSpec { segments: vec![Segment::Line { from: a, to: b }] }
    }

    pub fn polyline(pts: &[C64]) -> Self {
        PathSpec { segments: pts.windows(2).map(|w| Segment::Line { from: w[0], to: w[1] }).collect() }
    }

    /// Full counterclockwise circle starting at angle `start`.
    pub fn circle(center: C64, radius: f64, start: f64) -> Self {
        PathSpec {
            segments: vec![Segment::Arc { center, radius, start, sweep: 2.0 * std::f64::consts::PI }],
        }
    }

    pub fn then(mut self, s: Segment) -> Self {
        self.segments.push(s);
        self
    }

    pub fn basepoint(&self) -> Option<C64> {
        self.segments.first().map(|s| s.at(0.0))
    }

    pub fn endpoint(&self) -> Option<C64> {
        self.segments.last().map(|s| s.at(1.0))
    }
}

/// `2 Re int_path x_z dz` by adaptive Gauss-Kronrod, with `x(basepoint) = 0`.
pub fn immerse(data: &WeierstrassData, path: &PathSpec, cfg: &Config) -> Result<[f64; 4]> {
    let sing = data.xz_singularities();
    for s in &path.segments {
        for &p in &sing {
            let d = s.distance(p);
            if d < cfg.clearance {
                return Err(Error::Clearance(format!("path passes within {d:.3e} of {p}")));
            }
        }
    }
    let mut total = [0.0f64; 4];
    let mut err = 0.0;
    for s in &path.segments {
        let f = |t: f64| -> Result<[C64; 4]> {
            let v = data.xz_at(s.at(t))?;
            let dz = s.velocity(t);
            Ok([v[0] * dz, v[1] * dz, v[2] * dz, v[3] * dz])
        };
        let (v, e) = quad::adaptive(&f, 0.0, 1.0, cfg.immerse_tol)?;
        for i in 0..4 {
            total[i] += 2.0 * v[i].re;
        }
        err += 2.0 * e;
    }
    let norm = total.iter().map(|x| x * x).sum::<f64>().sqrt();
    if err > 1e-9 * (1.0 + norm) {
        return Err(Error::Quadrature(format!("error estimate {err:.3e} too large")));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfun::{MeroExpr, Point};
    use crate::wdata::PuncturedSphere;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn family(t: f64, lambda: C64) -> WeierstrassData {
        let phi = MeroExpr::linear(c(-t, 0.0));
        let psi = MeroExpr::linear(c(t, 0.0)).recip().unwrap().neg();
        let dh = MeroExpr::linear(c(t, 0.0)).mul(&MeroExpr::monomial(lambda, -2));
        let dom = PuncturedSphere::new(vec![Point::finite(0.0, 0.0), Point::Infinity]).unwrap();
        WeierstrassData::new("fam", phi, psi, dh, dom).unwrap()
    }

    #[test]
    fn zero_length_path() {
        let d = family(0.5, c(1.0, 0.0));
        let x = immerse(&d, &PathSpec::line(c(1.0, 1.0), c(1.0, 1.0)), &Config::default()).unwrap();
        assert_eq!(x, [0.0; 4]);
    }

    #[test]
    fn catenoid_loop_closes() {
        let d = family(0.5, c(1.0, 0.0));
        let x = immerse(&d, &PathSpec::circle(C64::default(), 0.3, 0.1), &Config::default()).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-8), "{x:?}");
    }

    #[test]
    fn helicoid_loop_shifts_third_coordinate() {
        // (1 - phi psi) h' = 2 lambda / z, so x3 changes by 2 Re(4 pi i lambda)
        let d = family(0.5, c(0.0, 1.0));
        let x = immerse(&d, &PathSpec::circle(C64::default(), 0.3, 0.1), &Config::default()).unwrap();
        assert!((x[2] + 8.0 * PI).abs() < 1e-8, "{x:?}");
        assert!(x[0].abs() < 1e-8 && x[1].abs() < 1e-8 && x[3].abs() < 1e-8);
    }

    #[test]
    fn clearance_enforced() {
        let d = family(0.5, c(1.0, 0.0));
        let r = immerse(&d, &PathSpec::line(c(-1.0, 0.0), c(1.0, 0.0)), &Config::default());
        assert!(matches!(r, Err(Error::Clearance(_))));
    }

    #[test]
    fn arc_distance() {
        let s = Segment::Arc { center: C64::default(), radius: 1.0, start: 0.0, sweep: PI / 2.0 };
        assert!((s.distance(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((s.distance(c(-2.0, 0.0)) - 5f64.sqrt()).abs() < 1e-12);
    }
}
