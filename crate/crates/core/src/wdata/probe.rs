use super::WeierstrassData;
use crate::config::Config;
use crate::mfun::Point;
use crate::quad::gauss_legendre;
use num_complex::Complex64 as C64;

/// Heuristic completeness verdict from the growth of arc length along a ray.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessProbe {
    pub puncture: Point,
    pub divergent: bool,
    /// `ds ~ rho^exponent |d rho|` as the chart distance rho to the puncture shrinks
    pub ds_exponent: f64,
    pub density_exponent: f64,
    /// arc length of each octave shell, outermost first
    pub shells: Vec<f64>,
}

/// Integrates `sqrt(density) |dz|` along a ray into the puncture over octave
/// shells `rho_j = rho0 2^-j` and fits `log(shell length)` against `log rho`.
/// A slope at or below zero means the total length diverges.
pub fn completeness_probe(data: &WeierstrassData, p: Point, cfg: &Config) -> CompletenessProbe {
    let sing = data.finite_singularities();
    let dir = C64::from_polar(1.0, cfg.probe_angle);
    // chart point and |dz/drho| for chart distance rho
    let (rho0, map): (f64, Box<dyn Fn(f64) -> (C64, f64)>) = match p {
        Point::Finite(z0) => {
            let d = sing.iter().map(|q| (q - z0).norm()).filter(|&d| d > 1e-12).fold(f64::INFINITY, f64::min);
            ((0.5 * d).min(0.5), Box::new(move |rho| (z0 + dir * rho, 1.0)))
        }
        Point::Infinity => {
            let m = sing.iter().map(|q| q.norm()).fold(0.0, f64::max);
            let rho0 = (0.5 / m.max(1e-300)).min(0.5);
            (rho0, Box::new(move |rho: f64| (dir / rho, 1.0 / (rho * rho))))
        }
    };
    let (x, w) = gauss_legendre(16);
    let mut shells = Vec::new();
    let mut logr = Vec::new();
    let mut logs = Vec::new();
    for j in 0..cfg.probe_steps {
        let hi = rho0 * 0.5f64.powi(j as i32);
        let lo = 0.5 * hi;
        // substitute rho = e^s over [ln lo, ln hi]
        let (a, b) = (lo.ln(), hi.ln());
        let mut s = 0.0;
        let mut ok = true;
        for (xi, wi) in x.iter().zip(&w) {
            let sv = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let rho = sv.exp();
            let (z, jac) = map(rho);
            match data.jet(z) {
                Ok(jt) => {
                    let v = (0.5 * jt.log_density()).exp() * jac * rho;
                    if !v.is_finite() {
                        ok = false;
                        break;
                    }
                    s += wi * v;
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        let s = s * 0.5 * (b - a);
        if !(s > 0.0) || !s.is_finite() {
            break;
        }
        shells.push(s);
        logr.push(hi.ln());
        logs.push(s.ln());
    }
    // least-squares slope over the inner half of the shells
    let n = logr.len();
    let from = n / 2;
    let slope = if n - from >= 2 {
        let xs = &logr[from..];
        let ys = &logs[from..];
        let m = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / m;
        let my = ys.iter().sum::<f64>() / m;
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    } else {
        f64::NEG_INFINITY
    };
    let ds_exponent = slope - 1.0;
    CompletenessProbe {
        puncture: p,
        divergent: slope <= 0.05,
        ds_exponent,
        density_exponent: 2.0 * ds_exponent,
        shells,
    }
}
