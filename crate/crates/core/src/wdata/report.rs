use super::WeierstrassData;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::mfun::{MeroExpr, Point};
use crate::quad::circle_trapezoid;
use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    /// poles of phi and psi never coincide inside the domain
    pub poles_disjoint: bool,
    /// zeros of dh are exactly the interior poles of phi or psi, with equal orders
    pub zeros_match: bool,
    /// some points could not be examined (multi-term transcendental input)
    pub partial: bool,
    pub essential: Vec<Point>,
    pub details: Vec<String>,
    /// emptiness of the singular locus, attached by the caller
    pub locus_empty: Option<bool>,
}

impl RegularityReport {
    pub fn pass(&self) -> bool {
        self.poles_disjoint && self.zeros_match && self.locus_empty != Some(false)
    }
}

fn order(f: &MeroExpr, p: Point, as_form: bool) -> Option<i32> {
    match p {
        Point::Finite(_) => f.order_at(p).ok(),
        Point::Infinity => {
            let g = f.change_chart_to_infinity(as_form);
            g.order_at(Point::Finite(C64::default())).ok()
        }
    }
}

/// Checks regularity conditions 1 and 2 pointwise at every candidate point of
/// the domain interior (zeros and poles of the ingredients, and infinity when
/// it is not a puncture).
pub fn regularity_report(data: &WeierstrassData) -> RegularityReport {
    let dom = data.domain();
    let mut rep = RegularityReport {
        poles_disjoint: true,
        zeros_match: true,
        partial: false,
        essential: Vec::new(),
        details: Vec::new(),
        locus_empty: None,
    };
    let mut candidates: Vec<Point> = Vec::new();
    for f in [data.phi(), data.psi(), data.dh()] {
        for e in f.essential_points() {
            if !rep.essential.contains(&e) {
                rep.essential.push(e);
            }
        }
        match f.zeros_and_poles() {
            Ok(inv) => {
                for (z, _) in inv.finite {
                    let p = Point::Finite(z);
                    if !dom.is_puncture(p) && !candidates.iter().any(|q| q.approx_eq(&p, 1e-9)) {
                        candidates.push(p);
                    }
                }
            }
            Err(_) => rep.partial = true,
        }
    }
    for e in &rep.essential {
        if !dom.is_puncture(*e) {
            rep.zeros_match = false;
            rep.details.push(format!("essential singularity at interior point {e}"));
        }
    }
    if dom.contains_infinity() && !rep.essential.contains(&Point::Infinity) {
        candidates.push(Point::Infinity);
    }
    for p in candidates {
        let (Some(op), Some(os), Some(oh)) =
            (order(data.phi(), p, false), order(data.psi(), p, false), order(data.dh(), p, true))
        else {
            rep.partial = true;
            continue;
        };
        if op < 0 && os < 0 {
            rep.poles_disjoint = false;
            rep.details.push(format!("phi and psi both have poles at {p}"));
        }
        if oh < 0 {
            rep.zeros_match = false;
            rep.details.push(format!("dh has a pole of order {} at interior point {p}", -oh));
            continue;
        }
        let need = (-op).max(0) + (-os).max(0);
        if oh != need {
            rep.zeros_match = false;
            rep.details.push(format!("at {p}: dh vanishes to order {oh}, poles of phi/psi need {need}"));
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodRow {
    pub puncture: Point,
    pub radius: f64,
    pub phi_dh: C64,
    pub psi_dh: C64,
    pub dh: C64,
    pub phipsi_dh: C64,
    pub scale: f64,
    pub antisym_ok: bool,
    pub re_dh_ok: bool,
    pub re_phipsi_ok: bool,
}

impl PeriodRow {
    pub fn pass(&self) -> bool {
        self.antisym_ok && self.re_dh_ok && self.re_phipsi_ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodTable {
    pub rows: Vec<PeriodRow>,
}

impl PeriodTable {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass())
    }
}

fn loop_integrals(forms: &[MeroExpr; 4], center: C64, r: f64, n: usize, at_inf: bool) -> Result<([C64; 4], f64)> {
    let mut out = [C64::default(); 4];
    let mut scale = 1.0f64;
    for (i, f) in forms.iter().enumerate() {
        let g = |z: C64| f.eval(z);
        let v = circle_trapezoid(&g, center, r, n)?;
        let mut abs = 0.0;
        for k in 0..n {
            let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64);
            abs += f.eval(center + r * e)?.norm();
        }
        scale = scale.max(abs * 2.0 * std::f64::consts::PI * r / n as f64);
        // the loop around infinity is positively oriented in the chart w = 1/z
        out[i] = if at_inf { -v } else { v };
    }
    Ok((out, scale))
}

/// The four periods on a certified small loop around every puncture.
pub fn period_report(data: &WeierstrassData, cfg: &Config) -> Result<PeriodTable> {
    let phi_dh = data.phi().mul(data.dh());
    let psi_dh = data.psi().mul(data.dh());
    let pp_dh = data.phi().mul(data.psi()).mul(data.dh());
    let forms = [phi_dh, psi_dh, data.dh().clone(), pp_dh];
    let sing = data.finite_singularities();
    let mut rows = Vec::new();
    for &p in data.domain().punctures() {
        let (center, r, r2, at_inf) = match p {
            Point::Finite(z0) => {
                let d = sing
                    .iter()
                    .map(|q| (q - z0).norm())
                    .filter(|&d| d > 1e-12)
                    .fold(f64::INFINITY, f64::min);
                let r = (0.5 * d).min(cfg.period_radius_cap);
                (z0, r, 0.5 * r, false)
            }
            Point::Infinity => {
                let m = sing.iter().map(|q| q.norm()).fold(0.0, f64::max);
                let big = (1.0 / cfg.period_radius_cap).max(2.0 * m);
                (C64::default(), big, 2.0 * big, true)
            }
        };
        let (a, sa) = loop_integrals(&forms, center, r, cfg.period_nodes, at_inf)?;
        let (b, sb) = loop_integrals(&forms, center, r2, cfg.period_nodes, at_inf)?;
        let scale = sa.max(sb);
        let tol = cfg.period_tol * scale;
        for i in 0..4 {
            if (a[i] - b[i]).norm() > tol {
                return Err(Error::NonConvergent(format!(
                    "period at {p}: radii {r} and {r2} give {} and {}",
                    a[i], b[i]
                )));
            }
        }
        rows.push(PeriodRow {
            puncture: p,
            radius: r,
            phi_dh: a[0],
            psi_dh: a[1],
            dh: a[2],
            phipsi_dh: a[3],
            scale,
            antisym_ok: (a[0] + a[1].conj()).norm() <= tol,
            re_dh_ok: a[2].re.abs() <= tol,
            re_phipsi_ok: a[3].re.abs() <= tol,
        });
    }
    Ok(PeriodTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdata::PuncturedSphere;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn family(t: f64, lambda: C64, dh_override: Option<MeroExpr>) -> WeierstrassData {
        let phi = MeroExpr::linear(c(-t, 0.0));
        let psi = MeroExpr::linear(c(t, 0.0)).recip().unwrap().neg();
        let dh = dh_override.unwrap_or_else(|| MeroExpr::linear(c(t, 0.0)).mul(&MeroExpr::monomial(lambda, -2)));
        let dom = PuncturedSphere::new(vec![Point::finite(0.0, 0.0), Point::Infinity]).unwrap();
        WeierstrassData::new("fam", phi, psi, dh, dom).unwrap()
    }

    #[test]
    fn catenoid_regular() {
        let r = regularity_report(&family(0.5, c(1.0, 0.0), None));
        assert!(r.pass(), "{r:?}");
        assert!(!r.partial);
    }

    #[test]
    fn corrupted_height_fails_condition_two() {
        let r = regularity_report(&family(0.5, c(1.0, 0.0), Some(MeroExpr::real(1.0))));
        assert!(r.poles_disjoint);
        assert!(!r.zeros_match, "{r:?}");
    }

    #[test]
    fn periods_pass_and_fail() {
        let cfg = Config::default();
        assert!(period_report(&family(0.5, c(1.0, 0.0), None), &cfg).unwrap().pass());
        let lambda = c(0.0, 1.0);
        let t = period_report(&family(0.5, lambda, None), &cfg).unwrap();
        assert!(!t.pass());
        let row0 = &t.rows[0];
        assert!((row0.dh.re + 2.0 * PI * lambda.im).abs() < 1e-9);
    }
}
