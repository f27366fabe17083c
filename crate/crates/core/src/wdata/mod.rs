//! Weierstrass data, the immersion `x = 2 Re int x_z dz`, and the checks that
//! decide whether it defines a regular, single-valued, complete surface.

mod path;
mod probe;
mod report;

pub use path::{immerse, PathSpec, Segment};
pub use probe::{completeness_probe, CompletenessProbe};
pub use report::{period_report, regularity_report, PeriodRow, PeriodTable, RegularityReport};

use crate::error::{Error, Result};
use crate::mfun::{parse, Mat2, MeroExpr, Point};
use num_complex::Complex64 as C64;

/// Genus-zero domain: the sphere minus finitely many punctures.
#[derive(Clone, Debug, PartialEq)]
pub struct PuncturedSphere {
    punctures: Vec<Point>,
}

impl PuncturedSphere {
    pub fn new(punctures: Vec<Point>) -> Result<Self> {
        for (i, p) in punctures.iter().enumerate() {
            for q in &punctures[i + 1..] {
                if p.approx_eq(q, 1e-12) {
                    return Err(Error::Param(format!("duplicate puncture {p}")));
                }
            }
        }
        Ok(PuncturedSphere { punctures })
    }

    pub fn punctures(&self) -> &[Point] {
        &self.punctures
    }

    pub fn finite_punctures(&self) -> Vec<C64> {
        self.punctures
            .iter()
            .filter_map(|p| match p {
                Point::Finite(z) => Some(*z),
                Point::Infinity => None,
            })
            .collect()
    }

    pub fn contains_infinity(&self) -> bool {
        !self.punctures.contains(&Point::Infinity)
    }

    pub fn is_puncture(&self, p: Point) -> bool {
        self.punctures.iter().any(|q| q.approx_eq(&p, 1e-10))
    }
}

/// `(phi, psi, h')` over a punctured sphere, with the derived quantities cached.
#[derive(Clone, Debug)]
pub struct WeierstrassData {
    pub label: String,
    phi: MeroExpr,
    psi: MeroExpr,
    dh: MeroExpr,
    domain: PuncturedSphere,
    dphi: MeroExpr,
    dpsi: MeroExpr,
    xz: [MeroExpr; 4],
    degenerate: bool,
}

fn ci() -> C64 {
    C64::new(0.0, 1.0)
}

/// The four components of `x_z` built from `phi, psi, h'`.
pub fn xz_from(phi: &MeroExpr, psi: &MeroExpr, dh: &MeroExpr) -> [MeroExpr; 4] {
    let one = MeroExpr::real(1.0);
    let pp = phi.mul(psi);
    [
        phi.add(psi).mul(dh),
        phi.sub(psi).scale(-ci()).mul(dh),
        one.sub(&pp).mul(dh),
        one.add(&pp).mul(dh),
    ]
}

impl WeierstrassData {
    /// Standard constructor; rejects constant Gauss maps.
    pub fn new(label: &str, phi: MeroExpr, psi: MeroExpr, dh: MeroExpr, domain: PuncturedSphere) -> Result<Self> {
        if phi.is_constant() || psi.is_constant() {
            return Err(Error::Param(format!(
                "{label}: constant Gauss map (use the degenerate constructor to opt in)"
            )));
        }
        Ok(Self::build(label, phi, psi, dh, domain, false))
    }

    /// Allows constant `phi` or `psi` (surfaces lying in a degenerate hyperplane).
    pub fn new_degenerate(label: &str, phi: MeroExpr, psi: MeroExpr, dh: MeroExpr, domain: PuncturedSphere) -> Self {
        Self::build(label, phi, psi, dh, domain, true)
    }

    fn build(label: &str, phi: MeroExpr, psi: MeroExpr, dh: MeroExpr, domain: PuncturedSphere, degenerate: bool) -> Self {
        let xz = xz_from(&phi, &psi, &dh);
        WeierstrassData {
            label: label.to_string(),
            dphi: phi.differentiate(),
            dpsi: psi.differentiate(),
            phi,
            psi,
            dh,
            domain,
            xz,
            degenerate,
        }
    }

    /// Recovers `phi = (v1 + i v2)/(v3 + v4)`, `psi = (v1 - i v2)/(v3 + v4)`,
    /// `h' = (v3 + v4)/2` from explicit `x_z` components (algebraic only).
    pub fn from_xz(label: &str, v: [MeroExpr; 4], domain: PuncturedSphere) -> Result<Self> {
        if !v.iter().all(|c| c.is_algebraic()) {
            return Err(Error::NotAlgebraic);
        }
        let s = v[2].add(&v[3]);
        let a = v[0].add(&v[1].scale(ci()));
        let b = v[0].sub(&v[1].scale(ci()));
        let phi = a.div(&s)?;
        let psi = b.div(&s)?;
        let dh = s.scale(C64::new(0.5, 0.0));
        Self::new(label, phi, psi, dh, domain)
    }

    pub fn phi(&self) -> &MeroExpr {
        &self.phi
    }
    pub fn psi(&self) -> &MeroExpr {
        &self.psi
    }
    pub fn dh(&self) -> &MeroExpr {
        &self.dh
    }
    pub fn dphi(&self) -> &MeroExpr {
        &self.dphi
    }
    pub fn dpsi(&self) -> &MeroExpr {
        &self.dpsi
    }
    pub fn domain(&self) -> &PuncturedSphere {
        &self.domain
    }
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn is_algebraic(&self) -> bool {
        self.phi.is_algebraic() && self.psi.is_algebraic() && self.dh.is_algebraic()
    }

    /// `(phi + psi, -i(phi - psi), 1 - phi psi, 1 + phi psi) h'`.
    pub fn xz_components(&self) -> &[MeroExpr; 4] {
        &self.xz
    }

    pub fn xz_at(&self, z: C64) -> Result<[C64; 4]> {
        Ok([self.xz[0].eval(z)?, self.xz[1].eval(z)?, self.xz[2].eval(z)?, self.xz[3].eval(z)?])
    }

    /// Finite points where some ingredient is singular: finite punctures, poles of
    /// `phi`, `psi`, `h'`, and the origin when an exponent has a pole there.
    pub fn finite_singularities(&self) -> Vec<C64> {
        let mut v = self.domain.finite_punctures();
        for f in [&self.phi, &self.psi, &self.dh] {
            for p in f.finite_singularities() {
                if !v.iter().any(|q| (q - p).norm() < 1e-12) {
                    v.push(p);
                }
            }
        }
        v
    }

    /// Finite punctures and finite singularities of the `x_z` components; the
    /// immersion integrand is smooth everywhere else.
    pub fn xz_singularities(&self) -> Vec<C64> {
        let mut v = self.domain.finite_punctures();
        for f in &self.xz {
            for p in f.finite_singularities() {
                if !v.iter().any(|q| (q - p).norm() < 1e-12) {
                    v.push(p);
                }
            }
        }
        v
    }

    /// Log-space evaluation of everything the curvature formulas need.
    pub fn jet(&self, z: C64) -> Result<Jet> {
        let lphi = self.phi.log_eval(z)?;
        let lpsi = self.psi.log_eval(z)?;
        let ldphi = self.dphi.log_eval(z)?;
        let ldpsi = self.dpsi.log_eval(z)?;
        let lh = self.dh.log_eval(z)?;
        Ok(Jet::new(z, lphi, lpsi, ldphi, ldpsi, lh))
    }

    /// `e^{2w} = 4 |phi - conj psi|^2 |h'|^2`, the density of the induced metric.
    pub fn metric_density(&self, z: C64) -> Result<f64> {
        Ok(self.jet(z)?.density())
    }

    /// `phi -> (a phi + b)/(c phi + d)`, `psi -> (conj a psi + conj b)/(conj c psi + conj d)`,
    /// `h' -> (c phi + d)(conj c psi + conj d) h'`.
    pub fn lorentz_frame_change(&self, m: &Mat2) -> Result<WeierstrassData> {
        if !self.is_algebraic() {
            return Err(Error::NotAlgebraic);
        }
        let mc: Mat2 = [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]];
        let phi = self.phi.mobius(m)?;
        let psi = self.psi.mobius(&mc)?;
        let f1 = self.phi.scale(m[1][0]).add(&MeroExpr::constant(m[1][1]));
        let f2 = self.psi.scale(mc[1][0]).add(&MeroExpr::constant(mc[1][1]));
        let dh = f1.mul(&f2).mul(&self.dh);
        Ok(Self::build(&self.label, phi, psi, dh, self.domain.clone(), self.degenerate))
    }

    /// Reads the data-file format:
    /// `label = ...`, `phi = <expr>`, `psi = <expr>`, `dh = <expr>`,
    /// `punctures = 0, inf`, optional `degenerate = true`.
    pub fn from_text(text: &str) -> Result<WeierstrassData> {
        let mut label = String::from("data");
        let (mut phi, mut psi, mut dh, mut punct) = (None, None, None, Vec::new());
        let mut degenerate = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", ln + 1)))?;
            match k.trim() {
                "label" => label = v.trim().to_string(),
                "phi" => phi = Some(parse(v)?),
                "psi" => psi = Some(parse(v)?),
                "dh" => dh = Some(parse(v)?),
                "punctures" => {
                    for s in v.split(',').filter(|s| !s.trim().is_empty()) {
                        punct.push(s.parse::<Point>()?);
                    }
                }
                "degenerate" => degenerate = v.trim() == "true",
                other => return Err(Error::Parse(format!("line {}: unknown key {other}", ln + 1))),
            }
        }
        let miss = |n: &str| Error::Parse(format!("missing {n}"));
        let (phi, psi, dh) = (phi.ok_or_else(|| miss("phi"))?, psi.ok_or_else(|| miss("psi"))?, dh.ok_or_else(|| miss("dh"))?);
        let domain = PuncturedSphere::new(punct)?;
        if degenerate {
            Ok(Self::new_degenerate(&label, phi, psi, dh, domain))
        } else {
            Self::new(&label, phi, psi, dh, domain)
        }
    }

    pub fn to_text(&self) -> String {
        let p: Vec<String> = self.domain.punctures().iter().map(|p| p.to_string()).collect();
        let mut s = format!(
            "label = {}\nphi = {}\npsi = {}\ndh = {}\npunctures = {}\n",
            self.label,
            self.phi,
            self.psi,
            self.dh,
            p.join(", ")
        );
        if self.degenerate {
            s.push_str("degenerate = true\n");
        }
        s
    }
}

/// Lorentz product with signature (+, +, +, -), bilinear (no conjugation).
pub fn lorentz(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// Relative isotropy residual `|<v, v>| / (1 + |v|^2)` maximized over points.
pub fn isotropy_residual(xz: &[MeroExpr; 4], points: &[C64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in points {
        let v = [xz[0].eval(z)?, xz[1].eval(z)?, xz[2].eval(z)?, xz[3].eval(z)?];
        let n2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        worst = worst.max(lorentz(&v, &v).norm() / (1.0 + n2));
    }
    Ok(worst)
}

pub fn lorentz_isotropy_check(data: &WeierstrassData, points: &[C64]) -> Result<f64> {
    isotropy_residual(data.xz_components(), points)
}

/// Relative residual of `density = 2 <x_z, conj x_z>` over points.
pub fn metric_identity_residual(data: &WeierstrassData, points: &[C64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in points {
        let v = data.xz_at(z)?;
        let vb = [v[0].conj(), v[1].conj(), v[2].conj(), v[3].conj()];
        let rhs = 2.0 * lorentz(&v, &vb).re;
        let d = data.metric_density(z)?;
        worst = worst.max((d - rhs).abs() / d.abs().max(rhs.abs()).max(1e-300));
    }
    Ok(worst)
}

/// Logarithms of `phi, psi, phi', psi', h'` at a point plus `log(phi - conj psi)`.
/// Everything derived is formed from these, so exponential factors of any
/// size stay representable.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub z: C64,
    pub lphi: C64,
    pub lpsi: C64,
    pub ldphi: C64,
    pub ldpsi: C64,
    pub lh: C64,
    /// log(phi - conj psi)
    pub ld: C64,
}

impl Jet {
    pub fn new(z: C64, lphi: C64, lpsi: C64, ldphi: C64, ldpsi: C64, lh: C64) -> Jet {
        let lpb = lpsi.conj();
        let one = C64::new(1.0, 0.0);
        let ld = if lphi.re == f64::NEG_INFINITY && lpb.re == f64::NEG_INFINITY {
            C64::new(f64::NEG_INFINITY, 0.0)
        } else if lphi.re >= lpb.re {
            lphi + (one - (lpb - lphi).exp()).ln()
        } else {
            lpb + ((lphi - lpb).exp() - one).ln()
        };
        Jet { z, lphi, lpsi, ldphi, ldpsi, lh, ld }
    }

    /// Relative size of `|phi - conj psi|` against the larger of the two.
    pub fn separation(&self) -> f64 {
        let m = self.lphi.re.max(self.lpsi.re);
        (self.ld.re - m).exp()
    }

    pub fn density(&self) -> f64 {
        4.0 * (2.0 * (self.ld + self.lh).re).exp()
    }

    pub fn log_density(&self) -> f64 {
        4f64.ln() + 2.0 * (self.ld + self.lh).re
    }

    /// `4 phi' conj(psi') / (phi - conj psi)^2`
    pub fn area_integrand(&self) -> C64 {
        4.0 * (self.ldphi + self.ldpsi.conj() - 2.0 * self.ld).exp()
    }

    /// `phi' / (phi - conj psi)`
    pub fn f_phi(&self) -> C64 {
        (self.ldphi - self.ld).exp()
    }

    /// `conj(psi') / (phi - conj psi)`
    pub fn f_psi(&self) -> C64 {
        (self.ldpsi.conj() - self.ld).exp()
    }

    /// `-K + i K_perp`
    pub fn curvature(&self) -> C64 {
        (self.ldphi + self.ldpsi.conj() - 2.0 * self.ld - 2.0 * (self.ld + self.lh).re).exp()
    }

    pub fn theta(&self) -> f64 {
        self.ld.im
    }

    /// `sqrt2 e^{-i theta} h' phi'`
    pub fn omega(&self) -> C64 {
        (C64::new(0.5 * 2f64.ln(), -self.theta()) + self.lh + self.ldphi).exp()
    }

    /// `sqrt2 e^{i theta} h' psi'`
    pub fn omega_star(&self) -> C64 {
        (C64::new(0.5 * 2f64.ln(), self.theta()) + self.lh + self.ldpsi).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfun::Laurent;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn catenoid(t: f64, s: f64) -> WeierstrassData {
        let phi = MeroExpr::linear(c(-t, 0.0));
        let psi = MeroExpr::linear(c(t, 0.0)).recip().unwrap().neg();
        let dh = MeroExpr::linear(c(t, 0.0)).mul(&MeroExpr::monomial(c(s, 0.0), -2));
        let dom = PuncturedSphere::new(vec![Point::finite(0.0, 0.0), Point::Infinity]).unwrap();
        WeierstrassData::new("catenoid", phi, psi, dh, dom).unwrap()
    }

    #[test]
    fn catenoid_density_at_one() {
        // phi = 1, psi = -1, h' = 1 at z = 1: 4 |2|^2 = 16
        let d = catenoid(0.0, 1.0);
        assert!((d.metric_density(c(1.0, 0.0)).unwrap() - 16.0).abs() < 1e-13);
    }

    #[test]
    fn xz_components_match_definition() {
        let d = catenoid(0.0, 1.0);
        let v = d.xz_components();
        // t = 0: phi psi = -1, so component 4 vanishes and component 3 = 2h'
        assert!(v[3].is_zero());
        for &z in &[c(0.3, 0.2), c(-1.0, 0.5)] {
            assert!((v[2].eval(z).unwrap() - 2.0 / (z * z) * z).norm() < 1e-14);
        }
    }

    #[test]
    fn degenerate_psi_zero() {
        let dom = PuncturedSphere::new(vec![Point::Infinity]).unwrap();
        let d = WeierstrassData::new_degenerate("flat", MeroExpr::z(), MeroExpr::zero(), MeroExpr::real(1.0), dom);
        let v = d.xz_components();
        assert_eq!(v[2], v[3]);
        let j = d.jet(c(0.4, 0.1)).unwrap();
        assert_eq!(j.curvature(), C64::default());
    }

    #[test]
    fn constant_gauss_map_rejected() {
        let dom = PuncturedSphere::new(vec![Point::Infinity]).unwrap();
        assert!(WeierstrassData::new("x", MeroExpr::z(), MeroExpr::real(2.0), MeroExpr::real(1.0), dom).is_err());
    }

    #[test]
    fn isotropy_and_negative_control() {
        let d = catenoid(0.5, 1.0);
        let pts = [c(0.3, 0.7), c(-2.0, 0.1), c(1.5, -1.5)];
        assert!(lorentz_isotropy_check(&d, &pts).unwrap() < 1e-12);
        let mut v = d.xz_components().clone();
        v[3] = v[3].scale(c(1.01, 0.0));
        assert!(isotropy_residual(&v, &pts).unwrap() > 1e-3);
        assert!(metric_identity_residual(&d, &pts).unwrap() < 1e-12);
    }

    #[test]
    fn jet_survives_huge_exponentials() {
        // phi = z^2 e^{0.3 z}, psi = -e^{0.3 z}/z^2, h' = e^{-0.3 z}
        let e = MeroExpr::exp(Laurent::monomial(1, c(0.3, 0.0)));
        let phi = MeroExpr::monomial(c(1.0, 0.0), 2).mul(&e);
        let psi = MeroExpr::monomial(c(-1.0, 0.0), -2).mul(&e);
        let dh = e.recip().unwrap();
        let dom = PuncturedSphere::new(vec![Point::finite(0.0, 0.0), Point::Infinity]).unwrap();
        let d = WeierstrassData::new("m", phi, psi, dh, dom).unwrap();
        let j = d.jet(c(5000.0, 1.0)).unwrap();
        assert!(j.area_integrand().is_finite());
        assert!(j.log_density().is_finite());
    }

    #[test]
    fn data_file_round_trip() {
        let d = catenoid(0.5, 1.0);
        let back = WeierstrassData::from_text(&d.to_text()).unwrap();
        let z = c(0.7, -0.3);
        assert!((back.metric_density(z).unwrap() - d.metric_density(z).unwrap()).abs() < 1e-10);
        assert_eq!(back.domain().punctures().len(), 2);
        assert!(WeierstrassData::from_text("phi = [0,1]\n").is_err());
    }
}
