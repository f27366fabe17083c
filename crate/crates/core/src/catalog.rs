//! Named examples with parameter validation and their expected properties.

use crate::ends::EndKind;
use crate::error::{Error, Result};
use crate::mfun::{parse, MeroExpr, Point, Rational, Root};
use crate::wdata::{PuncturedSphere, WeierstrassData};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocusExpect {
    Empty,
    Nonempty,
    Curve,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedEnd {
    pub puncture: Point,
    pub kind: EndKind,
    pub index: Option<i32>,
    pub d: Option<i32>,
    pub d_tilde: Option<i32>,
}

/// What the analysis of an entry should find; `None` means no claim.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expected {
    pub k_total: Option<f64>,
    pub kperp_total: Option<f64>,
    pub ends: Vec<ExpectedEnd>,
    pub periods_pass: Option<bool>,
    /// pointwise conditions on poles and zeros of the data
    pub regular: Option<bool>,
    pub locus: Option<LocusExpect>,
    /// completeness per puncture
    pub complete: Vec<(Point, bool)>,
    pub embedded: Option<bool>,
    pub self_intersections: Option<usize>,
    /// false when the area exhaustion must fail to converge
    pub area_converges: Option<bool>,
    pub notes: Vec<String>,
}

/// Parameter chart used for meshing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    /// `log r` in `[ln r_min, ln r_max]`, `theta` in `[0, 2 pi sheets)`
    Annulus { r_min: f64, r_max: f64, sheets: u32 },
    /// `[-half, half]^2` with discs of radius `hole` removed around finite punctures
    Square { half: f64, hole: f64 },
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub data: WeierstrassData,
    pub expected: Expected,
    pub provenance: String,
    pub chart: Chart,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn cr(x: f64) -> C64 {
    c(x, 0.0)
}

fn fmt(z: C64) -> String {
    crate::mfun::fmt_cplx(z)
}

fn param_err(name: &str, what: &str) -> Error {
    Error::Param(format!("{name}: {what}"))
}

fn origin() -> Point {
    Point::finite(0.0, 0.0)
}

fn plane() -> PuncturedSphere {
    PuncturedSphere::new(vec![Point::Infinity]).unwrap()
}

fn punctured_plane() -> PuncturedSphere {
    PuncturedSphere::new(vec![origin(), Point::Infinity]).unwrap()
}

fn regular_end(p: Point, d: i32) -> ExpectedEnd {
    ExpectedEnd { puncture: p, kind: EndKind::Regular, index: Some(0), d: Some(d), d_tilde: Some(d) }
}

/// `lead * prod (z - zeros) / prod (z - poles)` with simple factors.
fn rat(lead: C64, zeros: &[C64], poles: &[C64]) -> MeroExpr {
    let r = |v: &[C64]| v.iter().map(|&at| Root { at, mult: 1 }).collect::<Vec<_>>();
    MeroExpr::from_rational(Rational::from_factors(lead, r(zeros), r(poles)))
}

fn poly(coeffs: &[C64]) -> MeroExpr {
    let mut f = MeroExpr::zero();
    for (k, &a) in coeffs.iter().enumerate() {
        if a != C64::default() {
            f = f.add(&MeroExpr::monomial(a, k as i32));
        }
    }
    f
}

fn annulus() -> Chart {
    Chart::Annulus { r_min: 1e-2, r_max: 1e2, sheets: 1 }
}

/// Narrower annulus for ends that wind several times around themselves.
fn inner_annulus() -> Chart {
    Chart::Annulus { r_min: 0.1, r_max: 10.0, sheets: 1 }
}

fn square() -> Chart {
    Chart::Square { half: 5.0, hole: 0.0 }
}

fn entry(name: &str, params: Vec<(&str, String)>, data: WeierstrassData, expected: Expected, provenance: &str, chart: Chart) -> CatalogEntry {
    CatalogEntry {
        name: name.to_string(),
        params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        data,
        expected,
        provenance: provenance.to_string(),
        chart,
    }
}

fn catenoid_data(t: f64, s: C64, label: &str) -> Result<WeierstrassData> {
    let phi = MeroExpr::linear(cr(-t));
    let psi = rat(cr(-1.0), &[], &[cr(t)]);
    let dh = rat(s, &[cr(t)], &[C64::default(), C64::default()]);
    WeierstrassData::new(label, phi, psi, dh, punctured_plane())
}

/// `phi = z + t`, `psi = -1/(z - t)`, `dh = s (z - t)/z^2 dz` on the punctured plane.
pub fn catenoid(t: f64, s: f64) -> Result<CatalogEntry> {
    if !(t > -1.0 && t < 1.0) {
        return Err(param_err("catenoid", "requires -1 < t < 1 (t = +-1 needs the bad-end opt-in)"));
    }
    catenoid_impl(t, s)
}

/// The limits `t = +-1`, with a bad singular end at the origin.
pub fn catenoid_opt_in(t: f64, s: f64) -> Result<CatalogEntry> {
    if !(t >= -1.0 && t <= 1.0) {
        return Err(param_err("catenoid", "requires -1 <= t <= 1"));
    }
    catenoid_impl(t, s)
}

fn catenoid_impl(t: f64, s: f64) -> Result<CatalogEntry> {
    if s == 0.0 || !s.is_finite() {
        return Err(param_err("catenoid", "requires real s != 0"));
    }
    let data = catenoid_data(t, cr(s), "catenoid")?;
    let bad = t.abs() == 1.0;
    let mut ex = Expected {
        periods_pass: Some(true),
        regular: Some(true),
        complete: vec![(origin(), true), (Point::Infinity, true)],
        ..Default::default()
    };
    if bad {
        ex.ends = vec![
            ExpectedEnd { puncture: origin(), kind: EndKind::BadSingular, index: None, d: None, d_tilde: None },
            regular_end(Point::Infinity, 1),
        ];
        ex.area_converges = Some(false);
        ex.notes.push("bad singular end at the origin: the total curvature depends on the exhaustion".into());
    } else {
        ex.k_total = Some(-4.0 * PI);
        ex.kperp_total = Some(0.0);
        ex.ends = vec![regular_end(origin(), 1), regular_end(Point::Infinity, 1)];
        ex.locus = Some(LocusExpect::Empty);
        ex.embedded = Some(true);
        ex.self_intersections = Some(0);
        ex.area_converges = Some(true);
    }
    if t == 0.0 {
        ex.notes.push("t = 0 is the classical catenoid in R^3 (psi = -1/phi)".into());
    }
    Ok(entry(
        "catenoid",
        vec![("t", t.to_string()), ("s", s.to_string())],
        data,
        ex,
        "generalized catenoid: regular, complete, periods vanish, total curvature -4 pi, embedded",
        annulus(),
    ))
}

/// Associated family: `dh = lambda (z - t)/z^2 dz`.
pub fn helicoid(t: f64, lambda: C64) -> Result<CatalogEntry> {
    if !(t > -1.0 && t < 1.0) {
        return Err(param_err("helicoid", "requires -1 < t < 1"));
    }
    if lambda == C64::default() {
        return Err(param_err("helicoid", "requires lambda != 0"));
    }
    let data = catenoid_data(t, lambda, "helicoid")?;
    let real = lambda.im == 0.0;
    let imaginary = lambda.re == 0.0;
    let mut ex = Expected {
        k_total: Some(-4.0 * PI),
        kperp_total: Some(0.0),
        ends: vec![regular_end(origin(), 1), regular_end(Point::Infinity, 1)],
        periods_pass: Some(real),
        regular: Some(true),
        locus: Some(LocusExpect::Empty),
        area_converges: Some(true),
        ..Default::default()
    };
    if real {
        ex.embedded = Some(true);
    } else if imaginary {
        ex.notes.push("purely imaginary lambda: the generalized helicoid, embedded on the universal cover".into());
    } else {
        ex.embedded = Some(false);
        ex.notes.push("generic lambda: the associate surface has self-intersections".into());
    }
    if !real {
        ex.notes.push(format!("Re of the dh period around 0 is -2 pi Im(lambda) = {}", -2.0 * PI * lambda.im));
    }
    Ok(entry(
        "helicoid",
        vec![("t", t.to_string()), ("lambda", fmt(lambda))],
        data,
        ex,
        "associated family of the generalized catenoid: periods vanish iff lambda is real",
        Chart::Annulus { r_min: 1e-2, r_max: 1e2, sheets: if real { 1 } else { 3 } },
    ))
}

fn nonzero(name: &str, v: C64, what: &str) -> Result<()> {
    if v == C64::default() || !v.is_finite() {
        return Err(param_err(name, &format!("requires {what} != 0")));
    }
    Ok(())
}

fn positive_real(v: C64) -> bool {
    v.im == 0.0 && v.re >= 0.0
}

/// `phi = z`, `psi = c/z`, `dh = s z dz`.
pub fn enneper1(cc: C64, s: C64) -> Result<CatalogEntry> {
    if positive_real(cc) {
        return Err(param_err("enneper1", "regularity requires c not a nonnegative real number"));
    }
    enneper_impl("enneper1", 1, cc, s, false)
}

/// Builds irregular instances too (negative tests).
pub fn enneper1_unchecked(cc: C64, s: C64) -> Result<CatalogEntry> {
    enneper_impl("enneper1", 1, cc, s, false)
}

/// `phi = z^k`, `psi = c/z^k`, `dh = s z^k dz`.
pub fn enneper_k(k: u32, cc: C64, s: C64) -> Result<CatalogEntry> {
    if k < 1 {
        return Err(param_err("enneper_k", "requires k >= 1"));
    }
    if positive_real(cc) {
        return Err(param_err("enneper_k", "regularity requires c not a nonnegative real number"));
    }
    enneper_impl("enneper_k", k, cc, s, true)
}

fn enneper_impl(name: &str, k: u32, cc: C64, s: C64, with_k: bool) -> Result<CatalogEntry> {
    nonzero(name, cc, "c")?;
    nonzero(name, s, "s")?;
    let ki = k as i32;
    let data = WeierstrassData::new(
        name,
        MeroExpr::monomial(cr(1.0), ki),
        MeroExpr::monomial(cc, -ki),
        MeroExpr::monomial(s, ki),
        plane(),
    )?;
    let reg = !positive_real(cc);
    let mut ex = Expected {
        ends: vec![regular_end(Point::Infinity, 2 * ki + 1)],
        periods_pass: Some(true),
        regular: Some(true),
        complete: vec![(Point::Infinity, true)],
        ..Default::default()
    };
    if reg {
        ex.k_total = Some(-4.0 * PI * k as f64);
        ex.kperp_total = Some(0.0);
        ex.locus = Some(LocusExpect::Empty);
        ex.area_converges = Some(true);
        if cc.im != 0.0 {
            ex.self_intersections = Some(2);
            ex.embedded = Some(false);
            let rad = ((2 * k + 1) as f64 * cc.norm()).powf(1.0 / (2 * k) as f64);
            ex.notes.push(format!("two self-intersection points, preimages on |z| = {rad}"));
        } else {
            ex.notes.push("negative real c: Enneper-type surface in R^3".into());
        }
    } else {
        ex.locus = Some(LocusExpect::Curve);
        ex.notes.push(format!("phi = conj psi on the circle |z|^(2k) = {}", cc.re));
    }
    let mut params = vec![("c", fmt(cc)), ("s", fmt(s))];
    if with_k {
        params.insert(0, ("k", k.to_string()));
    }
    Ok(entry(
        name,
        params,
        data,
        ex,
        "generalized Enneper surface: regular iff c is not a nonnegative real; c not real gives exactly two self-intersections",
        square(),
    ))
}

fn enneper2_regular(cc: C64) -> bool {
    cc.re - cc.im * cc.im + 0.25 < 0.0
}

/// `phi = z + 1`, `psi = c/z`, `dh = s z dz`.
pub fn enneper2(cc: C64, s: C64) -> Result<CatalogEntry> {
    if !enneper2_regular(cc) {
        return Err(param_err("enneper2", "regularity requires c1 - c2^2 + 1/4 < 0"));
    }
    enneper2_unchecked(cc, s)
}

pub fn enneper2_unchecked(cc: C64, s: C64) -> Result<CatalogEntry> {
    nonzero("enneper2", cc, "c")?;
    nonzero("enneper2", s, "s")?;
    let data = WeierstrassData::new(
        "enneper2",
        MeroExpr::linear(cr(-1.0)),
        MeroExpr::monomial(cc, -1),
        MeroExpr::monomial(s, 1),
        plane(),
    )?;
    let reg = enneper2_regular(cc);
    let mut ex = Expected {
        ends: vec![regular_end(Point::Infinity, 3)],
        periods_pass: Some(true),
        regular: Some(true),
        complete: vec![(Point::Infinity, true)],
        ..Default::default()
    };
    if reg {
        ex.k_total = Some(-4.0 * PI);
        ex.kperp_total = Some(0.0);
        ex.locus = Some(LocusExpect::Empty);
        ex.area_converges = Some(true);
        if cc.im == 0.0 && s.im != 0.0 {
            ex.embedded = Some(true);
            ex.self_intersections = Some(0);
        }
    } else {
        ex.locus = Some(LocusExpect::Nonempty);
        ex.notes.push(format!("singular points on the line Im z = {}", cc.im));
    }
    Ok(entry(
        "enneper2",
        vec![("c", fmt(cc)), ("s", fmt(s))],
        data,
        ex,
        "second generalized Enneper surface: regular iff c1 - c2^2 + 1/4 < 0; embedded for real c < -1/4 and s not real",
        square(),
    ))
}

/// Deformed Jorge-Meeks k-noid, built from explicit `x_z = (v1, v2, a v3, b v3)`.
pub fn knoid(k: u32, a: C64, b: C64) -> Result<CatalogEntry> {
    if k < 2 {
        return Err(param_err("knoid", "requires k >= 2"));
    }
    if (a * a - b * b - 1.0).norm() > 1e-12 {
        return Err(param_err("knoid", "requires a^2 - b^2 = 1"));
    }
    if !(a.norm_sqr() - b.norm_sqr() > 0.0) {
        return Err(param_err("knoid", "requires |a|^2 - |b|^2 > 0"));
    }
    if (a * b.conj()).im.abs() <= 1e-12 * (1.0 + a.norm() * b.norm()) {
        return Err(param_err("knoid", "requires a, b linearly independent over R"));
    }
    let roots: Vec<C64> = (0..k).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64)).collect();
    let ki = k as i32;
    // R^3 data: phi0 = z^{k-1} = -1/psi0, h0' = z^{k-1}/(z^k - 1)^2
    let phi0 = MeroExpr::monomial(cr(1.0), ki - 1);
    let psi0 = MeroExpr::monomial(cr(-1.0), 1 - ki);
    let double: Vec<Root> = roots.iter().map(|&at| Root { at, mult: 2 }).collect();
    let zk = if k > 1 { vec![Root { at: C64::default(), mult: k - 1 }] } else { vec![] };
    let h0 = MeroExpr::from_rational(Rational::from_factors(cr(1.0), zk, double));
    let v = crate::wdata::xz_from(&phi0, &psi0, &h0);
    let v3 = v[2].clone();
    let xz = [v[0].clone(), v[1].clone(), v3.scale(a), v3.scale(b)];
    let dom = PuncturedSphere::new(roots.iter().map(|&z| Point::Finite(z)).collect())?;
    let data = WeierstrassData::from_xz("knoid", xz, dom)?;
    let ex = Expected {
        k_total: Some(4.0 * PI * (1.0 - k as f64)),
        kperp_total: Some(0.0),
        ends: roots.iter().map(|&z| regular_end(Point::Finite(z), 1)).collect(),
        periods_pass: Some(true),
        regular: Some(true),
        locus: Some(LocusExpect::Empty),
        complete: roots.iter().map(|&z| (Point::Finite(z), true)).collect(),
        embedded: Some(true),
        self_intersections: Some(0),
        area_converges: Some(true),
        notes: vec![],
    };
    Ok(entry(
        "knoid",
        vec![("k", k.to_string()), ("a", fmt(a)), ("b", fmt(b))],
        data,
        ex,
        "generalized Jorge-Meeks k-noid: regular, complete, periods vanish, total curvature 4 pi (1 - k), embedded",
        Chart::Square { half: 3.0, hole: 0.15 },
    ))
}

/// `phi = (1 - sqrt2) e^{-z}`, `psi = (1 + sqrt2) e^{-z}`, `dh = e^z/2 dz` on the plane.
pub fn graph1() -> Result<CatalogEntry> {
    let r2 = 2f64.sqrt();
    let e = |a: f64| MeroExpr::exp(crate::mfun::Laurent::monomial(1, cr(a)));
    let data = WeierstrassData::new(
        "graph1",
        e(-1.0).scale(cr(1.0 - r2)),
        e(-1.0).scale(cr(1.0 + r2)),
        e(1.0).scale(cr(0.5)),
        plane(),
    )?;
    let ex = Expected {
        ends: vec![ExpectedEnd { puncture: Point::Infinity, kind: EndKind::Transcendental, index: None, d: None, d_tilde: None }],
        periods_pass: Some(true),
        regular: Some(true),
        locus: Some(LocusExpect::Empty),
        complete: vec![(Point::Infinity, true)],
        embedded: Some(true),
        notes: vec![
            "x_z = (1, sqrt2 i, cosh z, sinh z); x = 2 (u, -sqrt2 v, sinh u cos v, cosh u cos v) up to translation".into(),
            "metric density in [4, 8]".into(),
        ],
        ..Default::default()
    };
    Ok(entry(
        "graph1",
        vec![],
        data,
        ex,
        "completely embedded stationary graph over the plane with bounded metric density",
        Chart::Square { half: 3.0, hole: 0.0 },
    ))
}

/// `phi = conj(l) z^n`, `psi = conj(l) z^-n`, `dh = l dz`, `l = (1 + sqrt3 i)/2`.
pub fn graph2(n: u32) -> Result<CatalogEntry> {
    if n < 2 {
        return Err(param_err("graph2", "requires n >= 2"));
    }
    let l = c(0.5, 3f64.sqrt() / 2.0);
    let ni = n as i32;
    let data = WeierstrassData::new(
        "graph2",
        MeroExpr::monomial(l.conj(), ni),
        MeroExpr::monomial(l.conj(), -ni),
        MeroExpr::constant(l),
        punctured_plane(),
    )?;
    let ex = Expected {
        k_total: Some(-4.0 * PI * n as f64),
        kperp_total: Some(0.0),
        ends: vec![regular_end(origin(), ni - 1), regular_end(Point::Infinity, ni + 1)],
        periods_pass: Some(true),
        regular: Some(true),
        locus: Some(LocusExpect::Empty),
        complete: vec![(origin(), true), (Point::Infinity, true)],
        embedded: Some(true),
        area_converges: Some(true),
        ..Default::default()
    };
    Ok(entry(
        "graph2",
        vec![("n", n.to_string())],
        data,
        ex,
        "complete graph over a punctured timelike plane: planar end of multiplicity n - 1 at 0 and n + 1 at infinity",
        annulus(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Essential {
    M,
    E,
    C,
}

/// `phi = z^k e^{az}`, `psi = -e^{az}/z^k` with `dh` equal to `e^{-az}`,
/// `z^k e^{-az}` or `e^{-az}/z^k` (families M, E, C).
pub fn essential(family: Essential, k: u32, a: f64) -> Result<CatalogEntry> {
    if k < 2 {
        return Err(param_err("essential", "requires k >= 2 (k = 1 needs the divergent opt-in)"));
    }
    essential_impl(family, k, a)
}

/// Allows `k = 1`, where the total curvature does not converge absolutely.
pub fn essential_divergent(family: Essential, k: u32, a: f64) -> Result<CatalogEntry> {
    if k < 1 {
        return Err(param_err("essential", "requires k >= 1"));
    }
    essential_impl(family, k, a)
}

fn essential_impl(family: Essential, k: u32, a: f64) -> Result<CatalogEntry> {
    let a_ok = match family {
        // the E family keeps a = 0 (classical Enneper surfaces with dihedral symmetry)
        Essential::E => (0.0..FRAC_PI_2).contains(&a),
        _ => a > 0.0 && a < FRAC_PI_2,
    };
    if !a_ok {
        return Err(param_err("essential", "requires 0 < a < pi/2"));
    }
    let ki = k as i32;
    let ea = |s: f64| MeroExpr::exp(crate::mfun::Laurent::monomial(1, cr(s * a)));
    let phi = MeroExpr::monomial(cr(1.0), ki).mul(&ea(1.0));
    let psi = MeroExpr::monomial(cr(-1.0), -ki).mul(&ea(1.0));
    let (name, dh, dom, chart) = match family {
        Essential::M => ("essential_m", ea(-1.0), punctured_plane(), inner_annulus()),
        Essential::E => ("essential_e", MeroExpr::monomial(cr(1.0), ki).mul(&ea(-1.0)), plane(), Chart::Square { half: 3.0, hole: 0.0 }),
        Essential::C => ("essential_c", MeroExpr::monomial(cr(1.0), -ki).mul(&ea(-1.0)), punctured_plane(), inner_annulus()),
    };
    let data = WeierstrassData::new(name, phi, psi, dh, dom.clone())?;
    let inf_end = if a == 0.0 {
        regular_end(Point::Infinity, 2 * ki + 1)
    } else {
        ExpectedEnd { puncture: Point::Infinity, kind: EndKind::Transcendental, index: None, d: None, d_tilde: None }
    };
    let mut ex = Expected {
        periods_pass: Some(true),
        regular: Some(true),
        locus: Some(LocusExpect::Empty),
        complete: dom.punctures().iter().map(|&p| (p, true)).collect(),
        ..Default::default()
    };
    ex.ends = match family {
        Essential::E => vec![inf_end],
        _ => vec![ExpectedEnd { puncture: origin(), kind: EndKind::Regular, index: Some(0), d: None, d_tilde: None }, inf_end],
    };
    if k == 1 {
        ex.notes.push("k = 1: the total curvature does not converge absolutely".into());
    } else {
        // the curvature integrand does not involve dh, so E and C share the M total
        ex.k_total = Some(-4.0 * PI * k as f64);
        ex.kperp_total = Some(0.0);
        ex.area_converges = Some(true);
    }
    if family == Essential::E && a == 0.0 {
        ex.notes.push("a = 0: Enneper surface in R^3 with higher dihedral symmetry".into());
    }
    Ok(entry(
        name,
        vec![("k", k.to_string()), ("a", a.to_string())],
        data,
        ex,
        "regular complete surfaces with essential singularities at infinity; for M the total curvature is -4 pi k",
        chart,
    ))
}

/// `phi = z^2 (z^2 + a)`, `psi = z^4/(z^2 + a)`, `dh = (z^2 + a)/z^4 dz`.
pub fn singular1(a: C64) -> Result<CatalogEntry> {
    nonzero("singular1", a, "a")?;
    let q = poly(&[a, cr(0.0), cr(1.0)]);
    let phi = MeroExpr::monomial(cr(1.0), 2).mul(&q);
    let psi = MeroExpr::monomial(cr(1.0), 4).div(&q)?;
    let dh = q.mul(&MeroExpr::monomial(cr(1.0), -4));
    let data = WeierstrassData::new("singular1", phi, psi, dh, punctured_plane())?;
    let large = a.im == 0.0 && a.re > 1.0;
    let mut ex = Expected {
        k_total: Some(-8.0 * PI),
        kperp_total: Some(0.0),
        ends: vec![
            ExpectedEnd { puncture: origin(), kind: EndKind::GoodSingular { m: 2, n: 4 }, index: Some(2), d: Some(3), d_tilde: Some(1) },
            ExpectedEnd { puncture: Point::Infinity, kind: EndKind::GoodSingular { m: 4, n: 2 }, index: Some(-2), d: Some(5), d_tilde: Some(3) },
        ],
        periods_pass: Some(true),
        regular: Some(true),
        complete: vec![(origin(), true), (Point::Infinity, true)],
        area_converges: Some(true),
        ..Default::default()
    };
    if large {
        ex.locus = Some(LocusExpect::Empty);
    } else {
        ex.notes.push("a is not a real number > 1: the singular locus is not known to be empty".into());
    }
    Ok(entry(
        "singular1",
        vec![("a", fmt(a))],
        data,
        ex,
        "genus zero with two good singular ends: indices 2 and -2, reduced multiplicities 1 and 3, total curvature -8 pi",
        inner_annulus(),
    ))
}

/// `phi = z (z^2 + a z + b)`, `psi = z^2/(z^2 + a z + b)`, `dh = (z^2 + a z + b)/z^7 dz`
/// on the plane minus the origin (infinity is an interior point).
pub fn singular2(a: C64, b: C64) -> Result<CatalogEntry> {
    nonzero("singular2", b, "b")?;
    if (a * a - 4.0 * b).norm() < 1e-12 {
        return Err(param_err("singular2", "requires z^2 + a z + b to have simple roots"));
    }
    let q = poly(&[b, a, cr(1.0)]);
    let phi = MeroExpr::z().mul(&q);
    let psi = MeroExpr::monomial(cr(1.0), 2).div(&q)?;
    let dh = q.mul(&MeroExpr::monomial(cr(1.0), -7));
    let dom = PuncturedSphere::new(vec![origin()])?;
    let data = WeierstrassData::new("singular2", phi, psi, dh, dom)?;
    let default = a == C64::default() && b == cr(4.0);
    let ex = Expected {
        k_total: Some(-8.0 * PI),
        kperp_total: Some(0.0),
        ends: vec![ExpectedEnd { puncture: origin(), kind: EndKind::GoodSingular { m: 1, n: 2 }, index: Some(1), d: Some(6), d_tilde: Some(5) }],
        periods_pass: Some(true),
        regular: Some(true),
        locus: default.then_some(LocusExpect::Empty),
        complete: vec![(origin(), true)],
        area_converges: Some(true),
        ..Default::default()
    };
    Ok(entry(
        "singular2",
        vec![("a", fmt(a)), ("b", fmt(b))],
        data,
        ex,
        "genus zero with one good singular end of index 1 and reduced multiplicity 5, total curvature -8 pi",
        inner_annulus(),
    ))
}

/// `phi = z^-2`, `psi = z^-3`, `dh = dz`: an incomplete end at infinity.
pub fn incomplete() -> Result<CatalogEntry> {
    let data = WeierstrassData::new(
        "incomplete",
        MeroExpr::monomial(cr(1.0), -2),
        MeroExpr::monomial(cr(1.0), -3),
        MeroExpr::real(1.0),
        punctured_plane(),
    )?;
    let ex = Expected {
        ends: vec![
            ExpectedEnd { puncture: origin(), kind: EndKind::GoodSingular { m: 2, n: 3 }, index: Some(2), d: None, d_tilde: None },
            ExpectedEnd { puncture: Point::Infinity, kind: EndKind::GoodSingular { m: 2, n: 3 }, index: Some(2), d: None, d_tilde: None },
        ],
        periods_pass: Some(true),
        locus: Some(LocusExpect::Nonempty),
        complete: vec![(Point::Infinity, false)],
        notes: vec!["phi = conj psi at the fifth roots of unity, each of index -1".into()],
        ..Default::default()
    };
    Ok(entry(
        "incomplete",
        vec![],
        data,
        ex,
        "phi(inf) = conj psi(inf) and the end at infinity is incomplete",
        inner_annulus(),
    ))
}

/// `phi = phi0`, `psi = a psi0`, `dh = dh0` for R^3 data (`psi0 = -1/phi0`).
pub fn alias_palmer(base: &CatalogEntry, a: C64) -> Result<CatalogEntry> {
    nonzero("alias_palmer", a, "a")?;
    if a.im == 0.0 && a.re < 0.0 {
        return Err(param_err("alias_palmer", "requires a not a negative real number"));
    }
    let d0 = &base.data;
    for z in [c(0.37, 0.21), c(-1.3, 0.8), c(2.1, -1.7)] {
        let (p, s) = (d0.phi().eval(z)?, d0.psi().eval(z)?);
        if (p * s + 1.0).norm() > 1e-9 {
            return Err(param_err("alias_palmer", "base must lie in R^3 (psi = -1/phi)"));
        }
    }
    let data = WeierstrassData::new("alias_palmer", d0.phi().clone(), d0.psi().scale(a), d0.dh().clone(), d0.domain().clone())?;
    let b = &base.expected;
    let ex = Expected {
        k_total: b.k_total,
        kperp_total: b.k_total.map(|_| 0.0),
        ends: b.ends.clone(),
        periods_pass: Some(true),
        regular: Some(true),
        locus: Some(LocusExpect::Empty),
        complete: b.complete.clone(),
        area_converges: b.area_converges,
        ..Default::default()
    };
    let mut params = vec![("base", base.name.clone()), ("a", fmt(a))];
    for (k, v) in &base.params {
        params.push(("base_param", format!("{k}={v}")));
    }
    Ok(entry(
        "alias_palmer",
        params,
        data,
        ex,
        "deformation psi -> a psi of a minimal surface in R^3: regular with vanishing periods unless a is a negative real",
        base.chart,
    ))
}

/// The catenoid in R^3_1: `phi = z`, `psi = 1/z`, `dh = dz/z`.
pub fn maximal_catenoid() -> Result<CatalogEntry> {
    let data = WeierstrassData::new(
        "maximal_catenoid",
        MeroExpr::z(),
        MeroExpr::monomial(cr(1.0), -1),
        MeroExpr::monomial(cr(1.0), -1),
        punctured_plane(),
    )?;
    let ex = Expected {
        periods_pass: Some(true),
        locus: Some(LocusExpect::Curve),
        notes: vec!["maximal surface: K >= 0; singular along |z| = 1".into()],
        ..Default::default()
    };
    Ok(entry(
        "maximal_catenoid",
        vec![],
        data,
        ex,
        "rotational maximal catenoid in R^3_1 with phi = conj psi on the unit circle",
        annulus(),
    ))
}

/// `phi = z^m (z + a)`, `psi = z^{m+1}/(z + b)`, `dh = (z + b)/z^{m+2} dz`, `b = 1 - a`.
pub fn fourpi(m: u32, a: C64) -> Result<CatalogEntry> {
    if m < 1 {
        return Err(param_err("fourpi", "requires m >= 1"));
    }
    let b = cr(1.0) - a;
    nonzero("fourpi", a, "a")?;
    nonzero("fourpi", b, "b = 1 - a")?;
    let mi = m as i32;
    let phi = MeroExpr::monomial(cr(1.0), mi).mul(&MeroExpr::linear(-a));
    let psi = rat(cr(1.0), &[], &[-b]).mul(&MeroExpr::monomial(cr(1.0), mi + 1));
    let dh = MeroExpr::linear(-b).mul(&MeroExpr::monomial(cr(1.0), -(mi + 2)));
    let data = WeierstrassData::new("fourpi", phi, psi, dh, punctured_plane())?;
    let ex = Expected {
        periods_pass: Some(true),
        locus: Some(LocusExpect::Nonempty),
        notes: vec!["no parameter a is expected to give an empty singular locus".into()],
        ..Default::default()
    };
    Ok(entry(
        "fourpi",
        vec![("m", m.to_string()), ("a", fmt(a))],
        data,
        ex,
        "candidate family for total curvature -4 pi with a + b = 1 for the periods",
        inner_annulus(),
    ))
}

/// Name, parameters with defaults, and description.
pub struct ListItem {
    pub name: &'static str,
    pub params: &'static str,
    pub about: &'static str,
}

pub fn list() -> Vec<ListItem> {
    let it = |name, params, about| ListItem { name, params, about };
    vec![
        it("catenoid", "t=0.5 in (-1,1), s=1 real != 0, allow_bad=false (permits t = +-1)", "generalized catenoid, total curvature -4 pi"),
        it("helicoid", "t=0.5 in (-1,1), lambda=i != 0", "associated family; periods vanish iff lambda real"),
        it("enneper1", "c=-1 not in [0,inf), s=1 != 0, force=false", "generalized Enneper surface"),
        it("enneper2", "c=-1 with c1 - c2^2 + 1/4 < 0, s=i != 0, force=false", "second generalized Enneper surface"),
        it("enneper_k", "k=1 >= 1, c=i not in [0,inf), s=1", "Enneper type with two self-intersections for c not real"),
        it("knoid", "k=3 >= 2, a=0.8660254037844386, b=0.5i with a^2-b^2=1, |a|>|b|, a,b R-independent", "deformed Jorge-Meeks k-noid"),
        it("graph1", "-", "embedded entire graph, essential end"),
        it("graph2", "n=2 >= 2", "graph over a punctured timelike plane"),
        it("essential_m", "k=2 >= 2, a=0.3 in (0,pi/2), divergent=false (permits k=1)", "M_{k,a}, total curvature -4 pi k"),
        it("essential_e", "k=2 >= 2, a=0.3 in [0,pi/2), divergent=false", "E_{k,a}"),
        it("essential_c", "k=2 >= 2, a=0.3 in (0,pi/2), divergent=false", "C_{k,a}"),
        it("singular1", "a=2 != 0 (real > 1 for regularity)", "two good singular ends, total curvature -8 pi"),
        it("singular2", "a=0, b=4 != 0", "one good singular end, total curvature -8 pi"),
        it("incomplete", "-", "incomplete end at infinity"),
        it("alias_palmer", "base=enneper1 (R^3 entry), a=i not a negative real, plus base parameters", "deformation of minimal surfaces"),
        it("maximal_catenoid", "-", "maximal catenoid in R^3_1, singular on |z|=1"),
        it("fourpi", "m=1 >= 1, a=0.5 (b = 1 - a)", "candidate -4 pi family"),
    ]
}

/// Parameters given as `key=value` strings.
#[derive(Clone, Debug, Default)]
pub struct Params {
    map: BTreeMap<String, String>,
    used: std::cell::RefCell<Vec<String>>,
}

impl Params {
    pub fn new(pairs: &[(String, String)]) -> Self {
        Params { map: pairs.iter().cloned().collect(), used: Default::default() }
    }

    pub fn parse_pairs(items: &[String]) -> Result<Self> {
        let mut v = Vec::new();
        for s in items {
            let (k, val) = s.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {s}")))?;
            v.push((k.trim().to_string(), val.trim().to_string()));
        }
        Ok(Params::new(&v))
    }

    fn raw(&self, k: &str) -> Option<&String> {
        self.used.borrow_mut().push(k.to_string());
        self.map.get(k)
    }

    pub fn complex(&self, k: &str, default: C64) -> Result<C64> {
        match self.raw(k) {
            None => Ok(default),
            Some(v) => {
                let e = parse(&format!("[{v}]"))?;
                e.as_rational()
                    .filter(|r| r.is_constant())
                    .map(|r| r.lead())
                    .ok_or_else(|| Error::Parse(format!("{k}: expected a complex number, got {v}")))
            }
        }
    }

    pub fn real(&self, k: &str, default: f64) -> Result<f64> {
        match self.raw(k) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("{k}: expected a real number, got {v}"))),
        }
    }

    pub fn int(&self, k: &str, default: u32) -> Result<u32> {
        match self.raw(k) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("{k}: expected a nonnegative integer, got {v}"))),
        }
    }

    pub fn flag(&self, k: &str) -> Result<bool> {
        match self.raw(k).map(|s| s.as_str()) {
            None | Some("false") | Some("0") => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some(v) => Err(Error::Parse(format!("{k}: expected true or false, got {v}"))),
        }
    }

    pub fn string(&self, k: &str, default: &str) -> String {
        self.raw(k).cloned().unwrap_or_else(|| default.to_string())
    }

    /// Keys starting with `prefix.`, with the prefix removed.
    pub fn sub(&self, prefix: &str) -> Params {
        let p = format!("{prefix}.");
        let pairs: Vec<(String, String)> =
            self.map.iter().filter_map(|(k, v)| k.strip_prefix(&p).map(|s| (s.to_string(), v.clone()))).collect();
        for (k, _) in &pairs {
            self.used.borrow_mut().push(format!("{p}{k}"));
        }
        Params::new(&pairs)
    }

    fn check_all_used(&self, name: &str) -> Result<()> {
        let used = self.used.borrow();
        for k in self.map.keys() {
            if !used.contains(k) {
                return Err(Error::Param(format!("{name}: unknown parameter {k}")));
            }
        }
        Ok(())
    }
}

/// Builds an entry by name. Unknown names and parameters are errors.
pub fn build(name: &str, p: &Params) -> Result<CatalogEntry> {
    let i = c(0.0, 1.0);
    let e = match name {
        "catenoid" => {
            let (t, s) = (p.real("t", 0.5)?, p.real("s", 1.0)?);
            if p.flag("allow_bad")? { catenoid_opt_in(t, s) } else { catenoid(t, s) }
        }
        "helicoid" => helicoid(p.real("t", 0.5)?, p.complex("lambda", i)?),
        "enneper1" => {
            let (cc, s) = (p.complex("c", cr(-1.0))?, p.complex("s", cr(1.0))?);
            if p.flag("force")? { enneper1_unchecked(cc, s) } else { enneper1(cc, s) }
        }
        "enneper2" => {
            let (cc, s) = (p.complex("c", cr(-1.0))?, p.complex("s", i)?);
            if p.flag("force")? { enneper2_unchecked(cc, s) } else { enneper2(cc, s) }
        }
        "enneper_k" => enneper_k(p.int("k", 1)?, p.complex("c", i)?, p.complex("s", cr(1.0))?),
        "knoid" => knoid(p.int("k", 3)?, p.complex("a", cr(3f64.sqrt() / 2.0))?, p.complex("b", c(0.0, 0.5))?),
        "graph1" => graph1(),
        "graph2" => graph2(p.int("n", 2)?),
        "essential_m" | "essential_e" | "essential_c" => {
            let fam = match name {
                "essential_m" => Essential::M,
                "essential_e" => Essential::E,
                _ => Essential::C,
            };
            let (k, a) = (p.int("k", 2)?, p.real("a", 0.3)?);
            if p.flag("divergent")? { essential_divergent(fam, k, a) } else { essential(fam, k, a) }
        }
        "singular1" => singular1(p.complex("a", cr(2.0))?),
        "singular2" => singular2(p.complex("a", cr(0.0))?, p.complex("b", cr(4.0))?),
        "incomplete" => incomplete(),
        "alias_palmer" => {
            let base_name = p.string("base", "enneper1");
            let base = build(&base_name, &p.sub("base"))?;
            alias_palmer(&base, p.complex("a", i)?)
        }
        "maximal_catenoid" => maximal_catenoid(),
        "fourpi" => fourpi(p.int("m", 1)?, p.complex("a", cr(0.5))?),
        _ => return Err(Error::Param(format!("unknown catalog entry {name}"))),
    }?;
    p.check_all_used(name)?;
    Ok(e)
}

pub fn build_default(name: &str) -> Result<CatalogEntry> {
    build(name, &Params::default())
}

/// Every entry with default parameters.
pub fn all_default() -> Result<Vec<CatalogEntry>> {
    list().iter().map(|it| build_default(it.name)).collect()
}

/// Wraps a data file (see `WeierstrassData::from_text`) as an entry with no
/// expectations. Punctures `{0, inf}` get the annulus chart, anything else the
/// square with holes around finite punctures.
pub fn from_data_text(text: &str) -> Result<CatalogEntry> {
    let data = WeierstrassData::from_text(text)?;
    let finite = data.domain().finite_punctures();
    let chart = if finite.len() == 1 && finite[0] == C64::default() && data.domain().contains_infinity() {
        annulus()
    } else {
        Chart::Square { half: 5.0, hole: if finite.is_empty() { 0.0 } else { 0.1 } }
    };
    let label = data.label.clone();
    Ok(entry(&label, vec![], data, Expected::default(), "user data file", chart))
}

pub fn from_data_file(path: &std::path::Path) -> Result<CatalogEntry> {
    from_data_text(&std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries_are_sharp() {
        assert!(catenoid(1.0, 1.0).is_err());
        assert!(catenoid(-1.0, 1.0).is_err());
        assert!(catenoid(0.999, 1.0).is_ok());
        assert!(catenoid_opt_in(1.0, 1.0).is_ok());
        assert!(enneper2(c(-0.25, 0.0), cr(1.0)).is_err());
        assert!(enneper2(c(-0.2500001, 0.0), cr(1.0)).is_ok());
        assert!(enneper1(cr(1.0), cr(1.0)).is_err());
        assert!(enneper1(cr(0.0), cr(1.0)).is_err());
        assert!(essential(Essential::M, 2, 0.0).is_err());
        assert!(essential(Essential::M, 2, FRAC_PI_2).is_err());
        assert!(essential(Essential::M, 1, 0.3).is_err());
        assert!(essential_divergent(Essential::M, 1, 0.3).is_ok());
        assert!(knoid(3, cr(1.0), cr(0.0)).is_err());
        assert!(alias_palmer(&enneper1(cr(-1.0), cr(1.0)).unwrap(), cr(-2.0)).is_err());
        assert!(alias_palmer(&catenoid(0.5, 1.0).unwrap(), i1()).is_err());
    }

    fn i1() -> C64 {
        c(0.0, 1.0)
    }

    #[test]
    fn knoid_matches_direct_formula() {
        let a = cr(3f64.sqrt() / 2.0);
        let b = c(0.0, 0.5);
        let e = knoid(3, a, b).unwrap();
        for z in [c(0.3, 0.2), c(-0.7, 1.4), c(2.0, -0.1)] {
            let phi = z * z / (a + b);
            let h = (a + b) * z * z / ((z * z * z - 1.0) * (z * z * z - 1.0));
            assert!((e.data.phi().eval(z).unwrap() - phi).norm() < 1e-10 * phi.norm());
            assert!((e.data.psi().eval(z).unwrap() + 1.0 / (z * z * (a + b))).norm() < 1e-10 * (1.0 + 1.0 / phi.norm()));
            assert!((e.data.dh().eval(z).unwrap() - h).norm() < 1e-10 * h.norm());
        }
    }

    #[test]
    fn alias_palmer_of_enneper_is_enneper() {
        let e = alias_palmer(&enneper1(cr(-1.0), cr(1.0)).unwrap(), i1()).unwrap();
        let z = c(0.4, -0.3);
        assert!((e.data.psi().eval(z).unwrap() - c(0.0, -1.0) / z).norm() < 1e-14);
    }

    #[test]
    fn build_by_name() {
        for it in list() {
            build_default(it.name).unwrap();
        }
        let p = Params::parse_pairs(&["t=0.25".into(), "s=2".into()]).unwrap();
        let e = build("catenoid", &p).unwrap();
        assert_eq!(e.params[0], ("t".to_string(), "0.25".to_string()));
        let p = Params::parse_pairs(&["x=1".into()]).unwrap();
        assert!(build("catenoid", &p).is_err());
        assert!(build("nosuch", &Params::default()).is_err());
        let p = Params::parse_pairs(&["base=catenoid".into(), "base.t=0".into(), "a=2i".into()]).unwrap();
        build("alias_palmer", &p).unwrap();
    }

    #[test]
    fn data_file_matches_catalog() {
        let e = from_data_text("label = cat\nphi = [0, 1]\npsi = [-1] / [0, 1]  # -1/z\ndh = [1] / [0, 1]\npunctures = 0, inf\n").unwrap();
        let k = catenoid(0.0, 1.0).unwrap();
        for z in [c(0.3, 0.7), c(-2.0, 0.1)] {
            let (a, b) = (e.data.xz_at(z).unwrap(), k.data.xz_at(z).unwrap());
            for j in 0..4 {
                assert!((a[j] - b[j]).norm() < 1e-12);
            }
        }
        assert!(from_data_text("phi = [1]\n").is_err());
        assert!(from_data_text("phi = [0,1]\nbogus = 1\n").is_err());
    }
}
