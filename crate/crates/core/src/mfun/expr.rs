use super::laurent::Laurent;
use super::poly::Root;
use super::rational::Rational;
use super::{Mat2, Point};
use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64 as C64;

/// One summand `rat(z) * exp(expo(z))`. The constant part of the exponent is
/// always folded into the rational lead, so `expo` has no `z^0` entry.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub rat: Rational,
    pub expo: Laurent,
}

/// Finite sum of rational-times-exponential terms.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MeroExpr {
    terms: Vec<Term>,
}

/// Zero/pole inventory of a single-term or algebraic expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Inventory {
    pub finite: Vec<(C64, i32)>,
    /// Order at infinity (positive = zero); only for algebraic input.
    pub at_infinity: Option<i32>,
    pub essential: Vec<Point>,
}

impl Inventory {
    pub fn entries(&self) -> Vec<(Point, i32)> {
        let mut v: Vec<(Point, i32)> = self.finite.iter().map(|&(z, k)| (Point::Finite(z), k)).collect();
        if let Some(k) = self.at_infinity {
            if k != 0 {
                v.push((Point::Infinity, k));
            }
        }
        v
    }

    pub fn poles(&self) -> Vec<(C64, u32)> {
        self.finite.iter().filter(|e| e.1 < 0).map(|&(z, k)| (z, (-k) as u32)).collect()
    }

    pub fn zeros(&self) -> Vec<(C64, u32)> {
        self.finite.iter().filter(|e| e.1 > 0).map(|&(z, k)| (z, k as u32)).collect()
    }
}

/// Value at a point on the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended {
    Finite(C64),
    Infinite,
}

fn c1() -> C64 {
    C64::new(1.0, 0.0)
}

impl MeroExpr {
    pub fn zero() -> Self {
        MeroExpr::default()
    }

    pub fn constant(c: C64) -> Self {
        MeroExpr::from_rational(Rational::constant(c))
    }

    pub fn real(x: f64) -> Self {
        MeroExpr::constant(C64::new(x, 0.0))
    }

    /// The coordinate function `z`.
    pub fn z() -> Self {
        MeroExpr::from_rational(Rational::linear(C64::default()))
    }

    /// `a z^k` for any integer k.
    pub fn monomial(a: C64, k: i32) -> Self {
        let origin = C64::default();
        let r = match k.cmp(&0) {
            std::cmp::Ordering::Equal => Rational::constant(a),
            std::cmp::Ordering::Greater => {
                Rational::from_factors(a, vec![Root { at: origin, mult: k as u32 }], vec![])
            }
            std::cmp::Ordering::Less => {
                Rational::from_factors(a, vec![], vec![Root { at: origin, mult: (-k) as u32 }])
            }
        };
        MeroExpr::from_rational(r)
    }

    /// `z - a`
    pub fn linear(a: C64) -> Self {
        MeroExpr::from_rational(Rational::linear(a))
    }

    pub fn from_rational(r: Rational) -> Self {
        MeroExpr::from_terms(vec![Term { rat: r, expo: Laurent::zero() }])
    }

    /// `exp(l(z))`
    pub fn exp(l: Laurent) -> Self {
        MeroExpr::from_terms(vec![Term { rat: Rational::constant(c1()), expo: l }])
    }

    pub fn from_terms(raw: Vec<Term>) -> Self {
        let mut terms: Vec<Term> = Vec::new();
        for t in raw {
            let c0 = t.expo.constant_term();
            let rat = if c0 == C64::default() { t.rat } else { t.rat.scale(c0.exp()) };
            let expo = t.expo.without_constant();
            if rat.is_zero() {
                continue;
            }
            if let Some(s) = terms.iter_mut().find(|s| s.expo.approx_eq(&expo, 1e-14)) {
                s.rat = s.rat.add(&rat);
            } else {
                terms.push(Term { rat, expo });
            }
        }
        terms.retain(|t| !t.rat.is_zero());
        MeroExpr { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_algebraic(&self) -> bool {
        self.terms.iter().all(|t| t.expo.is_zero())
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() <= 1
    }

    /// The rational function, when algebraic.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [t] if t.expo.is_zero() => Some(t.rat.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_constant())
    }

    pub fn add(&self, o: &MeroExpr) -> MeroExpr {
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        MeroExpr::from_terms(t)
    }

    pub fn neg(&self) -> MeroExpr {
        self.scale(-c1())
    }

    pub fn sub(&self, o: &MeroExpr) -> MeroExpr {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: C64) -> MeroExpr {
        MeroExpr::from_terms(
            self.terms.iter().map(|t| Term { rat: t.rat.scale(s), expo: t.expo.clone() }).collect(),
        )
    }

    pub fn mul(&self, o: &MeroExpr) -> MeroExpr {
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                out.push(Term { rat: a.rat.mul(&b.rat), expo: a.expo.add(&b.expo) });
            }
        }
        MeroExpr::from_terms(out)
    }

    /// Reciprocal; defined for single-term expressions only.
    pub fn recip(&self) -> Result<MeroExpr> {
        match self.terms.as_slice() {
            [t] => Ok(MeroExpr::from_terms(vec![Term {
                rat: t.rat.recip()?,
                expo: t.expo.scale(-c1()),
            }])),
            [] => Err(Error::Pole("reciprocal of zero".into())),
            _ => Err(Error::UnsupportedExpr("division by a multi-term sum".into())),
        }
    }

    pub fn div(&self, o: &MeroExpr) -> Result<MeroExpr> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, k: i32) -> Result<MeroExpr> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut out = MeroExpr::constant(c1());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    pub fn differentiate(&self) -> MeroExpr {
        MeroExpr::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let mut rat = t.rat.derivative();
                    if !t.expo.is_zero() {
                        rat = rat.add(&t.rat.mul(&laurent_as_rational(&t.expo.derivative())));
                    }
                    Term { rat, expo: t.expo.clone() }
                })
                .collect(),
        )
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut v = C64::default();
        for t in &self.terms {
            let e = t.expo.eval(z)?;
            v += t.rat.eval(z)? * e.exp();
        }
        Ok(v)
    }

    /// Natural log of the value (any branch). Single-term expressions never
    /// form the value itself, so huge exponential factors do not overflow.
    pub fn log_eval(&self, z: C64) -> Result<C64> {
        match self.terms.as_slice() {
            [] => Ok(C64::new(f64::NEG_INFINITY, 0.0)),
            [t] => {
                let e = t.expo.eval(z)?;
                for p in t.rat.poles() {
                    if z == p.at {
                        return Err(Error::Pole(format!("{z}")));
                    }
                }
                Ok(t.rat.log_eval(z) + e)
            }
            _ => Ok(self.eval(z)?.ln()),
        }
    }

    /// Points where some exponent has a pole.
    pub fn essential_points(&self) -> Vec<Point> {
        let mut v = Vec::new();
        if self.terms.iter().any(|t| t.expo.has_negative()) {
            v.push(Point::Finite(C64::default()));
        }
        if self.terms.iter().any(|t| t.expo.has_positive()) {
            v.push(Point::Infinity);
        }
        v
    }

    pub fn is_essential_at(&self, p: Point) -> bool {
        self.essential_points().contains(&p)
    }

    /// Finite poles of every term, plus the origin when it is essential.
    pub fn finite_singularities(&self) -> Vec<C64> {
        let mut v: Vec<C64> = Vec::new();
        for t in &self.terms {
            for p in t.rat.poles() {
                if !v.iter().any(|q| (q - p.at).norm() < 1e-12) {
                    v.push(p.at);
                }
            }
        }
        if self.is_essential_at(Point::Finite(C64::default())) && !v.iter().any(|q| q.norm() < 1e-12) {
            v.push(C64::default());
        }
        v
    }

    pub fn zeros_and_poles(&self) -> Result<Inventory> {
        let t = match self.terms.as_slice() {
            [] => return Err(Error::UnsupportedExpr("zero expression".into())),
            [t] => t,
            _ => return Err(Error::UnsupportedExpr("multi-term transcendental sum".into())),
        };
        let essential = self.essential_points();
        let origin_essential = essential.contains(&Point::Finite(C64::default()));
        let mut finite: Vec<(C64, i32)> = t
            .rat
            .zeros()
            .iter()
            .map(|r| (r.at, r.mult as i32))
            .chain(t.rat.poles().iter().map(|r| (r.at, -(r.mult as i32))))
            .filter(|(z, _)| !(origin_essential && z.norm() == 0.0))
            .collect();
        finite.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
        let at_infinity = t.expo.is_zero().then(|| t.rat.order_at_infinity());
        Ok(Inventory { finite, at_infinity, essential })
    }

    pub fn degree(&self) -> Result<u32> {
        self.as_rational().map(|r| r.degree()).ok_or(Error::NotAlgebraic)
    }

    /// Order of vanishing at `p` (negative for poles); single-term or algebraic only.
    pub fn order_at(&self, p: Point) -> Result<i32> {
        if self.is_essential_at(p) {
            return Err(Error::EssentialPoint(p.to_string()));
        }
        match (self.terms.as_slice(), p) {
            ([], _) => Err(Error::UnsupportedExpr("order of the zero expression".into())),
            ([t], Point::Finite(z)) => Ok(t.rat.order_at(z)),
            ([t], Point::Infinity) => Ok(t.rat.order_at_infinity()),
            _ => Err(Error::UnsupportedExpr("multi-term transcendental sum".into())),
        }
    }

    /// Value on the Riemann sphere; requires `p` non-essential.
    pub fn value_at(&self, p: Point) -> Result<Extended> {
        let ord = self.order_at(p)?;
        if ord > 0 {
            return Ok(Extended::Finite(C64::default()));
        }
        if ord < 0 {
            return Ok(Extended::Infinite);
        }
        match p {
            Point::Finite(z) => Ok(Extended::Finite(self.eval(z)?)),
            // non-essential at infinity means only negative exponents remain, which vanish
            Point::Infinity => Ok(Extended::Finite(self.terms[0].rat.lead())),
        }
    }

    /// Coefficient of `(z-p)^-1` by trapezoidal quadrature on a small circle,
    /// certified at half the radius.
    pub fn residue(&self, p: C64) -> Result<C64> {
        if self.is_essential_at(Point::Finite(p)) {
            return Err(Error::EssentialPoint(format!("{p}")));
        }
        let others: Vec<f64> = self
            .finite_singularities()
            .into_iter()
            .map(|q| (q - p).norm())
            .filter(|&d| d > 1e-12 * (1.0 + p.norm()))
            .collect();
        let dmin = others.iter().cloned().fold(f64::INFINITY, f64::min);
        if dmin < 1e-9 {
            return Err(Error::NotIsolated(format!("{p}")));
        }
        let r = (0.5 * dmin).min(1.0);
        let f = |z: C64| self.eval(z);
        let mut n = 256;
        loop {
            let a = quad::circle_trapezoid(&f, p, r, n)? / C64::new(0.0, 2.0 * std::f64::consts::PI);
            let b = quad::circle_trapezoid(&f, p, 0.5 * r, n)? / C64::new(0.0, 2.0 * std::f64::consts::PI);
            if (a - b).norm() <= 1e-9 * (1.0 + a.norm()) {
                return Ok(a);
            }
            if n >= 8192 {
                return Err(Error::NonConvergent(format!("residue at {p}: {a} vs {b}")));
            }
            n *= 2;
        }
    }

    /// `(a f + b) / (c f + d)` for algebraic f and det A = 1.
    pub fn mobius(&self, m: &Mat2) -> Result<MeroExpr> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (det - c1()).norm() > 1e-9 {
            return Err(Error::Param(format!("det A = {det}, expected 1")));
        }
        let f = self.as_rational().ok_or(Error::NotAlgebraic)?;
        let num = f.scale(m[0][0]).add(&Rational::constant(m[0][1]));
        let den = f.scale(m[1][0]).add(&Rational::constant(m[1][1]));
        Ok(MeroExpr::from_rational(num.div(&den)?))
    }

    /// `f(1/w)`, or the `dw` coefficient `-f(1/w)/w^2` of the form `f dz`.
    pub fn change_chart_to_infinity(&self, as_form: bool) -> MeroExpr {
        let g = MeroExpr::from_terms(
            self.terms
                .iter()
                .map(|t| Term { rat: t.rat.invert_argument(), expo: t.expo.invert_argument() })
                .collect(),
        );
        if as_form {
            g.mul(&MeroExpr::monomial(-c1(), -2))
        } else {
            g
        }
    }
}

fn laurent_as_rational(l: &Laurent) -> Rational {
    let mut r = Rational::zero();
    for (k, c) in l.coeffs() {
        let origin = C64::default();
        let m = if k >= 0 {
            Rational::from_factors(c, vec![Root { at: origin, mult: k as u32 }], vec![])
        } else {
            Rational::from_factors(c, vec![], vec![Root { at: origin, mult: (-k) as u32 }])
        };
        r = r.add(&m);
    }
    r
}

impl std::ops::Add for &MeroExpr {
    type Output = MeroExpr;
    fn add(self, o: &MeroExpr) -> MeroExpr {
        MeroExpr::add(self, o)
    }
}

impl std::ops::Sub for &MeroExpr {
    type Output = MeroExpr;
    fn sub(self, o: &MeroExpr) -> MeroExpr {
        MeroExpr::sub(self, o)
    }
}

impl std::ops::Mul for &MeroExpr {
    type Output = MeroExpr;
    fn mul(self, o: &MeroExpr) -> MeroExpr {
        MeroExpr::mul(self, o)
    }
}

impl std::ops::Neg for &MeroExpr {
    type Output = MeroExpr;
    fn neg(self) -> MeroExpr {
        MeroExpr::neg(self)
    }
}
