//! Rational functions kept in factored form.
//!
//! A value is `lead * prod (z - a)^m / prod (z - b)^n` with disjoint zero and
//! pole sets. Products and quotients merge factor lists exactly; sums go through
//! coefficient form and a root solve of the new numerator only.

use super::poly::{merge_close, Poly, Root};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Two factor locations closer than this (relative) are the same root.
pub const ROOT_TOL: f64 = 1e-10;
// Numerator roots produced by a sum are only accurate to about sqrt(eps) when
// they cancel a double pole, so cancellation against known poles is looser.
const CANCEL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    lead: C64,
    zeros: Vec<Root>,
    poles: Vec<Root>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl Rational {
    pub fn zero() -> Self {
        Rational { lead: C64::default(), zeros: vec![], poles: vec![] }
    }

    pub fn constant(c: C64) -> Self {
        Rational { lead: c, zeros: vec![], poles: vec![] }
    }

    /// `z - a`
    pub fn linear(a: C64) -> Self {
        Rational { lead: one(), zeros: vec![Root { at: a, mult: 1 }], poles: vec![] }
    }

    pub fn from_factors(lead: C64, zeros: Vec<Root>, poles: Vec<Root>) -> Self {
        Rational { lead, zeros, poles }.normalized(ROOT_TOL)
    }

    pub fn from_polys(num: &Poly, den: &Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(Rational::zero());
        }
        let r = Rational {
            lead: num.lead() / den.lead(),
            zeros: num.roots(),
            poles: den.roots(),
        };
        Ok(r.normalized(CANCEL_TOL))
    }

    fn normalized(mut self, tol: f64) -> Self {
        if self.lead == C64::default() {
            return Rational::zero();
        }
        self.zeros = merge_close(std::mem::take(&mut self.zeros), ROOT_TOL);
        self.poles = merge_close(std::mem::take(&mut self.poles), ROOT_TOL);
        for z in self.zeros.iter_mut() {
            for p in self.poles.iter_mut() {
                if p.mult > 0 && z.mult > 0 && (z.at - p.at).norm() <= tol * (1.0 + p.at.norm()) {
                    let k = z.mult.min(p.mult);
                    z.mult -= k;
                    p.mult -= k;
                }
            }
        }
        self.zeros.retain(|r| r.mult > 0);
        self.poles.retain(|r| r.mult > 0);
        // canonical order makes equality checks and serialization deterministic
        let key = |r: &Root| (r.at.re, r.at.im);
        self.zeros.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
        self.poles.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
        self
    }

    pub fn lead(&self) -> C64 {
        self.lead
    }
    pub fn zeros(&self) -> &[Root] {
        &self.zeros
    }
    pub fn poles(&self) -> &[Root] {
        &self.poles
    }
    pub fn is_zero(&self) -> bool {
        self.lead == C64::default()
    }
    pub fn is_constant(&self) -> bool {
        self.zeros.is_empty() && self.poles.is_empty()
    }

    pub fn num_degree(&self) -> u32 {
        self.zeros.iter().map(|r| r.mult).sum()
    }
    pub fn den_degree(&self) -> u32 {
        self.poles.iter().map(|r| r.mult).sum()
    }

    /// Sheet count as a map to the Riemann sphere.
    pub fn degree(&self) -> u32 {
        if self.is_zero() {
            0
        } else {
            self.num_degree().max(self.den_degree())
        }
    }

    /// Order of vanishing at infinity (negative for a pole there).
    pub fn order_at_infinity(&self) -> i32 {
        self.den_degree() as i32 - self.num_degree() as i32
    }

    pub fn num_poly(&self) -> Poly {
        if self.is_zero() {
            return Poly::default();
        }
        Poly::from_roots(self.lead, &self.zeros)
    }

    pub fn den_poly(&self) -> Poly {
        Poly::from_roots(one(), &self.poles)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut v = self.lead;
        for p in &self.poles {
            let d = z - p.at;
            if d == C64::default() {
                return Err(Error::Pole(format!("{}", p.at)));
            }
            v /= d.powu(p.mult);
        }
        if self.is_zero() {
            return Ok(v);
        }
        for r in &self.zeros {
            v *= (z - r.at).powu(r.mult);
        }
        Ok(v)
    }

    /// Natural log of the value (any branch); `-inf` real part at a zero,
    /// `+inf` at a pole.
    pub fn log_eval(&self, z: C64) -> C64 {
        let mut v = self.lead.ln();
        for r in &self.zeros {
            v += (z - r.at).ln() * r.mult as f64;
        }
        for p in &self.poles {
            v -= (z - p.at).ln() * p.mult as f64;
        }
        v
    }

    pub fn scale(&self, s: C64) -> Rational {
        Rational { lead: self.lead * s, ..self.clone() }.normalized(ROOT_TOL)
    }

    pub fn neg(&self) -> Rational {
        self.scale(-one())
    }

    pub fn mul(&self, o: &Rational) -> Rational {
        if self.is_zero() || o.is_zero() {
            return Rational::zero();
        }
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&o.zeros);
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&o.poles);
        Rational { lead: self.lead * o.lead, zeros, poles }.normalized(ROOT_TOL)
    }

    pub fn recip(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::Pole("reciprocal of zero".into()));
        }
        Ok(Rational { lead: self.lead.inv(), zeros: self.poles.clone(), poles: self.zeros.clone() })
    }

    pub fn div(&self, o: &Rational) -> Result<Rational> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, k: i32) -> Result<Rational> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut out = Rational::constant(one());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    pub fn add(&self, o: &Rational) -> Rational {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        // common denominator with max multiplicities
        let mut lcm: Vec<Root> = self.poles.clone();
        for p in &o.poles {
            match lcm
                .iter_mut()
                .find(|q| (q.at - p.at).norm() <= ROOT_TOL * (1.0 + q.at.norm()))
            {
                Some(q) => q.mult = q.mult.max(p.mult),
                None => lcm.push(*p),
            }
        }
        let cofactor = |poles: &[Root]| -> Vec<Root> {
            lcm.iter()
                .filter_map(|q| {
                    let have = poles
                        .iter()
                        .find(|p| (q.at - p.at).norm() <= ROOT_TOL * (1.0 + q.at.norm()))
                        .map_or(0, |p| p.mult);
                    (q.mult > have).then_some(Root { at: q.at, mult: q.mult - have })
                })
                .collect()
        };
        let mut za = self.zeros.clone();
        za.extend(cofactor(&self.poles));
        let mut zb = o.zeros.clone();
        zb.extend(cofactor(&o.poles));
        let num = Poly::from_roots(self.lead, &za).add(&Poly::from_roots(o.lead, &zb));
        if num.is_zero() {
            return Rational::zero();
        }
        Rational { lead: num.lead(), zeros: num.roots(), poles: lcm }.normalized(CANCEL_TOL)
    }

    pub fn sub(&self, o: &Rational) -> Rational {
        self.add(&o.neg())
    }

    /// Derivative through the logarithmic derivative: only the new numerator
    /// factor needs a root solve.
    pub fn derivative(&self) -> Rational {
        if self.is_zero() || self.is_constant() {
            return Rational::zero();
        }
        // f'/f = P/Q with Q = prod over distinct zeros and poles
        let all: Vec<(C64, f64)> = self
            .zeros
            .iter()
            .map(|r| (r.at, r.mult as f64))
            .chain(self.poles.iter().map(|r| (r.at, -(r.mult as f64))))
            .collect();
        let mut p = Poly::default();
        for (i, &(_, w)) in all.iter().enumerate() {
            let others: Vec<Root> = all
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &(at, _))| Root { at, mult: 1 })
                .collect();
            p = p.add(&Poly::from_roots(C64::new(w, 0.0), &others));
        }
        if p.is_zero() {
            return Rational::zero();
        }
        let mut zeros: Vec<Root> = self
            .zeros
            .iter()
            .filter(|r| r.mult > 1)
            .map(|r| Root { at: r.at, mult: r.mult - 1 })
            .collect();
        zeros.extend(p.roots());
        let poles = self.poles.iter().map(|r| Root { at: r.at, mult: r.mult + 1 }).collect();
        Rational { lead: self.lead * p.lead(), zeros, poles }.normalized(ROOT_TOL)
    }

    /// `f(1/w)` in factored form, exactly.
    pub fn invert_argument(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let mut lead = self.lead;
        let mut zeros = Vec::new();
        let mut poles = Vec::new();
        // 1/w - a = -a (w - 1/a) / w, and 1/w - 0 = 1/w
        let mut wpow: i64 = 0;
        for r in &self.zeros {
            wpow -= r.mult as i64;
            if r.at != C64::default() {
                lead *= (-r.at).powu(r.mult);
                zeros.push(Root { at: r.at.inv(), mult: r.mult });
            }
        }
        for p in &self.poles {
            wpow += p.mult as i64;
            if p.at != C64::default() {
                lead /= (-p.at).powu(p.mult);
                poles.push(Root { at: p.at.inv(), mult: p.mult });
            }
        }
        let origin = C64::default();
        if wpow > 0 {
            zeros.push(Root { at: origin, mult: wpow as u32 });
        } else if wpow < 0 {
            poles.push(Root { at: origin, mult: (-wpow) as u32 });
        }
        Rational { lead, zeros, poles }.normalized(ROOT_TOL)
    }

    /// Order of vanishing at a finite point (negative for a pole).
    pub fn order_at(&self, p: C64) -> i32 {
        let near = |r: &&Root| (r.at - p).norm() <= ROOT_TOL * (1.0 + p.norm());
        let z = self.zeros.iter().find(near).map_or(0, |r| r.mult as i32);
        let q = self.poles.iter().find(near).map_or(0, |r| r.mult as i32);
        z - q
    }

    pub fn approx_eq(&self, o: &Rational, tol: f64) -> bool {
        let close = |a: &[Root], b: &[Root]| {
            a.len() == b.len()
                && a.iter().all(|r| {
                    b.iter()
                        .any(|s| s.mult == r.mult && (s.at - r.at).norm() <= tol * (1.0 + r.at.norm()))
                })
        };
        (self.lead - o.lead).norm() <= tol * (1.0 + self.lead.norm())
            && close(&self.zeros, &o.zeros)
            && close(&self.poles, &o.poles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn z() -> Rational {
        Rational::linear(c(0.0, 0.0))
    }

    #[test]
    fn catenoid_height_factors() {
        // (z - t)/z^2
        let f = Rational::linear(c(0.5, 0.0)).div(&z().mul(&z())).unwrap();
        assert_eq!(f.order_at(c(0.5, 0.0)), 1);
        assert_eq!(f.order_at(c(0.0, 0.0)), -2);
        assert_eq!(f.order_at_infinity(), 1);
        assert!((f.eval(c(2.0, 0.0)).unwrap() - c(0.375, 0.0)).norm() < 1e-15);
        assert!(f.eval(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn sum_cancels_common_factor() {
        // (z+1)/z - 1 = 1/z
        let a = Rational::linear(c(-1.0, 0.0)).div(&z()).unwrap();
        let b = a.sub(&Rational::constant(c(1.0, 0.0)));
        assert!(b.approx_eq(&z().recip().unwrap(), 1e-12), "{b:?}");
        // 1 + z * (-1/z) = 0
        let m = z().mul(&z().recip().unwrap().neg());
        assert!(Rational::constant(c(1.0, 0.0)).add(&m).is_zero());
    }

    #[test]
    fn sum_cancelling_double_pole() {
        // 1/(z-1)^2 + (z^2 - 2z)/(z-1)^2 = 1
        let d = Rational::linear(c(1.0, 0.0)).powi(2).unwrap();
        let a = d.recip().unwrap();
        let b = z().mul(&Rational::linear(c(2.0, 0.0))).div(&d).unwrap();
        let s = a.add(&b);
        assert!(s.approx_eq(&Rational::constant(c(1.0, 0.0)), 1e-9), "{s:?}");
    }

    #[test]
    fn derivative_of_quotient() {
        // d/dz (z-t)/z^2 = (2t - z)/z^3
        let t = 0.5;
        let f = Rational::linear(c(t, 0.0)).div(&z().powi(2).unwrap()).unwrap();
        let df = f.derivative();
        for &x in &[c(0.3, 0.7), c(-1.2, 0.4), c(2.0, -3.0)] {
            let want = (2.0 * t - x) / x.powu(3);
            assert!((df.eval(x).unwrap() - want).norm() < 1e-13 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn invert_argument_matches_substitution() {
        let f = Rational::from_factors(
            c(2.0, 1.0),
            vec![Root { at: c(0.0, 0.0), mult: 2 }, Root { at: c(1.0, 1.0), mult: 1 }],
            vec![Root { at: c(-2.0, 0.5), mult: 3 }],
        );
        let g = f.invert_argument();
        for &w in &[c(0.3, 0.2), c(-1.1, 0.9)] {
            let want = f.eval(w.inv()).unwrap();
            assert!((g.eval(w).unwrap() - want).norm() < 1e-13 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn degree_is_sheet_count() {
        // z^2 (z^2 + 1)
        let f = z().powi(2).unwrap().mul(&Rational::linear(c(0.0, 1.0))).mul(&Rational::linear(c(0.0, -1.0)));
        assert_eq!(f.degree(), 4);
        assert_eq!(Rational::constant(c(3.0, 0.0)).degree(), 0);
    }
}
