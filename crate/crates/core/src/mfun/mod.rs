//! Meromorphic expressions: sums of rational functions times exponentials of
//! Laurent polynomials.

mod expr;
mod laurent;
mod parse;
mod poly;
mod rational;

pub use expr::{Extended, Inventory, MeroExpr, Term};
pub use laurent::Laurent;
pub use parse::{fmt_cplx, parse};
pub use poly::{Poly, Root};
pub use rational::{Rational, ROOT_TOL};

use num_complex::Complex64 as C64;

/// 2x2 complex matrix, row major.
pub type Mat2 = [[C64; 2]; 2];

pub fn identity() -> Mat2 {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    [[l, o], [o, l]]
}

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(C64),
    Infinity,
}

impl Point {
    pub fn finite(re: f64, im: f64) -> Self {
        Point::Finite(C64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn approx_eq(&self, o: &Point, tol: f64) -> bool {
        match (self, o) {
            (Point::Infinity, Point::Infinity) => true,
            (Point::Finite(a), Point::Finite(b)) => (a - b).norm() <= tol,
            _ => false,
        }
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Infinity => write!(f, "inf"),
            Point::Finite(z) => write!(f, "{}", fmt_cplx(*z)),
        }
    }
}

impl std::str::FromStr for Point {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(Point::Infinity);
        }
        let e = parse(&format!("[{t}]"))?;
        let r = e.as_rational().ok_or_else(|| crate::error::Error::Parse(s.into()))?;
        Ok(Point::Finite(r.lead()))
    }
}

/// Random unimodular matrix from four complex numbers (rescaled to det 1).
pub fn unimodular(a: C64, b: C64, c: C64, d: C64) -> Option<Mat2> {
    let det = a * d - b * c;
    if det.norm() < 1e-6 {
        return None;
    }
    let s = det.sqrt().inv();
    Some([[a * s, b * s], [c * s, d * s]])
}
