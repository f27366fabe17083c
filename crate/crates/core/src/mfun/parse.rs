//! Text form of `MeroExpr`.
//!
//! ```text
//! expr    := term ('+' term)*
//! term    := rat ['*' 'exp(' laurent ')'] | 'exp(' laurent ')'
//! rat     := poly ['/' poly]
//! poly    := '[' cplx (',' cplx)* ']'          coefficients c0, c1, ...
//! laurent := '{' int ':' cplx (',' int ':' cplx)* '}'
//! cplx    := real | real 'i' | real ('+'|'-') real 'i' | 'i' | '-i'
//! ```

use super::expr::{MeroExpr, Term};
use super::laurent::Laurent;
use super::poly::Poly;
use super::rational::Rational;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }
    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.i += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.i))
    }
    fn word(&mut self, w: &str) -> bool {
        self.skip_ws();
        if self.s[self.i..].starts_with(w.as_bytes()) {
            self.i += w.len();
            true
        } else {
            false
        }
    }

    // unsigned or signed float literal without surrounding whitespace
    fn real(&mut self) -> Option<f64> {
        let start = self.i;
        let mut j = self.i;
        let s = self.s;
        if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
            j += 1;
        }
        let digits = j;
        while j < s.len() && (s[j].is_ascii_digit() || s[j] == b'.') {
            j += 1;
        }
        if j == digits {
            return None;
        }
        if j < s.len() && (s[j] == b'e' || s[j] == b'E') {
            let mut k = j + 1;
            if k < s.len() && (s[k] == b'+' || s[k] == b'-') {
                k += 1;
            }
            if k < s.len() && s[k].is_ascii_digit() {
                while k < s.len() && s[k].is_ascii_digit() {
                    k += 1;
                }
                j = k;
            }
        }
        let v = std::str::from_utf8(&s[start..j]).ok()?.parse().ok()?;
        self.i = j;
        Some(v)
    }

    fn cplx(&mut self) -> Result<C64> {
        self.skip_ws();
        let s = self.s;
        // bare i / -i / +i
        for (pat, v) in [("-i", -1.0), ("+i", 1.0), ("i", 1.0)] {
            if s[self.i..].starts_with(pat.as_bytes()) {
                let after = s.get(self.i + pat.len()).copied();
                if !after.is_some_and(|b| b.is_ascii_alphanumeric() || b == b'.') {
                    self.i += pat.len();
                    return Ok(C64::new(0.0, v));
                }
            }
        }
        let a = self.real().ok_or_else(|| self.err("expected a number"))?;
        if s.get(self.i) == Some(&b'i') {
            self.i += 1;
            return Ok(C64::new(0.0, a));
        }
        if matches!(s.get(self.i), Some(b'+') | Some(b'-')) {
            let save = self.i;
            let sign = if s[self.i] == b'-' { -1.0 } else { 1.0 };
            if s.get(self.i + 1) == Some(&b'i') {
                self.i += 2;
                return Ok(C64::new(a, sign));
            }
            if let Some(b) = self.real() {
                if s.get(self.i) == Some(&b'i') {
                    self.i += 1;
                    return Ok(C64::new(a, b));
                }
            }
            self.i = save;
        }
        Ok(C64::new(a, 0.0))
    }

    fn poly(&mut self) -> Result<Poly> {
        self.expect(b'[')?;
        let mut c = Vec::new();
        if !self.eat(b']') {
            loop {
                c.push(self.cplx()?);
                if self.eat(b']') {
                    break;
                }
                self.expect(b',')?;
            }
        }
        Ok(Poly::new(c))
    }

    fn int(&mut self) -> Result<i32> {
        self.skip_ws();
        let v = self.real().ok_or_else(|| self.err("expected an exponent"))?;
        if v.fract() != 0.0 {
            return Err(self.err("exponent must be an integer"));
        }
        Ok(v as i32)
    }

    fn laurent(&mut self) -> Result<Laurent> {
        self.expect(b'{')?;
        let mut pairs = Vec::new();
        if !self.eat(b'}') {
            loop {
                let k = self.int()?;
                self.expect(b':')?;
                pairs.push((k, self.cplx()?));
                if self.eat(b'}') {
                    break;
                }
                self.expect(b',')?;
            }
        }
        Ok(Laurent::from_pairs(&pairs))
    }

    fn exp_call(&mut self) -> Result<Laurent> {
        if !self.word("exp") {
            return Err(self.err("expected exp("));
        }
        self.expect(b'(')?;
        let l = self.laurent()?;
        self.expect(b')')?;
        Ok(l)
    }

    fn term(&mut self) -> Result<Term> {
        if self.peek() == Some(b'e') {
            let expo = self.exp_call()?;
            return Ok(Term { rat: Rational::constant(C64::new(1.0, 0.0)), expo });
        }
        let num = self.poly()?;
        let den = if self.eat(b'/') { self.poly()? } else { Poly::one() };
        let rat = Rational::from_polys(&num, &den)?;
        let expo = if self.eat(b'*') { self.exp_call()? } else { Laurent::zero() };
        Ok(Term { rat, expo })
    }
}

pub fn parse(text: &str) -> Result<MeroExpr> {
    let mut cur = Cursor { s: text.as_bytes(), i: 0 };
    let mut terms = vec![cur.term()?];
    while cur.eat(b'+') {
        terms.push(cur.term()?);
    }
    if cur.peek().is_some() {
        return Err(cur.err("trailing input"));
    }
    Ok(MeroExpr::from_terms(terms))
}

pub fn fmt_cplx(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 || z.im.is_sign_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn fmt_poly(p: &Poly) -> String {
    let parts: Vec<String> = p.coeffs().iter().map(|&c| fmt_cplx(c)).collect();
    if parts.is_empty() {
        "[0]".into()
    } else {
        format!("[{}]", parts.join(", "))
    }
}

impl std::fmt::Display for MeroExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms().is_empty() {
            return write!(f, "[0]");
        }
        let mut first = true;
        for t in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_poly(&t.rat.num_poly()))?;
            if !t.rat.poles().is_empty() {
                write!(f, "/{}", fmt_poly(&t.rat.den_poly()))?;
            }
            if !t.expo.is_zero() {
                let parts: Vec<String> = t.expo.coeffs().map(|(k, c)| format!("{k}: {}", fmt_cplx(c))).collect();
                write!(f, " * exp({{{}}})", parts.join(", "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let e = parse("[1, 2i, 1+2i, -1.5e-3-2i, i, -i, 3e2]").unwrap();
        let r = e.as_rational().unwrap();
        let p = r.num_poly();
        let c = p.coeffs();
        // coefficients go through a root solve, so compare loosely
        let want = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 2.0),
            C64::new(1.0, 2.0),
            C64::new(-1.5e-3, -2.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
            C64::new(300.0, 0.0),
        ];
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn catenoid_height_round_trip() {
        let e = parse("[-0.5, 1] / [0, 0, 1]").unwrap();
        let z = C64::new(0.3, 0.8);
        assert!((e.eval(z).unwrap() - (z - 0.5) / (z * z)).norm() < 1e-14);
        let back = parse(&e.to_string()).unwrap();
        assert!((back.eval(z).unwrap() - e.eval(z).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn exponential_terms() {
        let e = parse("[0, 0, 1] * exp({1: 0.3}) + exp({-1: -1})").unwrap();
        let z = C64::new(0.7, -0.4);
        let want = z * z * (0.3 * z).exp() + (-1.0 / z).exp();
        assert!((e.eval(z).unwrap() - want).norm() < 1e-13);
        let back = parse(&e.to_string()).unwrap();
        assert!((back.eval(z).unwrap() - want).norm() < 1e-13);
    }

    #[test]
    fn errors() {
        assert!(parse("[1, 2").is_err());
        assert!(parse("[1]/[0]").is_err());
        assert!(parse("[1] junk").is_err());
        assert!(parse("exp({0.5: 1})").is_err());
    }
}
