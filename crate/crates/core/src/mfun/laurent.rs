use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

/// Finite Laurent polynomial `sum c_k z^k`; no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Laurent {
    coeffs: BTreeMap<i32, C64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn from_pairs(pairs: &[(i32, C64)]) -> Self {
        let mut l = Laurent::zero();
        for &(k, c) in pairs {
            l.add_term(k, c);
        }
        l
    }

    /// `a z^k`
    pub fn monomial(k: i32, a: C64) -> Self {
        Laurent::from_pairs(&[(k, a)])
    }

    fn add_term(&mut self, k: i32, c: C64) {
        let v = self.coeffs.get(&k).copied().unwrap_or_default() + c;
        if v == C64::default() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, v);
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&k| k == 0)
    }

    pub fn constant_term(&self) -> C64 {
        self.coeffs.get(&0).copied().unwrap_or_default()
    }

    pub fn without_constant(&self) -> Laurent {
        let mut l = self.clone();
        l.coeffs.remove(&0);
        l
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn has_negative(&self) -> bool {
        self.min_exp().is_some_and(|k| k < 0)
    }

    pub fn has_positive(&self) -> bool {
        self.max_exp().is_some_and(|k| k > 0)
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut l = self.clone();
        for (k, c) in o.coeffs() {
            l.add_term(k, c);
        }
        l
    }

    pub fn scale(&self, s: C64) -> Laurent {
        let mut l = Laurent::zero();
        for (k, c) in self.coeffs() {
            l.add_term(k, c * s);
        }
        l
    }

    pub fn derivative(&self) -> Laurent {
        let mut l = Laurent::zero();
        for (k, c) in self.coeffs() {
            if k != 0 {
                l.add_term(k - 1, c * k as f64);
            }
        }
        l
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if z == C64::default() && self.has_negative() {
            return Err(Error::EssentialPoint("0".into()));
        }
        Ok(self.coeffs().map(|(k, c)| c * z.powi(k)).sum())
    }

    /// Substitute `z = 1/w`.
    pub fn invert_argument(&self) -> Laurent {
        Laurent { coeffs: self.coeffs().map(|(k, c)| (-k, c)).collect() }
    }

    pub fn approx_eq(&self, o: &Laurent, tol: f64) -> bool {
        self.coeffs.len() == o.coeffs.len()
            && self.coeffs().zip(o.coeffs()).all(|((k, a), (j, b))| {
                k == j && (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_zero_coefficients_stored() {
        let a = Laurent::from_pairs(&[(1, C64::new(0.3, 0.0)), (-2, C64::new(1.0, 0.0))]);
        let b = a.add(&Laurent::monomial(1, C64::new(-0.3, 0.0)));
        assert_eq!(b.coeffs().count(), 1);
        assert_eq!(b.min_exp(), Some(-2));
    }

    #[test]
    fn derivative_and_eval() {
        // z^2 + z^-2
        let l = Laurent::from_pairs(&[(2, C64::new(1.0, 0.0)), (-2, C64::new(1.0, 0.0))]);
        let z = C64::new(0.7, 0.2);
        let d = l.derivative().eval(z).unwrap();
        let want = 2.0 * z - 2.0 / z.powu(3);
        assert!((d - want).norm() < 1e-14);
        assert!(l.eval(C64::default()).is_err());
    }
}
