//! Dense complex polynomials and a root finder.

use num_complex::Complex64 as C64;

/// A root with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub at: C64,
    pub mult: u32,
}

/// Coefficients in increasing degree; `c[i]` multiplies `z^i`.
/// Trailing zeros are trimmed, so the empty vector is the zero polynomial.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    c: Vec<C64>,
}

// Relative size below which a leading coefficient is treated as cancelled.
const TRIM: f64 = 1e-13;

impl Poly {
    pub fn new(mut c: Vec<C64>) -> Self {
        while matches!(c.last(), Some(x) if *x == C64::new(0.0, 0.0)) {
            c.pop();
        }
        Poly { c }
    }

    /// Trims leading coefficients that are rounding noise relative to the largest one.
    pub fn new_trimmed(c: Vec<C64>) -> Self {
        let big = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let mut p = Poly::new(c);
        while matches!(p.c.last(), Some(x) if x.norm() <= TRIM * big) {
            p.c.pop();
        }
        p
    }

    pub fn constant(a: C64) -> Self {
        Poly::new(vec![a])
    }

    pub fn one() -> Self {
        Poly::constant(C64::new(1.0, 0.0))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lead(&self) -> C64 {
        self.c.last().copied().unwrap_or_default()
    }

    /// `lead * prod (z - r)^m`.
    pub fn from_roots(lead: C64, roots: &[Root]) -> Self {
        let mut c = vec![lead];
        for r in roots {
            for _ in 0..r.mult {
                let mut next = vec![C64::default(); c.len() + 1];
                for (i, &a) in c.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= a * r.at;
                }
                c = next;
            }
        }
        Poly::new(c)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.c.iter().rev().fold(C64::default(), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| a * i as f64)
                .collect(),
        )
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                self.c.get(i).copied().unwrap_or_default() + o.c.get(i).copied().unwrap_or_default()
            })
            .collect();
        Poly::new_trimmed(c)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut c = vec![C64::default(); self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.c.iter().map(|&a| a * s).collect())
    }

    /// Roots with multiplicities. Exact zeros at the origin are split off first,
    /// the rest are found by Aberth iteration, grouped into clusters and each
    /// cluster is polished by Newton on the derivative of order (size - 1).
    pub fn roots(&self) -> Vec<Root> {
        let mut out = Vec::new();
        if self.c.len() <= 1 {
            return out;
        }
        let big = self.c.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let mut k0 = 0;
        while k0 < self.c.len() - 1 && self.c[k0].norm() <= 1e-15 * big {
            k0 += 1;
        }
        if k0 > 0 {
            out.push(Root { at: C64::default(), mult: k0 as u32 });
        }
        let rest = Poly::new(self.c[k0..].to_vec());
        if rest.c.len() <= 1 {
            return out;
        }
        let approx = aberth(&rest.c);
        out.extend(cluster_and_polish(&rest, &approx));
        out
    }
}

fn aberth(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let lead = c[n];
    let a: Vec<C64> = c.iter().map(|&x| x / lead).collect();
    let p = Poly { c: a.clone() };
    let dp = p.derivative();
    let r0 = a[0].norm().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let pv = p.eval(z[k]);
            if pv == C64::default() {
                continue;
            }
            let ratio = pv / dp.eval(z[k]);
            let s: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == C64::default() {
                        C64::new(1e300, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

fn cluster_and_polish(p: &Poly, approx: &[C64]) -> Vec<Root> {
    let n = approx.len();
    // single-linkage clusters at a loose tolerance (multiple roots come out of
    // Aberth only to about eps^(1/m))
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = 1e-4 * (1.0 + approx[i].norm().max(approx[j].norm()));
            if (approx[i] - approx[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[label[r]].push(i);
    }
    let mut out: Vec<Root> = Vec::new();
    for g in groups {
        let m = g.len();
        let mean: C64 = g.iter().map(|&i| approx[i]).sum::<C64>() / m as f64;
        let mut q = p.clone();
        for _ in 1..m {
            q = q.derivative();
        }
        match newton_polish(&q, mean) {
            Some(z) if (z - mean).norm() <= 1e-3 * (1.0 + mean.norm()) => {
                out.push(Root { at: z, mult: m as u32 })
            }
            _ => {
                for &i in &g {
                    let z = newton_polish(p, approx[i]).unwrap_or(approx[i]);
                    out.push(Root { at: z, mult: 1 });
                }
            }
        }
    }
    merge_close(out, 1e-10)
}

fn newton_polish(q: &Poly, z0: C64) -> Option<C64> {
    let dq = q.derivative();
    let mut z = z0;
    for _ in 0..60 {
        let d = dq.eval(z);
        if d == C64::default() {
            return Some(z);
        }
        let step = q.eval(z) / d;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    Some(z)
}

/// Merge roots closer than `tol` (relative to 1 + |z|), summing multiplicities.
pub fn merge_close(roots: Vec<Root>, tol: f64) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::new();
    for r in roots {
        if let Some(o) = out
            .iter_mut()
            .find(|o| (o.at - r.at).norm() <= tol * (1.0 + o.at.norm()))
        {
            let total = o.mult + r.mult;
            o.at = (o.at * o.mult as f64 + r.at * r.mult as f64) / total as f64;
            o.mult = total;
        } else {
            out.push(r);
        }
    }
    out
}
