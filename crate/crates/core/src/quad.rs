//! Quadrature rules: Gauss-Legendre nodes, adaptive Gauss-Kronrod (7, 15) for
//! vector integrands, and the trapezoid rule on circles.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // p1 = P_n(z), p0 = P_{n-1}(z)
            let (mut p0, mut p1) = (0.0, 1.0);
            for k in 1..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> Result<([C64; N], f64)>
where
    F: Fn(f64) -> Result<[C64; N]>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [C64::default(); N];
    let mut g = [C64::default(); N];
    let fc = f(c)?;
    for i in 0..N {
        k[i] += fc[i] * WGK[7];
        g[i] += fc[i] * WG[3];
    }
    for j in 0..7 {
        let f1 = f(c - h * XGK[j])?;
        let f2 = f(c + h * XGK[j])?;
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..N {
        k[i] *= h;
        g[i] *= h;
        err = err.max((k[i] - g[i]).norm());
    }
    Ok((k, err))
}

/// Adaptive G7-K15 on [a, b] for a vector of complex integrands.
/// Stops when the summed error estimate is below `tol * (1 + |I|)`.
pub fn adaptive<const N: usize, F>(f: &F, a: f64, b: f64, tol: f64) -> Result<([C64; N], f64)>
where
    F: Fn(f64) -> Result<[C64; N]>,
{
    let mut pieces: Vec<(f64, f64, [C64; N], f64)> = Vec::new();
    let (v, e) = gk15(f, a, b)?;
    pieces.push((a, b, v, e));
    for _ in 0..2000 {
        let total: [C64; N] = sum_pieces(&pieces);
        let norm = total.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if !err.is_finite() || !norm.is_finite() {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
        if err <= tol * (1.0 + norm) {
            return Ok((total, err));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, _) = pieces.swap_remove(idx);
        let m = 0.5 * (pa + pb);
        let (v1, e1) = gk15(f, pa, m)?;
        let (v2, e2) = gk15(f, m, pb)?;
        pieces.push((pa, m, v1, e1));
        pieces.push((m, pb, v2, e2));
    }
    Err(Error::Quadrature("subdivision limit reached".into()))
}

fn sum_pieces<const N: usize>(pieces: &[(f64, f64, [C64; N], f64)]) -> [C64; N] {
    let mut t = [C64::default(); N];
    for p in pieces {
        for i in 0..N {
            t[i] += p.2[i];
        }
    }
    t
}

/// Counterclockwise trapezoid sum of `f(z) dz` on `|z - c| = r` with `n`
/// half-offset nodes.
pub fn circle_trapezoid<F>(f: &F, c: C64, r: f64, n: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut s = C64::default();
    for k in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / n as f64);
        s += f(c + r * e)? * e;
    }
    Ok(s * C64::new(0.0, r * 2.0 * PI / n as f64))
}

/// Trapezoid sum of `f(z) conj(dz)` on the same circle.
pub fn circle_trapezoid_conj<F>(f: &F, c: C64, r: f64, n: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut s = C64::default();
    for k in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / n as f64);
        s += f(c + r * e)? * e.conj();
    }
    Ok(s * C64::new(0.0, -r * 2.0 * PI / n as f64))
}

/// Aitken delta-squared extrapolation of the last three terms; falls back to
/// the last value when the denominator is degenerate.
pub fn aitken(a: C64, b: C64, c: C64) -> C64 {
    let den = c - 2.0 * b + a;
    if den.norm() <= 1e-300 || den.norm() < 1e-12 * (c - b).norm() {
        return c;
    }
    let v = c - (c - b) * (c - b) / den;
    // only trust it when it moves the estimate by less than the last step
    if (v - c).norm() <= (c - b).norm() * 2.0 {
        v
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaks() {
        // integral of 1/(1e-4 + x^2) on [-1, 1] = 2 * atan(100) * 100
        let f = |x: f64| Ok([C64::new(1.0 / (1e-4 + x * x), 0.0)]);
        let (v, _) = adaptive(&f, -1.0, 1.0, 1e-12).unwrap();
        let want = 200.0 * (100.0f64).atan();
        assert!((v[0].re - want).abs() < 1e-8 * want);
    }

    #[test]
    fn circle_rules() {
        let f = |z: C64| Ok(z.inv());
        let v = circle_trapezoid(&f, C64::default(), 0.3, 16).unwrap();
        assert!((v - C64::new(0.0, 2.0 * PI)).norm() < 1e-14);
        // conj(dz)/conj(z) integrates to -2 pi i
        let g = |z: C64| Ok(z.conj().inv());
        let v = circle_trapezoid_conj(&g, C64::default(), 2.0, 16).unwrap();
        assert!((v - C64::new(0.0, -2.0 * PI)).norm() < 1e-13);
    }
}
