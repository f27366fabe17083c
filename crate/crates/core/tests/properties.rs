use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sslab_core::catalog;
use sslab_core::curv::total_curvature_contour;
use sslab_core::ends::{predicted_index, winding};
use sslab_core::mfun::{parse, unimodular, MeroExpr};
use sslab_core::wdata::{immerse, PathSpec, PuncturedSphere, Segment, WeierstrassData};
use sslab_core::mfun::Point;
use sslab_core::Config;
use std::f64::consts::PI;

fn cplx() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn poly_expr() -> impl Strategy<Value = MeroExpr> {
    prop::collection::vec(cplx(), 1..4).prop_map(|cs| {
        cs.iter().enumerate().fold(MeroExpr::zero(), |f, (k, &a)| f.add(&MeroExpr::monomial(a, k as i32)))
    })
}

fn near(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn arithmetic_is_pointwise(f in poly_expr(), g in poly_expr(), z in cplx()) {
        let (fz, gz) = (f.eval(z).unwrap(), g.eval(z).unwrap());
        prop_assert!(near(f.add(&g).eval(z).unwrap(), fz + gz, 1e-12));
        prop_assert!(near(f.mul(&g).eval(z).unwrap(), fz * gz, 1e-12));
        if let Ok(q) = f.div(&g) {
            if gz.norm() > 1e-3 {
                if let Ok(v) = q.eval(z) {
                    prop_assert!(near(v, fz / gz, 1e-8));
                }
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient(f in poly_expr(), z in cplx()) {
        let h = 1e-5;
        let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
        prop_assert!(near(f.differentiate().eval(z).unwrap(), fd, 1e-7));
    }

    #[test]
    fn text_round_trip(f in poly_expr(), z in cplx()) {
        let g = parse(&f.to_string()).unwrap();
        prop_assert!(near(f.eval(z).unwrap(), g.eval(z).unwrap(), 1e-12));
    }

    /// The Lorentz square of x_z vanishes and the metric identity holds for any
    /// polynomial data away from phi = conj psi.
    #[test]
    fn isotropy_and_metric(phi in poly_expr(), psi in poly_expr(), dh in poly_expr(), z in cplx()) {
        prop_assume!(!phi.sub(&psi).is_constant() && !dh.is_zero());
        let dom = PuncturedSphere::new(vec![Point::Infinity]).unwrap();
        let Ok(d) = WeierstrassData::new("p", phi.clone(), psi.clone(), dh.clone(), dom) else { return Ok(()) };
        let x = d.xz_at(z).unwrap();
        let scale: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let iso = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - x[3] * x[3];
        prop_assert!(iso.norm() <= 1e-10 * (1.0 + scale));
        let (p, s, h) = (phi.eval(z).unwrap(), psi.eval(z).unwrap(), dh.eval(z).unwrap());
        let lhs = 2.0 * (x[0].norm_sqr() + x[1].norm_sqr() + x[2].norm_sqr() - x[3].norm_sqr());
        let rhs = 4.0 * (p - s.conj()).norm_sqr() * h.norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn winding_follows_orders(m in 1u32..6, n in 1u32..6, r in 0.05..0.9f64) {
        prop_assume!(m != n);
        let w = winding(&|z: C64| Some(z.powu(m) - z.conj().powu(n)), C64::default(), r, 256).unwrap();
        prop_assert!((w - predicted_index(m, n).unwrap() as f64).abs() < 1e-6);
    }

    #[test]
    fn catenoid_family_is_quantized(t in -0.95..0.95f64, s in 0.2..3.0f64) {
        let e = catalog::catenoid(t, s).unwrap();
        let k = total_curvature_contour(&e.data, &Config::default()).unwrap();
        prop_assert!((k.k_total + 4.0 * PI).abs() < 1e-8, "{}", k.k_total);
        prop_assert!(k.kperp_total.abs() < 1e-8);
    }

    /// A Lorentz frame change moves neither total: the curvature integrand
    /// transforms as a form.
    #[test]
    fn frame_change_keeps_totals(a in cplx(), b in cplx(), c in cplx()) {
        prop_assume!(a.norm() > 0.3);
        let d = (C64::new(1.0, 0.0) + b * c) / a;
        prop_assume!(d.norm() < 5.0);
        let m = unimodular(a, b, c, d).unwrap();
        let e = catalog::catenoid(0.3, 1.0).unwrap();
        let moved = e.data.lorentz_frame_change(&m).unwrap();
        let cfg = Config::default();
        let (k0, k1) = (total_curvature_contour(&e.data, &cfg).unwrap(), total_curvature_contour(&moved, &cfg).unwrap());
        prop_assert!((k0.k_total - k1.k_total).abs() < 1e-6 && (k0.kperp_total - k1.kperp_total).abs() < 1e-6, "{k1:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// Immersion is path independent on simply connected domains.
    #[test]
    fn immersion_is_additive(a in cplx(), b in cplx(), c in cplx()) {
        let e = catalog::enneper_k(2, C64::new(0.0, 1.0), C64::new(1.0, 0.0)).unwrap();
        let cfg = Config::default();
        let sing = e.data.xz_singularities();
        let clear = |p: C64, q: C64| sing.iter().all(|s| {
            let t = ((s - p) * (q - p).conj()).re / (q - p).norm_sqr().max(1e-300);
            (p + (q - p) * t.clamp(0.0, 1.0) - s).norm() > 0.05
        });
        prop_assume!(clear(a, b) && clear(a, c) && clear(c, b));
        let direct = immerse(&e.data, &PathSpec::line(a, b), &cfg).unwrap();
        let broken = immerse(&e.data, &PathSpec { segments: vec![Segment::Line { from: a, to: c }, Segment::Line { from: c, to: b }] }, &cfg).unwrap();
        for k in 0..4 {
            prop_assert!((direct[k] - broken[k]).abs() < 1e-9 * (1.0 + direct[k].abs()), "{direct:?} {broken:?}");
        }
    }

    /// Closed loops around the punctures of the catenoid close up.
    #[test]
    fn catenoid_loops_close(t in -0.9..0.9f64, r in 0.2..3.0f64) {
        let e = catalog::catenoid(t, 1.0).unwrap();
        prop_assume!((r - t.abs()).abs() > 0.05);
        let path = PathSpec { segments: vec![Segment::Arc { center: C64::default(), radius: r, start: 0.3, sweep: 2.0 * PI }] };
        let x = immerse(&e.data, &path, &Config::default()).unwrap();
        for v in x {
            prop_assert!(v.abs() < 1e-9, "{x:?}");
        }
    }
}
