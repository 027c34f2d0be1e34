use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use approx::assert_relative_eq;
use proptest::prelude::*;
use rmtgeo::geodesics::*;
use rmtgeo::geometry::intbreak_metric;
use rmtgeo::numerics::ode::OdeOptions;
use rmtgeo::numerics::quad::tanh_sinh;

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn gue_initial_condition_and_radial_form() {
    let c = GeodesicConstants { k: 1.3, l: 0.4, a: 2.5 };
    for b in [Branch::Growing, Branch::Decaying] {
        assert_relative_eq!(gue_geodesic_r(&c, 1.7, b, 0.0).unwrap(), 1.7, max_relative = 1e-14);
        assert_eq!(gue_geodesic_phi(&c, 1.7, b, 0.0).unwrap(), 0.0);
    }
    let radial = GeodesicConstants { k: 0.8, l: 0.0, a: 1.5 };
    for lam in [0.1, 0.5, 1.0] {
        let u = 0.8 * lam / 1.5f64.sqrt();
        let up = gue_geodesic_r(&radial, 1.0, Branch::Growing, lam).unwrap();
        let dn = gue_geodesic_r(&radial, 1.0, Branch::Decaying, lam).unwrap();
        assert_relative_eq!(up, (u + FRAC_PI_4).tan().abs(), max_relative = 1e-13);
        assert_relative_eq!(dn, (u - FRAC_PI_4).tan().abs(), max_relative = 1e-12, epsilon = 1e-15);
        assert_eq!(gue_geodesic_phi(&radial, 1.0, Branch::Growing, lam).unwrap(), 0.0);
    }
}

#[test]
fn gue_solutions_satisfy_geodesic_equations() {
    for (k, l, a, r0) in [(1.0, 0.3, 1.0, 1.0), (0.7, 0.9, 3.5, 2.0), (2.0, 0.0, 31.5, 0.5), (1.0, 1.0, 10.0, 0.8)] {
        let c = GeodesicConstants { k, l, a };
        for b in [Branch::Growing, Branch::Decaying] {
            let lmax = gue_divergence_lambda(&c, r0, b).unwrap();
            for i in 0..200 {
                let lam = 0.9 * lmax * i as f64 / 199.0;
                let s = gue_geodesic_state(&c, r0, b, lam).unwrap();
                if l == 0.0 && s.r < 1e-3 {
                    continue;
                }
                let [e1, e2] = gue_ode_residual(&s);
                assert!(e1.abs() < 1e-8 && e2.abs() < 1e-8, "{c:?} {b:?} λ={lam}: {e1:e} {e2:e}");
            }
            let tr = gue_trajectory(&c, r0, b, &[0.0, 0.3 * lmax, 0.6 * lmax]).unwrap();
            assert!(tr.max_l_residual() < 1e-10 && tr.max_k_residual() < 1e-10);
        }
    }
}

#[test]
fn gue_bounce() {
    let c = GeodesicConstants { k: 1.0, l: 0.0, a: 1.0 };
    assert_relative_eq!(gue_bounce_lambda(&c, 1.0).unwrap(), FRAC_PI_4, max_relative = 1e-15);
    let c = GeodesicConstants { k: 1.2, l: 0.5, a: 2.0 };
    let r0 = 1.5;
    let lb = gue_bounce_lambda(&c, r0).unwrap();
    let lm = gue_divergence_lambda(&c, r0, Branch::Decaying).unwrap();
    let found = golden_min(|x| gue_geodesic_r(&c, r0, Branch::Decaying, x).unwrap(), 0.0, 0.9 * lm);
    assert!((found - lb).abs() < 1e-6, "{found} vs {lb}");
    assert!(gue_bounce_lambda(&GeodesicConstants { k: 0.5, l: 0.5, a: 1.0 }, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn bounce_precedes_divergence(k in 0.1f64..5.0, lf in 0.0f64..0.99, r0 in 0.05f64..20.0) {
        let a = 1.0;
        let l = lf * (a * k * k * r0 * r0 / (r0 * r0 + 1.0)).sqrt();
        let c = GeodesicConstants { k, l, a };
        let lb = gue_bounce_lambda(&c, r0).unwrap();
        prop_assert!(lb < gue_divergence_lambda(&c, r0, Branch::Decaying).unwrap());
    }
}

#[test]
fn gue_phi_and_orbit() {
    let c = GeodesicConstants { k: 1.1, l: 0.6, a: 2.0 };
    let r0 = 1.3;
    let h = 1e-5;
    for b in [Branch::Growing, Branch::Decaying] {
        let fd = (gue_geodesic_phi(&c, r0, b, h).unwrap() - gue_geodesic_phi(&c, r0, b, -h).unwrap()) / (2.0 * h);
        let expect = c.l * (r0 * r0 + 1.0) / (c.a * r0 * r0);
        assert_relative_eq!(fd, expect, max_relative = 1e-6);
        let q = c.a.sqrt() * c.k / c.l;
        let u0 = match b {
            Branch::Growing => 1.0,
            Branch::Decaying => -1.0,
        } * (r0 * r0 - c.l * c.l * (r0 * r0 + 1.0) / (c.a * c.k * c.k)).sqrt().atan();
        let phi0 = (q * u0.tan()).atan();
        let lmax = gue_divergence_lambda(&c, r0, b).unwrap();
        let mut prev = -1.0;
        for i in 0..100 {
            let lam = 0.95 * lmax * i as f64 / 99.0;
            let r = gue_geodesic_r(&c, r0, b, lam).unwrap();
            let phi = gue_geodesic_phi(&c, r0, b, lam).unwrap();
            assert!(phi >= prev);
            prev = phi;
            let orbit = c.l * c.l * ((phi + phi0).tan().powi(2) + 1.0) / (c.a * c.k * c.k - c.l * c.l);
            assert!((r * r - orbit).abs() < 1e-8 * (1.0 + r * r), "λ={lam}: {} vs {orbit}", r * r);
        }
    }
}

#[test]
fn gue_divergence_and_reachability() {
    let c = GeodesicConstants { k: 1.0, l: 0.0, a: 1.0 };
    let lp = gue_divergence_lambda(&c, 1.0, Branch::Growing).unwrap();
    assert!(gue_geodesic_r(&c, 1.0, Branch::Growing, 0.999 * lp).unwrap() > 1e3);
    let c = GeodesicConstants { k: 1.0, l: 0.5, a: 1.0 };
    for b in [Branch::Growing, Branch::Decaying] {
        let lm = gue_divergence_lambda(&c, 1.0, b).unwrap();
        assert!(gue_geodesic_r(&c, 1.0, b, lm * (1.0 - 1e-7)).unwrap() > 1e5);
        let err = gue_geodesic_r(&c, 1.0, b, lm * 1.001).unwrap_err().to_string();
        assert!(err.contains("divergence"), "{err}");
        for rt in [1.5, 10.0, 1e3] {
            let lam = gue_lambda_to_reach(&c, 1.0, b, rt).unwrap();
            assert!(lam.is_finite() && lam < lm);
            assert_relative_eq!(gue_geodesic_r(&c, 1.0, b, lam).unwrap(), rt, max_relative = 1e-9);
        }
    }
    let lam = gue_lambda_to_reach(&c, 1.0, Branch::Decaying, 0.7).unwrap();
    assert_relative_eq!(gue_geodesic_r(&c, 1.0, Branch::Decaying, lam).unwrap(), 0.7, max_relative = 1e-12);
    assert!(gue_geodesic_r(&GeodesicConstants { k: 1.0, l: 2.0, a: 1.0 }, 1.0, Branch::Growing, 0.1).is_err());
}

#[test]
fn sphere_distance_basics_and_arclength() {
    assert_eq!(sphere_distance(0.3, 1.0, 0.3, 1.0, 2.0), 0.0);
    let (d1, d2) = (sphere_distance(0.2, 0.1, 1.1, 2.0, 3.0), sphere_distance(1.1, 2.0, 0.2, 0.1, 3.0));
    assert_relative_eq!(d1, d2, max_relative = 1e-15);
    assert_relative_eq!(sphere_distance(0.0, 0.0, 0.0, PI, 1.0), PI, max_relative = 1e-15);
    for (k, l, a, r0, frac) in [(1.0, 0.4, 2.0, 1.2, 0.6), (0.5, 0.3, 7.5, 0.6, 0.8), (2.0, 1.5, 1.0, 3.0, 0.4)] {
        let c = GeodesicConstants { k, l, a };
        for b in [Branch::Growing, Branch::Decaying] {
            let lam1 = frac * gue_divergence_lambda(&c, r0, b).unwrap();
            let speed = |x: f64| {
                let s = gue_geodesic_state(&c, r0, b, x).unwrap();
                let r2p1 = s.r * s.r + 1.0;
                (a / (r2p1 * r2p1) * s.dr * s.dr + a * s.r * s.r / r2p1 * s.dphi * s.dphi).sqrt()
            };
            let len = tanh_sinh(|x, _, _| speed(x), 0.0, lam1, 1e-13).value;
            assert!(len < PI * a.sqrt());
            let p1 = gue_geodesic_state(&c, r0, b, lam1).unwrap();
            let d = sphere_distance((1.0 / r0).atan(), 0.0, (1.0 / p1.r).atan(), p1.phi, a);
            assert!((d - len).abs() < 1e-6, "{c:?} {b:?}: {d} vs {len}");
        }
    }
}

#[test]
fn theta_chart_metric_matches_r_chart() {
    for theta in [0.05, 0.1, 0.3, 0.8, 1.2, 1.5] {
        let r = SQRT_2 / f64::tan(theta);
        let (grr, gpp) = intbreak_metric(r);
        let drdt = SQRT_2 / theta.sin().powi(2);
        assert_relative_eq!(intbreak_g_theta(theta).0, grr * drdt * drdt, max_relative = 1e-11);
        assert_relative_eq!(intbreak_g_phi(theta).0, gpp, max_relative = 1e-12);
    }
    let h = 1e-5;
    for theta in [0.02, 0.5 - 1e-9, 0.5 + 1e-9, 0.7, 1.4] {
        let fd_t = (intbreak_g_theta(theta + h).0 - intbreak_g_theta(theta - h).0) / (2.0 * h);
        let fd_p = (intbreak_g_phi(theta + h).0 - intbreak_g_phi(theta - h).0) / (2.0 * h);
        assert_relative_eq!(intbreak_g_theta(theta).1, fd_t, max_relative = 1e-8);
        assert_relative_eq!(intbreak_g_phi(theta).1, fd_p, max_relative = 1e-8);
    }
    let (below, above) = (intbreak_g_theta(0.5 - 1e-12), intbreak_g_theta(0.5 + 1e-12));
    let eps = 1e-12;
    assert_relative_eq!(below.0 + eps * below.1, above.0 - eps * above.1, max_relative = 1e-12);
    assert_relative_eq!(below.1, above.1, max_relative = 1e-11);
}

#[test]
fn growing_branch_turns_before_integrable_point() {
    let c = GeodesicConstants::intbreak(1.0, 0.1);
    let tr = intbreak_geodesic(PI / 5.0, 0.0, &c, Branch::Growing, 20.0, &OdeOptions::default()).unwrap();
    assert!(tr.max_l_residual() < 1e-8 && tr.max_k_residual() < 1e-8);
    let theta_max = tr.points.iter().fold(0.0f64, |a, p| a.max(p.theta));
    // turning point solves tan θ / θ = K² / (2L²)
    let (mut lo, mut hi) = (1.0, FRAC_PI_2 - 1e-12);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m.tan() / m < 50.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    assert!((theta_max - lo).abs() < 1e-6, "{theta_max} vs {lo}");
    assert!(FRAC_PI_2 - theta_max > 1e-2);
}

#[test]
fn decaying_branch_reaches_zero() {
    assert!(intbreak_geodesic(PI / 3.0, 0.0, &GeodesicConstants::intbreak(0.1, 0.1), Branch::Decaying, 50.0, &OdeOptions::default()).is_err());
    let c = GeodesicConstants::intbreak(0.1f64.sqrt(), 0.1);
    for theta0 in [2.0 * PI / 5.0, PI / 3.0, PI / 4.0] {
        let tr = intbreak_geodesic(theta0, 0.0, &c, Branch::Decaying, 100.0, &OdeOptions::default()).unwrap();
        assert_eq!(tr.stop, StopReason::ThetaLower);
        let last = tr.points.last().unwrap();
        assert!(last.lambda < 100.0 && (last.theta - THETA_DELTA).abs() < 1e-9);
        assert!(tr.max_l_residual() < 1e-8 && tr.max_k_residual() < 1e-8);
    }
}

#[test]
fn small_theta_approximation() {
    assert!(intbreak_theta_approx(0.5, 0.1, 0.1, 0.0).is_err());
    let (k, l, theta0) = (0.3, 0.1, PI / 6.0);
    assert_relative_eq!(intbreak_theta_approx(theta0, k, l, 0.0).unwrap(), theta0, max_relative = 1e-14);
    assert_relative_eq!(intbreak_r_approx(theta0, k, l, 0.0).unwrap(), SQRT_2 / theta0.tan(), max_relative = 1e-14);
    let c = GeodesicConstants::intbreak(k, l);
    let tr = intbreak_geodesic(theta0, 0.0, &c, Branch::Decaying, 100.0, &OdeOptions::default()).unwrap();
    for p in tr.points.iter().filter(|p| p.theta > 0.05) {
        let th = intbreak_theta_approx(theta0, k, l, p.lambda).unwrap();
        assert!((th - p.theta).abs() < 0.05 * theta0, "λ={}: {th} vs {}", p.lambda, p.theta);
        let r = intbreak_r_approx(theta0, k, l, p.lambda).unwrap();
        assert!((r / p.r - 1.0).abs() < 0.05, "λ={}: {r} vs {}", p.lambda, p.r);
    }
    let end = tr.points.last().unwrap().lambda;
    let h = 1e-2;
    for lam in [0.1 * end, 0.4 * end, 0.7 * end] {
        let f = |x: f64| intbreak_r_approx(theta0, k, l, x).unwrap();
        assert!(f(lam + h) - 2.0 * f(lam) + f(lam - h) > 0.0);
    }
}

#[test]
fn approximation_continuation_matches_tanh_form() {
    let (k, l, theta0) = (0.3, 0.1, 0.4);
    let (a1, a2) = intbreak_approx_constants(k, l).unwrap();
    assert!(a2 < 0.0);
    let b = -a2;
    for lam in [0.0, 0.1, 0.3, 0.6] {
        let tanh_form = (a1 / b).sqrt() * (((b / a1).sqrt() * theta0).atanh() - (a1 * b).sqrt() * lam).tanh();
        assert_relative_eq!(intbreak_theta_approx(theta0, k, l, lam).unwrap(), tanh_form, max_relative = 1e-12);
    }
}
