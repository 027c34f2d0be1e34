#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use proptest::prelude::*;
use rmtgeo::numerics::ode::{dopri5, OdeOptions, Termination};
use rmtgeo::numerics::quad::{tanh_sinh, tanh_sinh_semi_infinite};
use rmtgeo::numerics::reduced::isotropic_phi;
use rmtgeo::numerics::*;

#[test]
fn gamma_values() {
    assert_relative_eq!(gamma_fn(3.7).unwrap(), 4.17065178379660316539, max_relative = 1e-13);
    assert_relative_eq!(gamma_fn(0.3).unwrap(), 2.99156898768759062831, max_relative = 1e-13);
    assert_relative_eq!(gamma_fn(12.5).unwrap(), 136843365.465565857256, max_relative = 1e-13);
    assert_relative_eq!(log_gamma(40.2).unwrap(), 107.367531185256437549, max_relative = 1e-13);
    assert!(gamma_fn(-1.0).is_err());
    let sp = std::f64::consts::PI.sqrt();
    assert_eq!(gamma_fn(2.5).unwrap(), 0.75 * sp);
    assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
    assert_relative_eq!(gamma_fn(0.5).unwrap(), sp, max_relative = 1e-16);
    assert_eq!(rgamma(-2.0), 0.0);
    assert_relative_eq!(rgamma(-0.5), -1.0 / (2.0 * std::f64::consts::PI.sqrt()), max_relative = 1e-12);
}

#[test]
fn bessel_values() {
    let cases = [
        (5.0, -0.327579137591465222038),
        (0.37, 0.181852194406331305240),
        (11.5, -0.228378620665323474614),
        (12.5, -0.165483804614759718459),
        (40.0, 0.126038318037584999206),
        (1000.3, 0.0118396212851877406367),
    ];
    for (x, v) in cases {
        assert!((bessel_j1(x) - v).abs() < 1e-13, "J1({x}) = {} vs {v}", bessel_j1(x));
    }
    // either side of each branch switch
    let edges = [
        (3.9, -0.027244039620779891184),
        (4.1, -0.103273257747338572655),
        (24.9, -0.134855699531408869334),
        (25.1, -0.114634784134422567459),
    ];
    for (x, v) in edges {
        assert!((bessel_j1(x) - v).abs() < 1e-14, "J1({x}) = {} vs {v}", bessel_j1(x));
    }
    assert_eq!(j1_ratio(0.0), 1.0);
    assert_relative_eq!(j1_ratio(2.5), bessel_j1(5.0) / 2.5, max_relative = 1e-14);
}

#[test]
fn hyp2f1_values() {
    let cases = [
        (-0.5, 1.0, 1.5, -0.49, 1.14998691924280059904),
        (-0.5, 1.0, 1.5, -50.0, 5.65803552008828878805),
        (-0.5, 2.5, 1.5, -0.3, 1.22788122702984090061),
        (-0.5, 1.5, 1.5, -7.5, 2.91547594742265023544),
        (0.3, 0.7, 1.9, -3.0, 0.826219869487557182187),
        (1.2, -0.4, 2.2, -0.9, 1.16911304907095445747),
    ];
    for (a, b, c, z, v) in cases {
        assert_relative_eq!(hyp2f1(a, b, c, z).unwrap(), v, max_relative = 1e-12);
    }
    let x: f64 = 0.7;
    let closed = (x + (1.0 + x * x) * x.atan()) / (2.0 * x);
    assert_relative_eq!(hyp2f1(-0.5, 1.0, 1.5, -x * x).unwrap(), closed, max_relative = 1e-13);
    assert!(hyp2f1(1.0, 1.0, -2.0, -0.1).is_err());
    assert!(hyp2f1(1.0, 1.0, 2.0, 0.5).is_err());
}

#[test]
fn tanh_sinh_endpoint_singularities() {
    // ∫₀¹ x^{-1/2} dx = 2 using the supplied endpoint distance
    let q = tanh_sinh(|_x, dl, _dr| dl.powf(-0.5), 0.0, 1.0, 1e-12);
    assert!(q.converged);
    assert_relative_eq!(q.value, 2.0, max_relative = 1e-10);
    let q = tanh_sinh(|_x, dl, dr| (dl * dr).sqrt(), -1.0, 1.0, 1e-12);
    assert_relative_eq!(q.value, std::f64::consts::FRAC_PI_2, max_relative = 1e-11);
    let q = tanh_sinh_semi_infinite(|x| 1.0 / (1.0 + x * x), 0.0, 1e-12);
    assert_relative_eq!(q.value, std::f64::consts::FRAC_PI_2, max_relative = 1e-10);
}

#[test]
fn dopri5_harmonic_oscillator_and_event() {
    let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
    let sol = dopri5(f, 0.0, [1.0, 0.0], 10.0, &OdeOptions::default(), &[]);
    assert_eq!(sol.termination, Termination::Reached);
    let y = sol.y.last().unwrap();
    assert!((y[0] - 10f64.cos()).abs() < 1e-8);
    let ev = |y: &[f64; 2]| y[0];
    let sol = dopri5(f, 0.0, [1.0, 0.0], 10.0, &OdeOptions::default(), &[&ev]);
    assert_eq!(sol.termination, Termination::Event(0));
    assert!((sol.t.last().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn finite_differences() {
    let d = fd_derivative(|x: f64| x.sin(), 0.3, 1, 1e-3).unwrap();
    assert!((d.richardson - 0.3f64.cos()).abs() < 1e-11);
    let d = fd_derivative(|x: f64| x.sin(), 0.3, 2, 1e-3).unwrap();
    assert!((d.richardson + 0.3f64.sin()).abs() < 1e-7);
    let d = fd_derivative(|x: f64| x.sin(), 0.3, 3, 1e-2).unwrap();
    assert!((d.richardson + 0.3f64.cos()).abs() < 1e-6);
}

fn intbreak_grr(r: f64) -> f64 {
    let th = (std::f64::consts::SQRT_2 / r).atan();
    let s = th.sin();
    0.125 * s * s * (2.0 * th / (2.0 * th).sin() - 1.0)
}

#[test]
fn reduced_fs_matches_known_closed_forms() {
    let spec = QuadratureSpec::default();
    for r in [0.05, 0.3, 1.0, 4.0] {
        let want = intbreak_grr(r);
        for kind in [
            Integrand2x2::TridiagBeta { beta: 2.0 },
            Integrand2x2::InvariantEta { eta: 0.0, variance: 0.5 },
            Integrand2x2::HaarCase2 { beta: 2.0 },
        ] {
            let got = integrate_fs_2x2(kind, r, &spec).unwrap();
            assert!(got.achieved);
            assert_relative_eq!(got.value, want, max_relative = 1e-8);
        }
        let got = integrate_fs_2x2(Integrand2x2::HaarCase1 { beta: 2.0 }, r, &spec).unwrap();
        assert_relative_eq!(got.value, 0.5 / (1.0 + r * r).powi(2), max_relative = 1e-8);
    }
}

#[test]
fn reduced_fs_beta5_values() {
    let spec = QuadratureSpec::default();
    let k = Integrand2x2::TridiagBeta { beta: 5.0 };
    assert_relative_eq!(integrate_fs_2x2(k, 2.0, &spec).unwrap().value, 1.0 / 120.0, max_relative = 1e-8);
    assert_relative_eq!(
        integrate_fs_2x2(k, 1.0, &spec).unwrap().value,
        0.0507567947508100,
        max_relative = 1e-8
    );
    assert!(integrate_fs_2x2(Integrand2x2::TridiagBeta { beta: 1.0 }, 1.0, &spec).is_err());
}

#[test]
fn reduced_and_monte_carlo_routes_agree() {
    let mc = QuadratureSpec { method: QuadratureMethod::MonteCarlo { samples: 400_000, seed: 3 }, rel_tol: 0.0 };
    for kind in [
        Integrand2x2::TridiagBeta { beta: 3.0 },
        Integrand2x2::InvariantEta { eta: 0.5, variance: 1.0 },
        Integrand2x2::HaarCase1 { beta: 4.0 },
    ] {
        let red = integrate_fs_2x2(kind, 0.7, &QuadratureSpec::default()).unwrap().value;
        let est = integrate_fs_2x2(kind, 0.7, &mc).unwrap();
        assert!((est.value - red).abs() < 5.0 * est.error, "{kind:?}: {} vs {red}", est.value);
    }
    let red = integrate_curvature_2x2(3.0, 0.8, &QuadratureSpec::default()).unwrap().value;
    let est = integrate_curvature_2x2(3.0, 0.8, &mc).unwrap();
    assert!((est.value - red).abs() < 5.0 * est.error, "{} vs {red}", est.value);
}

#[test]
fn reduced_curvature_beta2() {
    let r: f64 = 1.0;
    let want = ((4.0 / (r * r) + 1.0).acosh() - 2.0 * 2f64.sqrt() / (2.0 + r * r).sqrt())
        / (4.0 * std::f64::consts::PI.sqrt());
    let got = integrate_curvature_2x2(2.0, r, &QuadratureSpec::default()).unwrap();
    assert_relative_eq!(got.value, want, max_relative = 1e-8);
}

proptest! {
    #[test]
    fn phi_inversion_symmetry(s in 1e-3f64..1e3) {
        let a = isotropic_phi(s);
        let b = isotropic_phi(1.0 / s);
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
    }

    #[test]
    fn phi_series_and_closed_form_agree(t in 0.25f64..0.35) {
        let closed = (1.0 + t * t) / (8.0 * t) * t.atanh() - 0.125;
        prop_assert!((isotropic_phi(t) - closed).abs() < 1e-12 * closed);
    }

    #[test]
    fn hyp2f1_euler_consistency(a in -1.0f64..2.0, b in -1.0f64..2.0, c in 0.5f64..3.0, z in -5.0f64..0.0) {
        let direct = hyp2f1(a, b, c, z).unwrap();
        let euler = (1.0 - z).powf(c - a - b) * hyp2f1(c - a, c - b, c, z).unwrap();
        prop_assert!((direct - euler).abs() < 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn eta_fs_scales_with_variance(r in 0.1f64..3.0, v in 0.2f64..4.0, eta in 0.0f64..1.0) {
        // scaling ℋ by √v is equivalent to r → r√v
        let spec = QuadratureSpec { rel_tol: 1e-9, ..Default::default() };
        let a = integrate_fs_2x2(Integrand2x2::InvariantEta { eta, variance: v }, r, &spec).unwrap().value;
        let b = integrate_fs_2x2(Integrand2x2::InvariantEta { eta, variance: 1.0 }, r * v.sqrt(), &spec).unwrap().value;
        prop_assert!((a - v * b).abs() < 1e-7 * a);
    }
}
