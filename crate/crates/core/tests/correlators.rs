use approx::assert_relative_eq;
use proptest::prelude::*;
use rmtgeo::correlators::*;
use rmtgeo::ensembles::*;
use rmtgeo::geometry::{gue_metric_closed, virial_closed};
use rmtgeo::prng::SeedSpec;
use rmtgeo::spectra::{eigvalsh, log_grid, sff, SffSeries};

fn flat_sff(t: Vec<f64>, value: f64) -> SffSeries {
    let k = t.len();
    SffSeries { t, mean: vec![value; k], stderr: vec![0.0; k], realizations: 1 }
}

#[test]
fn mc_trace_identity_at_zero_time() {
    let n = 32;
    let mc = correlator_mc(n, 0.43, 1.0 / n as f64, &[0.0, 1.0], 200, 7).unwrap();
    assert!((mc.mean[0] - 1.0).abs() <= 3.0 * mc.stderr[0], "{} ± {}", mc.mean[0], mc.stderr[0]);
    assert!(mc.max_imag < 1e-10);
}

#[test]
fn mc_zero_time_equals_frobenius_norm_per_realisation() {
    let n = 16;
    let v = 1.0 / n as f64;
    let mc = correlator_mc(n, 0.7, v, &[0.0], 1, 3).unwrap();
    let g = EnsembleSpec::gue(n).with_variance(v);
    let fam = build_family(&g, &g, None, SeedSpec::new(3, 0)).unwrap();
    let h = fam.h1.to_dense();
    let tr = (&h * &h).trace().re / n as f64;
    assert_relative_eq!(mc.mean[0], tr, max_relative = 1e-12);
}

#[test]
fn mc_tracks_exact_at_moderate_n() {
    let (n, r) = (128, 0.43);
    let t = log_grid(0.1, 50.0, 24);
    let s = correlator_series(n, r, &t, 100, 11, 12).unwrap();
    for i in 0..t.len() {
        let rel = (s.g_mc[i] / s.g_exact[i] - 1.0).abs();
        assert!(rel < 0.05, "t = {}: mc {} exact {}", t[i], s.g_mc[i], s.g_exact[i]);
    }
}

#[test]
fn exact_limits() {
    let n = 100;
    let r: f64 = 0.43;
    let grid = log_grid(0.01, 1e4, 50);
    let g0 = correlator_exact(n, r, 1.0 / n as f64, &flat_sff(grid.clone(), 1.0), &[0.0]).unwrap();
    assert_relative_eq!(g0[0], 1.0, max_relative = 1e-15);
    let late = correlator_exact(n, r, 1.0 / n as f64, &flat_sff(grid, n as f64), &[1000.0]).unwrap();
    let expect = r * r / (r * r + 1.0) + 1.0 / (n as f64 * (r * r + 1.0));
    assert_relative_eq!(late[0], expect, max_relative = 1e-14);
}

#[test]
fn scaled_and_unscaled_frames_agree() {
    let (n, r) = (24, 0.6f64);
    let var: f64 = 1.0 / n as f64;
    let sigma = var.sqrt();
    let alpha = (r * r + 1.0).sqrt() * sigma;
    let tau = log_grid(0.05, 20.0, 15);
    let unit = sff(&EnsembleSpec::gue(n).with_variance(1.0), &tau, 20, 5).unwrap();
    let stretched: Vec<f64> = tau.iter().map(|x| x / sigma).collect();
    let small = sff(&EnsembleSpec::gue(n).with_variance(var), &stretched, 20, 5).unwrap();
    let scaled = correlator_exact_scaled(n, r, var, &unit, &tau).unwrap();
    let back: Vec<f64> = tau.iter().map(|x| x / alpha).collect();
    let unscaled = correlator_exact(n, r, var, &small, &back).unwrap();
    for i in 0..tau.len() {
        assert_relative_eq!(scaled[i], r * r * unscaled[i], max_relative = 1e-12);
    }
}

#[test]
fn free_limits_and_plateau_gap() {
    let r: f64 = 0.43;
    assert_relative_eq!(correlator_free(100, r, 0.0), r * r, max_relative = 1e-15);
    assert_relative_eq!(correlator_free(100, r, 1e6), r.powi(4) / (r * r + 1.0), max_relative = 1e-12);
    let n = 1000;
    let t = 1000.0;
    let tp = t * (r * r + 1.0).sqrt();
    let grid = vec![tp];
    let boxed = SffSeries { t: grid.clone(), mean: vec![box_sff(n, tp).unwrap()], stderr: vec![0.0], realizations: 1 };
    let g = correlator_exact(n, r, 1.0 / n as f64, &boxed, &[t]).unwrap()[0];
    assert!((g - correlator_free_unscaled(r, t)).abs() < 2.0 / n as f64);
}

#[test]
fn box_approximation_landmarks() {
    for n in [64usize, 256, 1000] {
        let nf = n as f64;
        assert_relative_eq!(box_sff(n, 0.0).unwrap(), nf * nf, max_relative = 1e-15);
        let plateau = box_sff(n, 2.0 * nf).unwrap();
        assert!((plateau - nf).abs() < 1.0);
        let j = |t: f64| nf * nf * rmtgeo::numerics::j1_ratio(t).powi(2);
        let (a, b) = (10.0, 0.5 * nf);
        let slope = ((box_sff(n, b).unwrap() - j(b)) - (box_sff(n, a).unwrap() - j(a))) / (b - a);
        assert_relative_eq!(slope, 0.5, max_relative = 1e-12);
    }
    assert!(box_sff(10, -1.0).is_err());
}

#[test]
fn disconnected_part_from_resolvent() {
    assert_relative_eq!(disconnected_fs(0.0).unwrap(), -0.5, max_relative = 1e-10);
    assert!((disconnected_fs(1.0).unwrap() + 0.125).abs() < 1e-6);
    for n in [2usize, 64, 1000] {
        for r in [0.3, 1.0, 2.5] {
            let extensive = n as f64 / (2.0 * (r * r + 1.0f64).powi(2));
            let g = gue_metric_closed(n, r).unwrap().0;
            assert_relative_eq!(disconnected_fs(r).unwrap() + extensive, g, max_relative = 1e-10);
        }
    }
    assert!(disconnected_fs(-1.0).is_err());
}

#[test]
fn fs_from_level_pairs() {
    let (n, r, m) = (64usize, 1.0f64, 500usize);
    let var = 1.0 / n as f64;
    let g = EnsembleSpec::gue(n).with_variance(var);
    let spectra: Vec<Vec<f64>> =
        (0..m).map(|k| eigvalsh(&sample(&g, &mut SeedSpec::new(21, k as u64).slot(0)).unwrap()).unwrap()).collect();
    let est = fs_from_sff(n, r, var, &spectra).unwrap();
    assert!(est.within(7.875, 3.0), "{est:?}");
    assert!(fs_from_sff(n, r, var, &spectra[..5]).is_err());
    assert_relative_eq!(virial_closed(2, 1.0, 2.0), 1.0, max_relative = 1e-15);
}

#[test]
fn log_t_interpolation() {
    let grid = vec![1.0, 10.0, 100.0];
    let vals = vec![0.0, 1.0, 2.0];
    assert_relative_eq!(interp_log_t(&grid, &vals, 10f64.sqrt()).unwrap(), 0.5, max_relative = 1e-14);
    assert_eq!(interp_log_t(&grid, &vals, 10.0).unwrap(), 1.0);
    assert!(interp_log_t(&grid, &vals, 0.5).is_err());
    assert!(interp_log_t(&grid, &vals, 200.0).is_err());
}

proptest! {
    #[test]
    fn exact_bounded_below_by_plateau(r in 0.0f64..3.0, vals in prop::collection::vec(0.0f64..1e4, 8)) {
        let n = 100;
        let grid = log_grid(0.1, 100.0, 8);
        let s = SffSeries { t: grid.clone(), mean: vals, stderr: vec![0.0; 8], realizations: 1 };
        let t: Vec<f64> = grid.iter().map(|x| x / (r * r + 1.0).sqrt()).collect();
        for g in correlator_exact(n, r, 1.0 / n as f64, &s, &t).unwrap() {
            prop_assert!(g >= r * r / (r * r + 1.0) - 1.0 / n as f64);
        }
    }
}
