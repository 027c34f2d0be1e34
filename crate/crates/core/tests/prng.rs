use rand::RngCore;
use rmtgeo::prng::{chi, gamma, gaussian, uniform, SeedSpec};
use statrs::function::erf::erf;

#[test]
fn degenerate_and_invalid_gaussian() {
    let mut rng = SeedSpec::new(1, 0).stream();
    assert_eq!(gaussian(&mut rng, 0.0, 0.0).unwrap(), 0.0);
    assert_eq!(gaussian(&mut rng, 2.5, 0.0).unwrap(), 2.5);
    assert!(gaussian(&mut rng, 0.0, -1.0).is_err());
    assert!(chi(&mut rng, 0.0, 1.0).is_err());
    assert!(chi(&mut rng, 1.0, 0.0).is_err());
    assert!(gamma(&mut rng, -1.0, 1.0).is_err());
}

#[test]
fn gaussian_moments() {
    let n = 1_000_000;
    let mut rng = SeedSpec::new(7, 0).stream();
    let xs: Vec<f64> = (0..n).map(|_| gaussian(&mut rng, 0.0, 1.0).unwrap()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    assert!(mean.abs() < 5.0 / (n as f64).sqrt());
    let ys: Vec<f64> = (0..n).map(|_| gaussian(&mut rng, 0.0, 0.5).unwrap()).collect();
    let m = ys.iter().sum::<f64>() / n as f64;
    let var = ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((var - 0.5).abs() < 0.005, "{var}");
}

#[test]
fn chi_second_moment() {
    let n = 1_000_000;
    let mut rng = SeedSpec::new(8, 0).stream();
    let m2 = (0..n).map(|_| chi(&mut rng, 4.0, 1.0).unwrap().powi(2)).sum::<f64>() / n as f64;
    assert!((m2 - 4.0).abs() < 0.04, "{m2}");
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn chi_one_is_half_normal() {
    let n = 100_000;
    let mut rng = SeedSpec::new(9, 0).stream();
    let xs: Vec<f64> = (0..n).map(|_| chi(&mut rng, 1.0, 1.0).unwrap()).collect();
    let d = ks_statistic(xs, |x| erf(x / std::f64::consts::SQRT_2));
    assert!(d < 1.63 / (n as f64).sqrt(), "KS {d}");
}

#[test]
fn streams_replay_and_separate() {
    let a: Vec<u64> = {
        let mut r = SeedSpec::new(42, 3).slot(1);
        (0..16).map(|_| r.next_u64()).collect()
    };
    let b: Vec<u64> = {
        let mut r = SeedSpec::new(42, 3).slot(1);
        (0..16).map(|_| r.next_u64()).collect()
    };
    assert_eq!(a, b);
    let c: Vec<u64> = {
        let mut r = SeedSpec::new(42, 4).slot(1);
        (0..16).map(|_| r.next_u64()).collect()
    };
    let d: Vec<u64> = {
        let mut r = SeedSpec::new(42, 3).slot(2);
        (0..16).map(|_| r.next_u64()).collect()
    };
    assert_ne!(a, c);
    assert_ne!(a, d);
}

#[test]
fn adjacent_streams_uncorrelated() {
    let n = 200_000;
    let mut r0 = SeedSpec::new(5, 0).stream();
    let mut r1 = SeedSpec::new(5, 1).stream();
    let cov = (0..n).map(|_| (uniform(&mut r0) - 0.5) * (uniform(&mut r1) - 0.5)).sum::<f64>() / n as f64;
    // var of uniform is 1/12
    assert!((cov * 12.0).abs() < 5.0 / (n as f64).sqrt());
}
