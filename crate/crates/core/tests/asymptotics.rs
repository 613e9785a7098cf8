use plantedbins::asymptotics::mean_and_variance;
use plantedbins::stream::derive_stream;
use plantedbins::*;
use rand_distr::{Distribution, StandardNormal};

/// `Phi(x)` from the all-positive series
/// `erf(y) = 2/sqrt(pi) e^{-y^2} sum_j 2^j y^{2j+1} / (1*3*...*(2j+1))`,
/// summed until terms vanish. No cancellation, so it is accurate to a few
/// ulps for the arguments used here.
fn phi_series(x: f64) -> f64 {
    let y = x.abs() / std::f64::consts::SQRT_2;
    let mut term = y;
    let mut sum = y;
    let mut j = 0.0;
    while term > 1e-18 * sum {
        j += 1.0;
        term *= 2.0 * y * y / (2.0 * j + 1.0);
        sum += term;
    }
    let erf = 2.0 / std::f64::consts::PI.sqrt() * (-y * y).exp() * sum;
    if x >= 0.0 {
        0.5 + 0.5 * erf
    } else {
        0.5 - 0.5 * erf
    }
}

#[test]
fn series_oracle_reproduces_reference_values() {
    // High-precision reference values, frozen.
    let refs = [
        (-3.0, 0.001_349_898_031_630_094_5),
        (-1.0, 0.158_655_253_931_457_05),
        (0.3, 0.617_911_422_188_952_6),
        (2.5, 0.993_790_334_674_224),
    ];
    for (x, want) in refs {
        assert!((phi_series(x) - want).abs() < 1e-13, "x={x}");
    }
}

#[test]
fn normal_cdf_matches_series_oracle() {
    let points = [
        -6.0, -5.0, -4.0, -3.0, -2.5, -2.0, -1.5, -1.0, -0.5, -0.1, 0.1, 0.3, 0.5, 1.0, 1.5, 2.0,
        2.5, 3.0, 4.0, 5.0,
    ];
    for x in points {
        let got = std_normal_cdf(x);
        assert!((got - phi_series(x)).abs() <= 1e-7, "x={x}: {got}");
        assert!((0.0..=1.0).contains(&got));
    }
    assert_eq!(std_normal_cdf(0.0), 0.5);
    assert!((std_normal_cdf(1.0) - 0.841_344_7).abs() < 1e-7);
}

#[test]
fn predicted_tv_reference_values() {
    // erf(1/4) and erf(1/(2 sqrt 2)) from the series oracle.
    let flat = predicted_tv(&RegimeSpec::manual(Regime::Flat, 1.0, 0.0)).unwrap();
    assert!((flat - (2.0 * phi_series(1.0 / (2.0 * 2f64.sqrt())) - 1.0)).abs() < 1e-12);
    assert!((flat - 0.2763).abs() < 5e-5);
    let hilly = predicted_tv(&RegimeSpec::manual(Regime::Hilly, 1.0, 0.0)).unwrap();
    assert!((hilly - (2.0 * phi_series(0.5) - 1.0)).abs() < 1e-12);
    assert!((hilly - 0.3829).abs() < 5e-5);
}

#[test]
fn predicted_tv_strictly_decreasing_in_c() {
    let grid: Vec<f64> = (1..=50).map(|i| i as f64 / 10.0).collect();
    for regime in [Regime::Flat, Regime::Hilly, Regime::Intermediate] {
        let values: Vec<f64> = grid
            .iter()
            .map(|&c| predicted_tv(&RegimeSpec::manual(regime, c, 0.7)).unwrap())
            .collect();
        assert!(
            values.windows(2).all(|w| w[1] < w[0]),
            "{regime}: {values:?}"
        );
    }
}

#[test]
fn intermediate_reduces_to_flat_without_lambda() {
    for i in 1..=50 {
        let c = i as f64 / 10.0;
        let flat = predicted_tv(&RegimeSpec::manual(Regime::Flat, c, 0.0)).unwrap();
        for lambda in [0.0, 1e-12] {
            let mid = predicted_tv(&RegimeSpec::manual(Regime::Intermediate, c, lambda)).unwrap();
            assert!((mid - flat).abs() < 1e-10, "c={c} lambda={lambda}");
        }
    }
}

#[test]
fn ks_is_calibrated_on_true_normal_samples() {
    let n = 2_000usize;
    let crit = 1.36 / (n as f64).sqrt();
    let trials = 40;
    let mut passes = 0;
    for t in 0..trials {
        let mut rng = derive_stream(77, t, 0);
        let mut xs: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if ks_statistic(&mut xs, std_normal_cdf) < crit {
            passes += 1;
        }
    }
    // Expect ~95%; 32/40 is below that by more than 3 binomial sd.
    assert!(passes >= 32, "{passes}/{trials}");
}

#[test]
fn linear_statistic_is_centered_under_st() {
    for a in [
        &[3i64, 0, 1, 0, 0][..],
        &[5, 5, 0, 1],
        &[1, 0, 0, 0, 0, 0, 0, 2],
    ] {
        let p = make_planting(a).unwrap();
        let r = empirical_moments(&p, 200, 1, Dist::St, 5_000, 3).unwrap();
        assert_eq!(r.predicted_mean, 0.0);
        assert!(
            r.empirical_mean.abs() <= 4.0 * r.mean_stderr,
            "{a:?}: {r:?}"
        );
    }
}

#[test]
fn pl_shift_of_linear_statistic() {
    let p = Planting::single_bin(50, 20).unwrap();
    let r = empirical_moments(&p, 2_000, 1, Dist::Pl, 5_000, 4).unwrap();
    // Exact PL mean of H is V n^2/m for any m.
    assert!(
        (r.empirical_mean - r.predicted_mean).abs() <= 4.0 * r.mean_stderr,
        "{r:?}"
    );
}

#[test]
fn higher_power_variance_shrinks() {
    let var_at = |n: usize, power: u32| {
        let p = Planting::flat(n, n as u64).unwrap();
        let m = (n as f64).powf(1.5).round() as u64;
        empirical_moments(&p, m, power, Dist::St, 1_000, 9)
            .unwrap()
            .empirical_var
    };
    for power in [3, 4] {
        let small = var_at(400, power);
        let large = var_at(3600, power);
        assert!(large < small, "p={power}: {small} -> {large}");
    }
}

#[test]
fn hilly_linear_statistic_is_normal() {
    // n = 200, k = 50 single bin, c = 1.
    let p = Planting::single_bin(200, 50).unwrap();
    let m = scale_m(&p, &RegimeSpec::manual(Regime::Hilly, 1.0, 0.0)).unwrap();
    let r = ks_normality(&p, m, StatisticKind::HillyH, Dist::St, 10_000, 12).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn mean_and_variance_small_sample() {
    let (m, v) = mean_and_variance(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m, 2.5);
    assert!((v - 5.0 / 3.0).abs() < 1e-15);
}
