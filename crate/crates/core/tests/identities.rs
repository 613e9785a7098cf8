//! Algebraic identities tying the statistics and likelihood routines together.

use plantedbins::likelihood::planted_log_q_sum;
use plantedbins::stream::derive_stream;
use plantedbins::tv::enumerate_configurations;
use plantedbins::*;
use proptest::prelude::*;
use rand::Rng;

fn random_config(rng: &mut impl Rng, n: usize, m: u64) -> Configuration {
    sample_st(n, m, rng)
}

#[test]
fn pairs_identity_over_grid() {
    let mut rng = derive_stream(17, 0, 0);
    let mut checked = 0;
    for &n in &[2usize, 5, 50] {
        for m in [n as u64, 10 * n as u64, (n * n) as u64] {
            for _ in 0..112 {
                let z = random_config(&mut rng, n, m);
                let sum_q2: f64 = q_values(&z).unwrap().iter().map(|q| q * q).sum();
                let (nf, mf) = (n as f64, m as f64);
                let rebuilt = mf * mf / (2.0 * nf * nf) * sum_q2 + mf * mf / (2.0 * nf) - mf / 2.0;
                let pairs = stat_pairs(&z) as f64;
                assert!(
                    (pairs - rebuilt).abs() <= 1e-9 * pairs.max(1.0),
                    "n={n} m={m}: {pairs} vs {rebuilt}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 1000);
}

#[test]
fn single_bin_h_is_scaled_first_bin() {
    let mut rng = derive_stream(18, 0, 0);
    for &(n, k, m) in &[(10usize, 7u64, 100u64), (200, 50, 497_500), (3, 1, 4)] {
        let p = Planting::single_bin(n, k).unwrap();
        for _ in 0..50 {
            let z = sample_pl(&p, m, &mut rng).unwrap();
            let direct = (k * n as u64) as f64 / m as f64 * z.counts()[0] as f64 - k as f64;
            let h = stat_h(&p, &z).unwrap();
            assert!((h - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }
}

#[test]
fn ratio_matches_difference_of_log_probabilities() {
    let mut rng = derive_stream(19, 0, 0);
    let mut finite = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=20usize);
        let a: Vec<i64> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let p = make_planting(&a).unwrap();
        let m = rng.random_range(p.k()..=200.max(p.k()));
        // Mix of ST draws (often infeasible under PL) and PL draws.
        let z = if rng.random_bool(0.5) {
            sample_st(n, m, &mut rng)
        } else {
            sample_pl(&p, m, &mut rng).unwrap()
        };
        let r = log_ratio(&p, &z).unwrap();
        let pl = log_prob_pl(&p, &z).unwrap();
        match (r, pl) {
            (LogValue::Finite(r), LogValue::Finite(pl)) => {
                let diff = pl - log_prob_st(&z);
                assert!((r - diff).abs() < 1e-8, "{a:?} {z:?}: {r} vs {diff}");
                finite += 1;
            }
            (LogValue::NegInfinity, LogValue::NegInfinity) => {}
            other => panic!("feasibility disagrees: {other:?}"),
        }
    }
    assert!(finite > 500);
}

#[test]
fn ratio_decomposes_into_error_term_and_q_product() {
    let mut rng = derive_stream(20, 0, 0);
    for _ in 0..1000 {
        let n = rng.random_range(1..=20usize);
        let a: Vec<i64> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let p = make_planting(&a).unwrap();
        let m = rng.random_range(p.k().max(1)..=300);
        let z = sample_pl(&p, m, &mut rng).unwrap();
        let r = log_ratio(&p, &z).unwrap().finite().unwrap();
        let e = error_term_exact(&p, &z).unwrap();
        let q = planted_log_q_sum(&p, &z).unwrap().finite().unwrap();
        assert!((r - (e + q)).abs() < 1e-8, "{a:?} {z:?}");
    }
}

#[test]
fn probabilities_normalize() {
    let plantings: [&[i64]; 5] = [&[0], &[1, 0], &[2, 1, 0], &[1, 1, 1, 1], &[3, 0, 0, 1]];
    for a in plantings {
        let p = make_planting(a).unwrap();
        for m in p.k()..=10 {
            let mut st = 0.0;
            let mut pl = 0.0;
            for z in enumerate_configurations(p.n(), m).unwrap() {
                st += log_prob_st(&z).exp();
                pl += log_prob_pl(&p, &z).unwrap().exp();
            }
            assert!((st - 1.0).abs() < 1e-10, "ST {a:?} m={m}: {st}");
            assert!((pl - 1.0).abs() < 1e-10, "PL {a:?} m={m}: {pl}");
        }
    }
}

#[test]
fn expansion_is_its_definition() {
    let mut rng = derive_stream(21, 0, 0);
    let p = make_planting(&[3, 0, 1, 2, 0]).unwrap();
    for _ in 0..200 {
        let z = sample_pl(&p, 60, &mut rng).unwrap();
        let (n, k, m, v) = (5.0, 6.0, 60.0, p.variance());
        let direct = -v * n * n / (2.0 * m) + k * n / (2.0 * m) - k * k * n / (4.0 * m * m)
            + stat_h(&p, &z).unwrap()
            - 0.5 * stat_f(&p, &z).unwrap();
        let got = log_ratio_expansion(&p, &z).unwrap();
        assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }
}

#[test]
fn expansion_tracks_exact_ratio_on_flat_planting() {
    // n = 2500, flat, c = 1 -> m = k sqrt(n) = 125000.
    let p = Planting::flat(2500, 2500).unwrap();
    let m = 125_000;
    let mut rng = derive_stream(22, 0, 0);
    let mut gaps: Vec<f64> = (0..400)
        .map(|_| {
            let z = sample_st(2500, m, &mut rng);
            let exact = log_ratio(&p, &z).unwrap().finite().unwrap();
            (exact - log_ratio_expansion(&p, &z).unwrap()).abs()
        })
        .collect();
    gaps.sort_by(f64::total_cmp);
    let median = gaps[gaps.len() / 2];
    assert!(median < 0.1, "median gap {median}");
}

#[test]
fn error_term_approaches_its_limit() {
    let gap = |n: usize| {
        let p = Planting::flat(n, n as u64).unwrap();
        let m = (n as f64 * (n as f64).sqrt()).round() as u64;
        let limit = error_term_asymptotic(&p, m).unwrap();
        let mut rng = derive_stream(23, n as u64, 0);
        (0..500)
            .map(|_| {
                let z = sample_st(n, m, &mut rng);
                (error_term_exact(&p, &z).unwrap() - limit).abs()
            })
            .sum::<f64>()
            / 500.0
    };
    let small = gap(400);
    let large = gap(3600);
    assert!(large < small, "gap at 400: {small}, at 3600: {large}");
}

proptest! {
    #[test]
    fn q_values_sum_to_zero(z in proptest::collection::vec(0u64..10_000, 1..200)) {
        prop_assume!(z.iter().any(|&x| x > 0));
        let cfg = Configuration::new(z).unwrap();
        let s: f64 = q_values(&cfg).unwrap().iter().sum();
        prop_assert!(s.abs() <= 1e-12 * cfg.n() as f64);
    }

    #[test]
    fn mixture_statistic_is_h_minus_half_f(
        pairs in proptest::collection::vec((0i64..20, 0u64..500), 1..60),
    ) {
        let (a, z): (Vec<i64>, Vec<u64>) = pairs.into_iter().unzip();
        prop_assume!(z.iter().any(|&x| x > 0));
        let p = make_planting(&a).unwrap();
        let cfg = Configuration::new(z).unwrap();
        let i = stat_i(&p, &cfg).unwrap();
        let want = stat_h(&p, &cfg).unwrap() - 0.5 * stat_f(&p, &cfg).unwrap();
        prop_assert!((i - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn statistics_are_permutation_invariant(
        pairs in proptest::collection::vec((0i64..20, 0u64..500), 2..40),
        rotate in 1usize..40,
    ) {
        let (a, z): (Vec<i64>, Vec<u64>) = pairs.iter().copied().unzip();
        prop_assume!(z.iter().any(|&x| x > 0));
        let mut perm: Vec<(i64, u64)> = pairs.clone();
        perm.rotate_left(rotate % pairs.len());
        perm.reverse();
        let (pa, pz): (Vec<i64>, Vec<u64>) = perm.into_iter().unzip();
        let (p, c) = (make_planting(&a).unwrap(), Configuration::new(z).unwrap());
        let (pp, pc) = (make_planting(&pa).unwrap(), Configuration::new(pz).unwrap());
        for power in 1..=4 {
            prop_assert_eq!(
                stat_power_sum(&p, &c, power).unwrap(),
                stat_power_sum(&pp, &pc, power).unwrap()
            );
        }
        prop_assert_eq!(stat_i(&p, &c).unwrap(), stat_i(&pp, &pc).unwrap());
        prop_assert_eq!(stat_pairs(&c), stat_pairs(&pc));
    }
}
