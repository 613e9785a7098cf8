//! Limiting predictions for TV and for the moments of the statistics, plus
//! empirical checks (moments, Kolmogorov-Smirnov normality) against them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{check_samples, map_chunks};
use crate::model::{Planting, Regime, RegimeSpec};
use crate::numeric::NeumaierSum;
use crate::sampler::{Dist, SideSampler};
use crate::statistics::{StatEvaluator, StatisticKind};

/// Default KS acceptance threshold for [`ks_normality`].
pub const DEFAULT_KS_THRESHOLD: f64 = 0.03;

/// Complementary error function.
///
/// Backed by `libm`, a port of the FreeBSD/Sun implementation: piecewise
/// rational approximations on `[0, 0.84)`, `[0.84, 1.25)`, `[1.25, 1/0.35)`
/// and `[1/0.35, 28)`, accurate to about one ulp.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `2 Phi(x) - 1` for `x >= 0`, computed as `1 - erfc(x / sqrt 2)`.
fn two_phi_minus_one(x: f64) -> f64 {
    1.0 - erfc(x / std::f64::consts::SQRT_2)
}

/// Limiting TV between ST and PL for a regime and scaling constant.
///
/// Flat: `2 Phi(1/(2 sqrt(2) c)) - 1`; Hilly: `2 Phi(1/(2 sqrt c)) - 1`;
/// Intermediate: `2 Phi(sqrt(lambda/c + 1/(2c^2)) / 2) - 1`.
pub fn predicted_tv(spec: &RegimeSpec) -> Result<f64> {
    let c = spec.c.ok_or(Error::InvalidScale(f64::NAN))?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidScale(c));
    }
    let arg = match spec.regime {
        Regime::Flat => 1.0 / (2.0 * std::f64::consts::SQRT_2 * c),
        Regime::Hilly => 1.0 / (2.0 * c.sqrt()),
        Regime::Intermediate => 0.5 * (spec.lambda / c + 1.0 / (2.0 * c * c)).sqrt(),
    };
    Ok(two_phi_minus_one(arg))
}

/// Leading-order `(mean, variance)` of `sum a_i q_i^p` under `dist`.
///
/// For `p` in {3, 4} the variance is only known to vanish, and is reported
/// as zero.
pub fn predicted_moments(p: &Planting, m: u64, power: u32, dist: Dist) -> Result<(f64, f64)> {
    if !(1..=4).contains(&power) {
        return Err(Error::UnsupportedPower(power));
    }
    if m == 0 {
        return Err(Error::UndefinedForEmpty);
    }
    if dist == Dist::Pl {
        p.check_balls(m)?;
    }
    let n = p.n() as f64;
    let k = p.k() as f64;
    let v = p.variance();
    let m = m as f64;
    let vn2m = v * n * n / m;
    Ok(match (power, dist) {
        (1, Dist::St) => (0.0, vn2m),
        (1, Dist::Pl) => (vn2m, vn2m),
        (2, Dist::St) => (k * n / m, 2.0 * k * k * n / (m * m)),
        (2, Dist::Pl) => (k * n / m - k * k * n / (m * m), 2.0 * k * k * n / (m * m)),
        (3, _) => (k * n * n / (m * m), 0.0),
        (4, _) => (3.0 * k * n * n / (m * m), 0.0),
        _ => unreachable!(),
    })
}

/// Leading-order `(mean, variance)` of a distinguishing statistic under `dist`.
pub fn predicted_statistic_moments(
    p: &Planting,
    m: u64,
    kind: StatisticKind,
    dist: Dist,
) -> Result<(f64, f64)> {
    match kind {
        StatisticKind::HillyH => predicted_moments(p, m, 1, dist),
        StatisticKind::FlatF => predicted_moments(p, m, 2, dist),
        StatisticKind::IntermediateI => {
            let (h_mean, h_var) = predicted_moments(p, m, 1, dist)?;
            let (f_mean, f_var) = predicted_moments(p, m, 2, dist)?;
            // var(H - F/2) ~ var H + var F / 4; the covariance is lower order.
            Ok((h_mean - 0.5 * f_mean, h_var + 0.25 * f_var))
        }
        StatisticKind::Pairs => Err(Error::NoThresholdDefined("pairs")),
    }
}

/// What a [`MomentReport`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentSubject {
    Power(u32),
    Statistic(StatisticKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub subject: MomentSubject,
    pub distribution: Dist,
    pub predicted_mean: f64,
    pub predicted_var: f64,
    pub empirical_mean: f64,
    pub empirical_var: f64,
    pub samples: u64,
    pub mean_stderr: f64,
}

/// Draws `samples` values of `value(z)` for configurations from `dist`, in a
/// fixed order independent of the thread count.
fn sample_values<F>(
    p: &Planting,
    m: u64,
    dist: Dist,
    samples: u64,
    seed: u64,
    value: F,
) -> Result<Vec<f64>>
where
    F: Fn(&[u64]) -> f64 + Sync,
{
    let sampler = SideSampler::new(p, m, dist)?;
    let n = p.n();
    let chunks = map_chunks(samples, seed, dist.stream_job(), |rng, len| {
        let mut z = vec![0u64; n];
        (0..len)
            .map(|_| {
                sampler.fill(&mut z, rng);
                value(&z)
            })
            .collect::<Vec<f64>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Sample mean and unbiased sample variance, two-pass with compensation.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().copied().collect::<NeumaierSum>().value() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .collect::<NeumaierSum>()
        .value();
    (mean, ss / (n - 1.0))
}

/// Measures mean and variance of `sum a_i q_i^p` by simulation and pairs
/// them with [`predicted_moments`].
pub fn empirical_moments(
    p: &Planting,
    m: u64,
    power: u32,
    dist: Dist,
    samples: u64,
    seed: u64,
) -> Result<MomentReport> {
    let (predicted_mean, predicted_var) = predicted_moments(p, m, power, dist)?;
    check_samples(samples, 2)?;
    let stats = StatEvaluator::new(p);
    let xs = sample_values(p, m, dist, samples, seed, |z| stats.power_sum(z, m, power))?;
    Ok(report(
        MomentSubject::Power(power),
        dist,
        (predicted_mean, predicted_var),
        &xs,
    ))
}

/// As [`empirical_moments`] for one of the named statistics.
pub fn empirical_statistic_moments(
    p: &Planting,
    m: u64,
    kind: StatisticKind,
    dist: Dist,
    samples: u64,
    seed: u64,
) -> Result<MomentReport> {
    let predicted = predicted_statistic_moments(p, m, kind, dist)?;
    check_samples(samples, 2)?;
    let stats = StatEvaluator::new(p);
    let xs = sample_values(p, m, dist, samples, seed, |z| stats.statistic(kind, z, m))?;
    Ok(report(MomentSubject::Statistic(kind), dist, predicted, &xs))
}

fn report(subject: MomentSubject, dist: Dist, predicted: (f64, f64), xs: &[f64]) -> MomentReport {
    let (mean, var) = mean_and_variance(xs);
    MomentReport {
        subject,
        distribution: dist,
        predicted_mean: predicted.0,
        predicted_var: predicted.1,
        empirical_mean: mean,
        empirical_var: var,
        samples: xs.len() as u64,
        mean_stderr: (var / xs.len() as f64).sqrt(),
    }
}

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n(x) - F(x)|`.
///
/// Sorts `xs` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(xs: &mut [f64], cdf: F) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: StatisticKind,
    pub distribution: Dist,
    pub d: f64,
    pub threshold: f64,
    pub pass: bool,
    pub samples: u64,
}

/// KS distance between the standardized statistic and `N(0, 1)`, with the
/// default threshold.
pub fn ks_normality(
    p: &Planting,
    m: u64,
    kind: StatisticKind,
    dist: Dist,
    samples: u64,
    seed: u64,
) -> Result<KsReport> {
    ks_normality_with_threshold(p, m, kind, dist, samples, seed, DEFAULT_KS_THRESHOLD)
}

/// Standardizes the statistic by its predicted mean and standard deviation
/// and compares against `Phi`; passes iff `D < threshold`.
pub fn ks_normality_with_threshold(
    p: &Planting,
    m: u64,
    kind: StatisticKind,
    dist: Dist,
    samples: u64,
    seed: u64,
    threshold: f64,
) -> Result<KsReport> {
    let (mean, var) = predicted_statistic_moments(p, m, kind, dist)?;
    check_samples(samples, 100)?;
    if var.is_nan() || var <= 0.0 {
        return Err(Error::DegenerateStandardization);
    }
    let sd = var.sqrt();
    let stats = StatEvaluator::new(p);
    let mut xs = sample_values(p, m, dist, samples, seed, |z| {
        (stats.statistic(kind, z, m) - mean) / sd
    })?;
    let d = ks_statistic(&mut xs, std_normal_cdf);
    Ok(KsReport {
        statistic: kind,
        distribution: dist,
        d,
        threshold,
        pass: d < threshold,
        samples,
    })
}
