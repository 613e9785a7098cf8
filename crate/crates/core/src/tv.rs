//! Total variation distance between ST and PL.
//!
//! Exact values come from enumerating every configuration; Monte Carlo
//! estimates use `TV = ST(S) - PL(S)` for a decision region `S`, which is
//! exact for the likelihood-ratio region `{ST >= PL}` and a lower bound for
//! any other region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{log_prob_pl, log_prob_st, LogRatioEvaluator};
use crate::mc::{check_samples, map_chunks};
use crate::model::{Configuration, Planting};
use crate::numeric::{binomial_saturating, NeumaierSum};
use crate::sampler::{Dist, SideSampler};
use crate::statistics::{strategy_decide, threshold_mu, StatEvaluator, StatisticKind};

/// Default maximum number of configurations [`exact_tv`] will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TvMethod {
    Exact,
    McOptimal,
    McStrategy(StatisticKind),
}

impl TvMethod {
    pub fn name(self) -> &'static str {
        match self {
            TvMethod::Exact => "exact",
            TvMethod::McOptimal => "optimal",
            TvMethod::McStrategy(_) => "strategy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    /// May dip slightly below zero for Monte Carlo methods; never clamped.
    pub value: f64,
    pub stderr: f64,
    pub method: TvMethod,
    pub samples_per_side: u64,
    pub seed: u64,
}

impl TvEstimate {
    fn from_counts(st_hits: u64, pl_hits: u64, samples: u64, method: TvMethod, seed: u64) -> Self {
        let n = samples as f64;
        let p1 = st_hits as f64 / n;
        let p2 = pl_hits as f64 / n;
        TvEstimate {
            value: p1 - p2,
            stderr: (p1 * (1.0 - p1) / n + p2 * (1.0 - p2) / n).sqrt(),
            method,
            samples_per_side: samples,
            seed,
        }
    }
}

/// Iterator over all weak compositions of `m` into `n` parts, in
/// lexicographic order from `(0, .., 0, m)` to `(m, 0, .., 0)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<u64>,
    m: u64,
    done: bool,
}

impl Compositions {
    fn new(n: usize, m: u64) -> Self {
        let mut current = vec![0; n];
        if let Some(last) = current.last_mut() {
            *last = m;
        }
        Compositions {
            current,
            m,
            done: n == 0,
        }
    }

    /// Advances in place; returns `false` once the last composition has passed.
    fn advance(&mut self) -> bool {
        let n = self.current.len();
        if n < 2 {
            return false;
        }
        // The last entry holds everything not yet committed to a prefix, so
        // the rightmost non-final position with a non-empty tail is the one
        // to increment.
        let mut tail = self.current[n - 1];
        let mut j = n - 1;
        while tail == 0 {
            if j == 1 {
                return false;
            }
            j -= 1;
            tail += self.current[j];
        }
        let pivot = j - 1;
        self.current[pivot] += 1;
        for x in &mut self.current[pivot + 1..] {
            *x = 0;
        }
        self.current[n - 1] = tail - 1;
        debug_assert_eq!(self.current.iter().sum::<u64>(), self.m);
        true
    }

    /// Calls `f` on every remaining composition without allocating.
    pub fn for_each_slice<F: FnMut(&[u64])>(mut self, mut f: F) {
        if self.done {
            return;
        }
        loop {
            f(&self.current);
            if !self.advance() {
                return;
            }
        }
    }
}

impl Iterator for Compositions {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.done {
            return None;
        }
        let out = Configuration::from_parts(self.current.clone(), self.m);
        self.done = !self.advance();
        Some(out)
    }
}

/// Number of configurations of `m` balls in `n` bins, `C(m + n - 1, n - 1)`.
pub fn configuration_count(n: usize, m: u64) -> u128 {
    if n == 0 {
        return 0;
    }
    binomial_saturating(m + n as u64 - 1, n as u64 - 1)
}

pub fn enumerate_configurations(n: usize, m: u64) -> Result<Compositions> {
    enumerate_configurations_capped(n, m, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_configurations_capped(n: usize, m: u64, cap: u128) -> Result<Compositions> {
    if n == 0 {
        return Err(Error::InvalidConfiguration("no bins".into()));
    }
    let count = configuration_count(n, m);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    Ok(Compositions::new(n, m))
}

/// `TV = (1/2) sum_Z |ST(Z) - PL(Z)|` by full enumeration.
pub fn exact_tv(p: &Planting, m: u64) -> Result<TvEstimate> {
    exact_tv_capped(p, m, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_tv_capped(p: &Planting, m: u64, cap: u128) -> Result<TvEstimate> {
    p.check_balls(m)?;
    let configs = enumerate_configurations_capped(p.n(), m, cap)?;
    let mut acc = NeumaierSum::default();
    let mut failure = None;
    configs.for_each_slice(|z| {
        if failure.is_some() {
            return;
        }
        let cfg = Configuration::from_parts(z.to_vec(), m);
        let st = log_prob_st(&cfg).exp();
        match log_prob_pl(p, &cfg) {
            Ok(pl) => acc.add((st - pl.exp()).abs()),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(TvEstimate {
        value: (0.5 * acc.value()).clamp(0.0, 1.0),
        stderr: 0.0,
        method: TvMethod::Exact,
        samples_per_side: 0,
        seed: 0,
    })
}

/// Counts, per side, how many of `samples` draws fall in `region`.
fn region_hits<F>(p: &Planting, m: u64, samples: u64, seed: u64, region: F) -> Result<(u64, u64)>
where
    F: Fn(&[u64]) -> bool + Sync,
{
    let mut hits = [0u64; 2];
    for (slot, dist) in hits.iter_mut().zip([Dist::St, Dist::Pl]) {
        let sampler = SideSampler::new(p, m, dist)?;
        let n = p.n();
        *slot = map_chunks(samples, seed, dist.stream_job(), |rng, len| {
            let mut z = vec![0u64; n];
            let mut count = 0u64;
            for _ in 0..len {
                sampler.fill(&mut z, rng);
                if region(&z) {
                    count += 1;
                }
            }
            count
        })
        .into_iter()
        .sum();
    }
    Ok((hits[0], hits[1]))
}

/// Monte Carlo TV through the likelihood-ratio region `S = {ln(PL/ST) <= 0}`.
///
/// Draws `samples` configurations from each distribution and returns
/// `p_ST(S) - p_PL(S)`, an unbiased estimate of the exact TV.
pub fn mc_tv_optimal(p: &Planting, m: u64, samples: u64, seed: u64) -> Result<TvEstimate> {
    check_samples(samples, 2)?;
    let ratio = LogRatioEvaluator::new(p, m)?;
    let (st, pl) = region_hits(p, m, samples, seed, |z| ratio.eval(z).at_most_zero())?;
    Ok(TvEstimate::from_counts(
        st,
        pl,
        samples,
        TvMethod::McOptimal,
        seed,
    ))
}

/// Monte Carlo TV' through the threshold strategy for `kind`: the region is
/// every configuration on which the strategy picks ST.
pub fn mc_tv_strategy(
    p: &Planting,
    m: u64,
    kind: StatisticKind,
    samples: u64,
    seed: u64,
) -> Result<TvEstimate> {
    let threshold = threshold_mu(p, m, kind)?;
    check_samples(samples, 2)?;
    p.check_balls(m)?;
    let stats = StatEvaluator::new(p);
    let (st, pl) = region_hits(p, m, samples, seed, |z| {
        strategy_decide(stats.statistic(kind, z, m), &threshold) == Dist::St
    })?;
    Ok(TvEstimate::from_counts(
        st,
        pl,
        samples,
        TvMethod::McStrategy(kind),
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planting(a: &[i64]) -> Planting {
        Planting::new(a).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let all: Vec<Vec<u64>> = enumerate_configurations(2, 2)
            .unwrap()
            .map(|c| c.counts().to_vec())
            .collect();
        assert_eq!(all, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(enumerate_configurations(3, 4).unwrap().count(), 15);
        let single: Vec<_> = enumerate_configurations(1, 5).unwrap().collect();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].counts(), &[5]);
        assert_eq!(enumerate_configurations(4, 0).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate_configurations_capped(3, 4, 14),
            Err(Error::EnumerationTooLarge { count: 15, cap: 14 })
        ));
        assert!(enumerate_configurations(50, 50).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let all: Vec<Vec<u64>> = enumerate_configurations(4, 5)
            .unwrap()
            .map(|c| c.counts().to_vec())
            .collect();
        assert_eq!(all.len() as u128, configuration_count(4, 5));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_tv_examples() {
        assert_eq!(exact_tv(&planting(&[0, 0, 0]), 5).unwrap().value, 0.0);
        assert!((exact_tv(&planting(&[1, 0]), 2).unwrap().value - 0.25).abs() < 1e-12);
        assert!((exact_tv(&planting(&[1, 0]), 1).unwrap().value - 0.5).abs() < 1e-12);
        assert!(matches!(
            exact_tv(&planting(&[2, 0]), 1),
            Err(Error::NotEnoughBalls { .. })
        ));
    }

    #[test]
    fn estimates_reject_tiny_sample_counts() {
        let p = planting(&[1, 0]);
        assert!(matches!(
            mc_tv_optimal(&p, 2, 1, 0),
            Err(Error::InvalidSampleCount { got: 1, min: 2 })
        ));
        assert!(matches!(
            mc_tv_strategy(&p, 2, StatisticKind::Pairs, 100, 0),
            Err(Error::NoThresholdDefined(_))
        ));
    }

    #[test]
    fn zero_planting_estimates_are_zero() {
        let p = planting(&[0, 0, 0]);
        let est = mc_tv_optimal(&p, 6, 5000, 3).unwrap();
        assert_eq!(est.value, 0.0);
        for kind in [
            StatisticKind::FlatF,
            StatisticKind::HillyH,
            StatisticKind::IntermediateI,
        ] {
            let est = mc_tv_strategy(&p, 6, kind, 5000, 3).unwrap();
            assert!(
                est.value.abs() <= 3.0 * est.stderr + 1e-12,
                "{kind}: {est:?}"
            );
        }
    }

    #[test]
    fn optimal_matches_hand_value() {
        let est = mc_tv_optimal(&planting(&[1, 0]), 2, 100_000, 11).unwrap();
        assert!((est.value - 0.25).abs() < 3.0 * est.stderr, "{est:?}");
    }
}
