//! Samplers for the standard (ST) and planted (PL) distributions.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::Result;
use crate::model::{Configuration, Planting};

/// Below `PER_BALL_FACTOR * n` balls, individual throws are cheaper than
/// a sequence of binomial draws.
const PER_BALL_FACTOR: u64 = 4;

/// Adds `balls` uniformly thrown balls to `bins`.
///
/// Uses binomial splitting (bin `i` receives `Binomial(r, 1/(n - i))` of the
/// `r` balls not yet placed), which is O(n) regardless of `balls`, or
/// per-ball throws when `balls < 4n`. Both realize the exact multinomial law.
pub fn throw_uniform<R: Rng + ?Sized>(bins: &mut [u64], balls: u64, rng: &mut R) {
    let n = bins.len() as u64;
    if balls < PER_BALL_FACTOR * n {
        throw_per_ball(bins, balls, rng);
    } else {
        throw_binomial_split(bins, balls, rng);
    }
}

pub fn throw_per_ball<R: Rng + ?Sized>(bins: &mut [u64], balls: u64, rng: &mut R) {
    let n = bins.len();
    if n == 1 {
        bins[0] += balls;
        return;
    }
    for _ in 0..balls {
        bins[rng.random_range(0..n)] += 1;
    }
}

pub fn throw_binomial_split<R: Rng + ?Sized>(bins: &mut [u64], balls: u64, rng: &mut R) {
    let n = bins.len();
    let mut remaining = balls;
    for (i, bin) in bins.iter_mut().enumerate().take(n - 1) {
        if remaining == 0 {
            return;
        }
        let p = 1.0 / (n - i) as f64;
        let draw = Binomial::new(remaining, p)
            .expect("probability in (0, 1]")
            .sample(rng);
        *bin += draw;
        remaining -= draw;
    }
    bins[n - 1] += remaining;
}

/// One draw from ST: `m` balls thrown uniformly into `n` bins.
pub fn sample_st<R: Rng + ?Sized>(n: usize, m: u64, rng: &mut R) -> Configuration {
    assert!(n >= 1, "need at least one bin");
    let mut z = vec![0; n];
    throw_uniform(&mut z, m, rng);
    Configuration::from_parts(z, m)
}

/// One draw from PL: the planting plus `m - k` uniformly thrown balls.
pub fn sample_pl<R: Rng + ?Sized>(p: &Planting, m: u64, rng: &mut R) -> Result<Configuration> {
    p.check_balls(m)?;
    let mut z = p.counts().to_vec();
    throw_uniform(&mut z, m - p.k(), rng);
    Ok(Configuration::from_parts(z, m))
}

/// Which of the two distributions a sample is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dist {
    St,
    Pl,
}

impl Dist {
    pub fn as_str(self) -> &'static str {
        match self {
            Dist::St => "st",
            Dist::Pl => "pl",
        }
    }

    /// Job index used when deriving random streams for this side.
    pub(crate) fn stream_job(self) -> u64 {
        match self {
            Dist::St => 0,
            Dist::Pl => 1,
        }
    }
}

impl std::fmt::Display for Dist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Dist {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "st" => Ok(Dist::St),
            "pl" => Ok(Dist::Pl),
            other => Err(format!(
                "unknown distribution {other:?} (expected st or pl)"
            )),
        }
    }
}

/// Reusable sampler for one side of a (planting, m) experiment.
///
/// Writes into a caller-owned buffer so hot loops do not allocate.
#[derive(Debug, Clone)]
pub struct SideSampler<'a> {
    planting: &'a Planting,
    m: u64,
    dist: Dist,
}

impl<'a> SideSampler<'a> {
    pub fn new(planting: &'a Planting, m: u64, dist: Dist) -> Result<Self> {
        if dist == Dist::Pl {
            planting.check_balls(m)?;
        }
        Ok(SideSampler { planting, m, dist })
    }

    pub fn fill<R: Rng + ?Sized>(&self, z: &mut [u64], rng: &mut R) {
        match self.dist {
            Dist::St => {
                z.fill(0);
                throw_uniform(z, self.m, rng);
            }
            Dist::Pl => {
                z.copy_from_slice(self.planting.counts());
                throw_uniform(z, self.m - self.planting.k(), rng);
            }
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}
