//! Plantings, configurations, and the regime trichotomy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cutoff on `rho` below which a planting is treated as Flat.
pub const DEFAULT_FLAT_CUTOFF: f64 = 0.1;
/// Default cutoff on `rho` above which a planting is treated as Hilly.
pub const DEFAULT_HILLY_CUTOFF: f64 = 10.0;
/// Default upper bound on the ball count produced by [`scale_m`].
pub const DEFAULT_MAX_M: u64 = 1_000_000_000;

/// A fixed initial arrangement of `k` balls over `n` labeled bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planting {
    a: Vec<u64>,
    k: u64,
}

impl Planting {
    /// Builds a planting from per-bin counts. Entries must be non-negative.
    pub fn new(counts: &[i64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidPlanting("no bins".into()));
        }
        let mut a = Vec::with_capacity(counts.len());
        for (i, &c) in counts.iter().enumerate() {
            let c = u64::try_from(c)
                .map_err(|_| Error::InvalidPlanting(format!("bin {i} has negative count {c}")))?;
            a.push(c);
        }
        Self::from_counts(a)
    }

    /// Builds a planting from unsigned counts.
    pub fn from_counts(a: Vec<u64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidPlanting("no bins".into()));
        }
        let k = a
            .iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(x))
            .ok_or(Error::ArithmeticOverflow("planted ball count"))?;
        Ok(Planting { a, k })
    }

    /// The planting with `k` balls in bin 0 and nothing elsewhere.
    pub fn single_bin(n: usize, k: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPlanting("no bins".into()));
        }
        let mut a = vec![0; n];
        a[0] = k;
        Self::from_counts(a)
    }

    /// The planting with `k / n` balls in every bin; `n` must divide `k`.
    pub fn flat(n: usize, k: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPlanting("no bins".into()));
        }
        if !k.is_multiple_of(n as u64) {
            return Err(Error::InvalidPlanting(format!(
                "flat planting needs n | k, got k = {k}, n = {n}"
            )));
        }
        Self::from_counts(vec![k / n as u64; n])
    }

    pub fn counts(&self) -> &[u64] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Indices of bins that carry at least one planted ball.
    pub fn support(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.a.iter().copied().enumerate().filter(|&(_, a)| a > 0)
    }

    /// `V(A) = (sum a_i^2)/n - k^2/n^2`, the variance of a uniformly chosen `a_i`.
    ///
    /// Evaluated as `(n * S2 - k^2) / n^2` with an exact integer numerator, so a
    /// constant planting gives exactly zero.
    pub fn variance(&self) -> f64 {
        let n = self.n() as u128;
        let k = self.k as u128;
        let s2: u128 = self.a.iter().map(|&x| (x as u128) * (x as u128)).sum();
        let num = n * s2 - k * k;
        num as f64 / (n as f64 * n as f64)
    }

    /// Exact power sums `(sum a_i, sum a_i^2, sum a_i^3, sum a_i^4)`.
    pub fn power_sums(&self) -> Result<PowerSums> {
        let mut sums = [0u128; 4];
        for &x in &self.a {
            let x = x as u128;
            let mut pow = 1u128;
            for s in sums.iter_mut() {
                pow = pow
                    .checked_mul(x)
                    .ok_or(Error::ArithmeticOverflow("planting power sums"))?;
                *s = s
                    .checked_add(pow)
                    .ok_or(Error::ArithmeticOverflow("planting power sums"))?;
            }
        }
        Ok(PowerSums {
            s1: sums[0],
            s2: sums[1],
            s3: sums[2],
            s4: sums[3],
        })
    }

    /// `true` when `k < 3 sqrt(n)`, where the asymptotic theory is not expected to apply.
    pub fn too_sparse_for_asymptotics(&self) -> bool {
        (self.k as f64) < 3.0 * (self.n() as f64).sqrt()
    }

    pub(crate) fn check_balls(&self, m: u64) -> Result<()> {
        if m < self.k {
            Err(Error::NotEnoughBalls { m, k: self.k })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_dims(&self, z: &Configuration) -> Result<()> {
        if self.n() != z.n() {
            Err(Error::DimensionMismatch {
                planting: self.n(),
                configuration: z.n(),
            })
        } else {
            Ok(())
        }
    }
}

/// Builds a planting; see [`Planting::new`].
pub fn make_planting(a: &[i64]) -> Result<Planting> {
    Planting::new(a)
}

/// See [`Planting::variance`].
pub fn planting_variance(p: &Planting) -> f64 {
    p.variance()
}

/// See [`Planting::power_sums`].
pub fn power_sums(p: &Planting) -> Result<PowerSums> {
    p.power_sums()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowerSums {
    pub s1: u128,
    pub s2: u128,
    pub s3: u128,
    pub s4: u128,
}

/// An outcome of `m` balls in `n` labeled bins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    z: Vec<u64>,
    m: u64,
}

impl Configuration {
    pub fn new(z: Vec<u64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidConfiguration("no bins".into()));
        }
        let m = z
            .iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(x))
            .ok_or(Error::ArithmeticOverflow("configuration ball count"))?;
        Ok(Configuration { z, m })
    }

    /// Caller guarantees `m == z.iter().sum()`.
    pub(crate) fn from_parts(z: Vec<u64>, m: u64) -> Self {
        debug_assert_eq!(z.iter().sum::<u64>(), m);
        Configuration { z, m }
    }

    pub fn counts(&self) -> &[u64] {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Flat,
    Hilly,
    Intermediate,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Flat => "flat",
            Regime::Hilly => "hilly",
            Regime::Intermediate => "intermediate",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "flat" => Ok(Regime::Flat),
            "hilly" => Ok(Regime::Hilly),
            "intermediate" => Ok(Regime::Intermediate),
            other => Err(format!("unknown regime {other:?}")),
        }
    }
}

/// A regime tag with its scaling constants.
///
/// `rho = V n^{3/2} / k` is the finite-size proxy for the limit that defines
/// the regime; `lambda` only matters for [`Regime::Intermediate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub regime: Regime,
    pub c: Option<f64>,
    pub lambda: f64,
    pub rho: f64,
}

impl RegimeSpec {
    /// A spec for a regime chosen by hand rather than by classification.
    pub fn manual(regime: Regime, c: f64, lambda: f64) -> Self {
        RegimeSpec {
            regime,
            c: Some(c),
            lambda,
            rho: f64::NAN,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }
}

/// Classifies a planting by `rho = V n^{3/2} / k` against the two cutoffs.
pub fn classify_regime(p: &Planting, flat_cutoff: f64, hilly_cutoff: f64) -> Result<RegimeSpec> {
    if p.k() == 0 {
        return Err(Error::DegeneratePlanting);
    }
    let n = p.n() as f64;
    let rho = p.variance() * n * n.sqrt() / p.k() as f64;
    let (regime, lambda) = if rho < flat_cutoff {
        (Regime::Flat, 0.0)
    } else if rho > hilly_cutoff {
        (Regime::Hilly, 0.0)
    } else {
        (Regime::Intermediate, rho)
    };
    Ok(RegimeSpec {
        regime,
        c: None,
        lambda,
        rho,
    })
}

/// Ball count for a scaling constant: `c k sqrt(n)` in the Flat and
/// Intermediate regimes, `c V n^2` in the Hilly regime.
///
/// Rounded half away from zero and clamped to at least `max(k, 1)`.
pub fn scale_m(p: &Planting, spec: &RegimeSpec) -> Result<u64> {
    scale_m_capped(p, spec, DEFAULT_MAX_M)
}

pub fn scale_m_capped(p: &Planting, spec: &RegimeSpec, max_m: u64) -> Result<u64> {
    let c = spec.c.ok_or(Error::InvalidScale(f64::NAN))?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidScale(c));
    }
    let n = p.n() as f64;
    let raw = match spec.regime {
        Regime::Flat | Regime::Intermediate => c * p.k() as f64 * n.sqrt(),
        Regime::Hilly => c * p.variance() * n * n,
    };
    let rounded = raw.round();
    if rounded > max_m as f64 {
        return Err(Error::ScaleTooLarge {
            requested: rounded,
            max: max_m,
        });
    }
    Ok((rounded as u64).max(p.k()).max(1))
}
