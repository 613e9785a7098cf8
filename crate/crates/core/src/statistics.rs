//! Occupancy deviations `q_i` and the distinguishing statistics built on them.
//!
//! With `d_i = n z_i - m` we have `q_i = d_i / m`, so every statistic of the
//! form `sum a_i q_i^p` equals `(sum a_i d_i^p) / m^p`. The numerator is
//! accumulated exactly in 128-bit integers and divided once; only when it
//! would overflow do we fall back to compensated floating-point summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, Planting};
use crate::numeric::NeumaierSum;
use crate::sampler::Dist;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatisticKind {
    /// Number of same-bin ball pairs.
    #[serde(rename = "pairs")]
    Pairs,
    /// `F_A = sum a_i q_i^2`.
    #[serde(rename = "f")]
    FlatF,
    /// `H_A = sum a_i q_i`.
    #[serde(rename = "h")]
    HillyH,
    /// `I_A = H_A - F_A / 2`.
    #[serde(rename = "i")]
    IntermediateI,
}

impl StatisticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StatisticKind::Pairs => "pairs",
            StatisticKind::FlatF => "f",
            StatisticKind::HillyH => "h",
            StatisticKind::IntermediateI => "i",
        }
    }

    /// The statistic matched to a regime.
    pub fn for_regime(regime: crate::model::Regime) -> Self {
        match regime {
            crate::model::Regime::Flat => StatisticKind::FlatF,
            crate::model::Regime::Hilly => StatisticKind::HillyH,
            crate::model::Regime::Intermediate => StatisticKind::IntermediateI,
        }
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StatisticKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pairs" => Ok(StatisticKind::Pairs),
            "f" => Ok(StatisticKind::FlatF),
            "h" => Ok(StatisticKind::HillyH),
            "i" => Ok(StatisticKind::IntermediateI),
            other => Err(format!(
                "unknown statistic {other:?} (expected f, h, i or pairs)"
            )),
        }
    }
}

/// Which side of the cutoff an "at least" comparison selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Choose ST iff value >= mu.
    ChooseStIfAtLeast,
    /// Choose PL iff value >= mu.
    ChoosePlIfAtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub kind: StatisticKind,
    pub mu: f64,
    pub direction: Direction,
}

/// `q_i = (n/m)(z_i - m/n)` for every bin.
pub fn q_values(z: &Configuration) -> Result<Vec<f64>> {
    let m = z.m();
    if m == 0 {
        return Err(Error::UndefinedForEmpty);
    }
    let n = z.n() as i128;
    let mf = m as f64;
    Ok(z.counts()
        .iter()
        .map(|&zi| (n * zi as i128 - m as i128) as f64 / mf)
        .collect())
}

/// Number of pairs of balls sharing a bin, `sum C(z_i, 2)`.
pub fn stat_pairs(z: &Configuration) -> u128 {
    z.counts()
        .iter()
        .map(|&zi| {
            let zi = zi as u128;
            zi * zi.saturating_sub(1) / 2
        })
        .sum()
}

/// Precomputed evaluator for `sum a_i q_i^p` over the planting's support.
#[derive(Debug, Clone)]
pub struct StatEvaluator {
    support: Vec<(usize, u64)>,
    n: usize,
}

impl StatEvaluator {
    pub fn new(p: &Planting) -> Self {
        StatEvaluator {
            support: p.support().collect(),
            n: p.n(),
        }
    }

    /// `sum a_i q_i^p` for raw counts `z` totalling `m` balls.
    pub fn power_sum(&self, z: &[u64], m: u64, power: u32) -> f64 {
        debug_assert!((1..=4).contains(&power));
        match self.exact_numerator(z, m, power) {
            Some(num) => num as f64 / (m as f64).powi(power as i32),
            None => self.float_power_sum(z, m, power),
        }
    }

    /// `(H_A, F_A)` from a single pass over the support.
    pub fn h_and_f(&self, z: &[u64], m: u64) -> (f64, f64) {
        let n = self.n as i128;
        let mi = m as i128;
        let mut s1: Option<i128> = Some(0);
        let mut s2: Option<i128> = Some(0);
        for &(i, a) in &self.support {
            let d = n * z[i] as i128 - mi;
            let a = a as i128;
            s1 = s1.and_then(|s| s.checked_add(a.checked_mul(d)?));
            s2 = s2.and_then(|s| s.checked_add(a.checked_mul(d.checked_mul(d)?)?));
        }
        let mf = m as f64;
        let h = match s1 {
            Some(s) => s as f64 / mf,
            None => self.float_power_sum(z, m, 1),
        };
        let f = match s2 {
            Some(s) => s as f64 / (mf * mf),
            None => self.float_power_sum(z, m, 2),
        };
        (h, f)
    }

    /// Value of `kind` (other than Pairs) for raw counts.
    pub fn statistic(&self, kind: StatisticKind, z: &[u64], m: u64) -> f64 {
        match kind {
            StatisticKind::FlatF => self.power_sum(z, m, 2),
            StatisticKind::HillyH => self.power_sum(z, m, 1),
            StatisticKind::IntermediateI => {
                let (h, f) = self.h_and_f(z, m);
                h - 0.5 * f
            }
            StatisticKind::Pairs => z
                .iter()
                .map(|&zi| (zi as f64) * (zi as f64 - 1.0) / 2.0)
                .sum(),
        }
    }

    fn exact_numerator(&self, z: &[u64], m: u64, power: u32) -> Option<i128> {
        let n = self.n as i128;
        let mi = m as i128;
        let mut acc: i128 = 0;
        for &(i, a) in &self.support {
            let d = n.checked_mul(z[i] as i128)? - mi;
            let term = d.checked_pow(power)?.checked_mul(a as i128)?;
            acc = acc.checked_add(term)?;
        }
        Some(acc)
    }

    fn float_power_sum(&self, z: &[u64], m: u64, power: u32) -> f64 {
        let n = self.n as f64;
        let mf = m as f64;
        self.support
            .iter()
            .map(|&(i, a)| {
                let q = (n * z[i] as f64 - mf) / mf;
                a as f64 * q.powi(power as i32)
            })
            .collect::<NeumaierSum>()
            .value()
    }
}

fn check_stat_inputs(p: &Planting, z: &Configuration) -> Result<()> {
    p.check_dims(z)?;
    if z.m() == 0 {
        return Err(Error::UndefinedForEmpty);
    }
    Ok(())
}

/// `sum a_i q_i^p` for `p` in `1..=4`.
pub fn stat_power_sum(p: &Planting, z: &Configuration, power: u32) -> Result<f64> {
    if !(1..=4).contains(&power) {
        return Err(Error::UnsupportedPower(power));
    }
    check_stat_inputs(p, z)?;
    Ok(StatEvaluator::new(p).power_sum(z.counts(), z.m(), power))
}

/// `F_A(Z) = sum a_i q_i^2`.
pub fn stat_f(p: &Planting, z: &Configuration) -> Result<f64> {
    stat_power_sum(p, z, 2)
}

/// `H_A(Z) = sum a_i q_i`.
pub fn stat_h(p: &Planting, z: &Configuration) -> Result<f64> {
    stat_power_sum(p, z, 1)
}

/// `I_A(Z) = sum a_i q_i - (1/2) sum a_i q_i^2`.
pub fn stat_i(p: &Planting, z: &Configuration) -> Result<f64> {
    check_stat_inputs(p, z)?;
    let (h, f) = StatEvaluator::new(p).h_and_f(z.counts(), z.m());
    Ok(h - 0.5 * f)
}

/// Decision cutoff for `kind`: the midpoint of the statistic's ST and PL means.
pub fn threshold_mu(p: &Planting, m: u64, kind: StatisticKind) -> Result<ThresholdSpec> {
    if m == 0 {
        return Err(Error::UndefinedForEmpty);
    }
    let n = p.n() as f64;
    let k = p.k() as f64;
    let m = m as f64;
    let v = p.variance();
    let (mu, direction) = match kind {
        StatisticKind::Pairs => return Err(Error::NoThresholdDefined("pairs")),
        StatisticKind::FlatF => (
            k * n / m - k * k * n / (2.0 * m * m),
            Direction::ChooseStIfAtLeast,
        ),
        StatisticKind::HillyH => (v * n * n / (2.0 * m), Direction::ChoosePlIfAtLeast),
        StatisticKind::IntermediateI => (
            -k * n / (2.0 * m) + k * k * n / (4.0 * m * m) + v * n * n / (2.0 * m),
            Direction::ChoosePlIfAtLeast,
        ),
    };
    Ok(ThresholdSpec {
        kind,
        mu,
        direction,
    })
}

/// Applies a threshold rule; a value equal to `mu` goes to the "at least" side.
pub fn strategy_decide(value: f64, spec: &ThresholdSpec) -> Dist {
    let at_least = value >= spec.mu;
    match (spec.direction, at_least) {
        (Direction::ChooseStIfAtLeast, true) | (Direction::ChoosePlIfAtLeast, false) => Dist::St,
        (Direction::ChooseStIfAtLeast, false) | (Direction::ChoosePlIfAtLeast, true) => Dist::Pl,
    }
}
