//! Exact log-probabilities under ST and PL and the log-likelihood ratio.
//!
//! Everything stays in the log domain: `m ln n` overflows a linear-domain
//! double long before the instances we care about.

use crate::error::{Error, Result};
use crate::model::{Configuration, Planting};
use crate::numeric::{ln_factorial, ln_falling, NeumaierSum};
use crate::statistics::StatEvaluator;

/// A natural logarithm that may be `ln 0`.
///
/// Impossible outcomes are an explicit variant rather than a floating
/// `-inf`, so they cannot leak into arithmetic unnoticed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogValue {
    Finite(f64),
    NegInfinity,
}

/// `ln(PL(Z) / ST(Z))`.
pub type LogRatio = LogValue;

impl LogValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            LogValue::Finite(v) => Some(v),
            LogValue::NegInfinity => None,
        }
    }

    pub fn is_neg_infinity(self) -> bool {
        matches!(self, LogValue::NegInfinity)
    }

    /// `exp` of the value; zero for the negative-infinity marker.
    pub fn exp(self) -> f64 {
        match self {
            LogValue::Finite(v) => v.exp(),
            LogValue::NegInfinity => 0.0,
        }
    }

    /// `true` when `PL <= ST`, i.e. the ratio is at most one.
    pub fn at_most_zero(self) -> bool {
        match self {
            LogValue::Finite(v) => v <= 0.0,
            LogValue::NegInfinity => true,
        }
    }
}

/// `ln ST(Z) = ln m! - sum ln z_i! - m ln n`.
pub fn log_prob_st(z: &Configuration) -> f64 {
    let mut acc = NeumaierSum::default();
    acc.add(ln_factorial(z.m()));
    for &zi in z.counts() {
        acc.add(-ln_factorial(zi));
    }
    acc.add(-(z.m() as f64) * (z.n() as f64).ln());
    acc.value()
}

/// `ln PL(Z)`, or the negative-infinity marker when some `z_i < a_i`.
pub fn log_prob_pl(p: &Planting, z: &Configuration) -> Result<LogValue> {
    p.check_dims(z)?;
    p.check_balls(z.m())?;
    let mut acc = NeumaierSum::default();
    for (&zi, &ai) in z.counts().iter().zip(p.counts()) {
        if zi < ai {
            return Ok(LogValue::NegInfinity);
        }
        acc.add(-ln_factorial(zi - ai));
    }
    let free = z.m() - p.k();
    acc.add(ln_factorial(free));
    acc.add(-(free as f64) * (z.n() as f64).ln());
    Ok(LogValue::Finite(acc.value()))
}

/// Evaluates `ln(PL/ST)` for many configurations sharing `(P, m)`.
///
/// Uses the falling-factorial form
/// `k ln n + sum_i ln (z_i)_{a_i} - ln (m)_k`, with the last two
/// configuration-independent terms folded into a constant.
#[derive(Debug, Clone)]
pub struct LogRatioEvaluator {
    support: Vec<(usize, u64)>,
    offset: f64,
}

impl LogRatioEvaluator {
    pub fn new(p: &Planting, m: u64) -> Result<Self> {
        p.check_balls(m)?;
        let offset = p.k() as f64 * (p.n() as f64).ln() - ln_falling(m, p.k());
        Ok(LogRatioEvaluator {
            support: p.support().collect(),
            offset,
        })
    }

    pub fn eval(&self, z: &[u64]) -> LogRatio {
        if self.support.is_empty() {
            return LogValue::Finite(0.0);
        }
        let mut acc = NeumaierSum::default();
        acc.add(self.offset);
        for &(i, a) in &self.support {
            if z[i] < a {
                return LogValue::NegInfinity;
            }
            acc.add(ln_falling(z[i], a));
        }
        LogValue::Finite(acc.value())
    }
}

/// `ln(PL(Z)/ST(Z))` via the falling-factorial form.
pub fn log_ratio(p: &Planting, z: &Configuration) -> Result<LogRatio> {
    p.check_dims(z)?;
    Ok(LogRatioEvaluator::new(p, z.m())?.eval(z.counts()))
}

/// `ln(E1 E2)`: the exact correction between the likelihood ratio and
/// `prod (1 + q_i)^{a_i}`.
///
/// `ln E1 = sum_i sum_{j < a_i} ln(1 - j/z_i)` and
/// `ln E2 = k ln m - ln (m)_k = -sum_{j < k} ln(1 - j/m)`.
pub fn error_term_exact(p: &Planting, z: &Configuration) -> Result<f64> {
    p.check_dims(z)?;
    p.check_balls(z.m())?;
    let mut acc = NeumaierSum::default();
    for (bin, a) in p.support() {
        let zi = z.counts()[bin];
        if zi < a || zi == 0 {
            return Err(Error::UndefinedErrorTerm { bin, planted: a });
        }
        let zf = zi as f64;
        for j in 1..a {
            acc.add((-(j as f64) / zf).ln_1p());
        }
    }
    let mf = z.m() as f64;
    for j in 1..p.k() {
        acc.add(-(-(j as f64) / mf).ln_1p());
    }
    Ok(acc.value())
}

/// Leading-order value of `ln(E1 E2)`:
/// `-V n^2/2m + k n/2m + 5 k n^2/12 m^2 - k^2 n/4 m^2`.
pub fn error_term_asymptotic(p: &Planting, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::UndefinedForEmpty);
    }
    let n = p.n() as f64;
    let k = p.k() as f64;
    let v = p.variance();
    let m = m as f64;
    Ok(
        -v * n * n / (2.0 * m) + k * n / (2.0 * m) + 5.0 * k * n * n / (12.0 * m * m)
            - k * k * n / (4.0 * m * m),
    )
}

/// Five-term approximation of the log ratio:
/// `-V n^2/2m + k n/2m - k^2 n/4m^2 + H_A - F_A/2`.
pub fn log_ratio_expansion(p: &Planting, z: &Configuration) -> Result<f64> {
    p.check_dims(z)?;
    if z.m() == 0 {
        return Err(Error::UndefinedForEmpty);
    }
    let n = p.n() as f64;
    let k = p.k() as f64;
    let v = p.variance();
    let m = z.m() as f64;
    let (h, f) = StatEvaluator::new(p).h_and_f(z.counts(), z.m());
    Ok(-v * n * n / (2.0 * m) + k * n / (2.0 * m) - k * k * n / (4.0 * m * m) + h - 0.5 * f)
}

/// `sum a_i ln(1 + q_i)`; negative infinity marker if a planted bin is empty.
pub fn planted_log_q_sum(p: &Planting, z: &Configuration) -> Result<LogValue> {
    p.check_dims(z)?;
    if z.m() == 0 {
        return Err(Error::UndefinedForEmpty);
    }
    let n = p.n() as f64;
    let m = z.m() as f64;
    let mut acc = NeumaierSum::default();
    for (bin, a) in p.support() {
        let zi = z.counts()[bin];
        if zi == 0 {
            return Ok(LogValue::NegInfinity);
        }
        let q = (n * zi as f64 - m) / m;
        acc.add(a as f64 * q.ln_1p());
    }
    Ok(LogValue::Finite(acc.value()))
}
