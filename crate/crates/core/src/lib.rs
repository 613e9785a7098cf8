//! The planted balls-into-bins model.
//!
//! Under the standard distribution ST, `m` balls are thrown independently and
//! uniformly into `n` labeled bins. Under the planted distribution PL, a fixed
//! planting of `k` balls is placed first and the remaining `m - k` balls are
//! thrown uniformly. This crate provides samplers for both, the
//! distinguishing statistics `F`, `H` and `I` with their decision cutoffs,
//! exact likelihoods, total variation distance (exact by enumeration and by
//! Monte Carlo), and the limiting predictions against which simulations are
//! compared.

pub mod asymptotics;
pub mod error;
pub mod likelihood;
mod mc;
pub mod model;
pub mod numeric;
pub mod planting_io;
pub mod sampler;
pub mod statistics;
pub mod stream;
pub mod tv;

pub use asymptotics::{
    empirical_moments, empirical_statistic_moments, ks_normality, ks_normality_with_threshold,
    ks_statistic, predicted_moments, predicted_statistic_moments, predicted_tv, std_normal_cdf,
    KsReport, MomentReport, MomentSubject,
};
pub use error::{Error, Result};
pub use likelihood::{
    error_term_asymptotic, error_term_exact, log_prob_pl, log_prob_st, log_ratio,
    log_ratio_expansion, LogRatio, LogValue,
};
pub use model::{
    classify_regime, make_planting, planting_variance, power_sums, scale_m, Configuration,
    Planting, PowerSums, Regime, RegimeSpec,
};
pub use planting_io::resolve_planting;
pub use sampler::{sample_pl, sample_st, Dist};
pub use statistics::{
    q_values, stat_f, stat_h, stat_i, stat_pairs, stat_power_sum, strategy_decide, threshold_mu,
    Direction, StatisticKind, ThresholdSpec,
};
pub use tv::{
    enumerate_configurations, exact_tv, mc_tv_optimal, mc_tv_strategy, TvEstimate, TvMethod,
};
