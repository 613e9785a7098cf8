//! TV-versus-c sweeps and their CSV/JSON tables.

use std::io::Write;
use std::path::PathBuf;

use plantedbins::model::{scale_m_capped, DEFAULT_MAX_M};
use plantedbins::stream::job_seed;
use plantedbins::tv::exact_tv_capped;
use plantedbins::{
    classify_regime, mc_tv_optimal, mc_tv_strategy, predicted_tv, Planting, Regime, RegimeSpec,
    StatisticKind, TvEstimate,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;

/// Column order of the sweep table. Changing it is a format version bump.
pub const CSV_HEADER: [&str; 14] = [
    "c",
    "m",
    "n",
    "k",
    "V",
    "regime",
    "rho",
    "method",
    "stat",
    "tv",
    "stderr",
    "tv_predicted",
    "samples",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exact,
    Optimal,
    Strategy,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Optimal => "optimal",
            Method::Strategy => "strategy",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "optimal" => Ok(Method::Optimal),
            "strategy" => Ok(Method::Strategy),
            other => Err(format!(
                "unknown method {other:?} (expected exact, optimal or strategy)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub planting_source: String,
    pub n: Option<usize>,
    pub regime_override: Option<Regime>,
    pub stat_override: Option<StatisticKind>,
    pub c_values: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub flat_cutoff: f64,
    pub hilly_cutoff: f64,
    pub enumeration_cap: u128,
    pub max_m: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl SweepSpec {
    pub fn new(planting_source: impl Into<String>, n: Option<usize>, c_values: Vec<f64>) -> Self {
        SweepSpec {
            planting_source: planting_source.into(),
            n,
            regime_override: None,
            stat_override: None,
            c_values,
            samples: 10_000,
            seed: 0,
            methods: vec![Method::Optimal, Method::Strategy],
            flat_cutoff: plantedbins::model::DEFAULT_FLAT_CUTOFF,
            hilly_cutoff: plantedbins::model::DEFAULT_HILLY_CUTOFF,
            enumeration_cap: plantedbins::tv::DEFAULT_ENUMERATION_CAP,
            max_m: DEFAULT_MAX_M,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    /// Sorts and de-duplicates `c_values` and `methods`, then checks the
    /// invariants. Runs before any work.
    pub fn validate(&mut self) -> Result<(), CliError> {
        if self.c_values.is_empty() {
            return Err(CliError::Usage("at least one c value is required".into()));
        }
        if let Some(bad) = self.c_values.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(CliError::Usage(format!(
                "c values must be positive, got {bad}"
            )));
        }
        if self.samples < 2 {
            return Err(CliError::Usage("samples must be at least 2".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Usage("at least one method is required".into()));
        }
        if self.stat_override == Some(StatisticKind::Pairs) {
            return Err(CliError::Usage(
                "the pairs statistic has no threshold".into(),
            ));
        }
        self.c_values.sort_by(f64::total_cmp);
        self.c_values.dedup();
        self.methods.sort();
        self.methods.dedup();
        Ok(())
    }
}

/// One line of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub m: u64,
    pub n: usize,
    pub k: u64,
    #[serde(rename = "V")]
    pub v: f64,
    pub regime: Regime,
    pub rho: f64,
    pub method: &'static str,
    pub stat: &'static str,
    pub tv: f64,
    pub stderr: f64,
    pub tv_predicted: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Runs every (c, method) job of the sweep.
///
/// Rows come back ordered by c, then method (exact, optimal, strategy). Jobs
/// for the same c share one derived seed, so the optimal and strategy rows
/// are computed from the same draws.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    let mut spec = spec.clone();
    spec.validate()?;
    let planting = plantedbins::resolve_planting(&spec.planting_source, spec.n)?;
    run_sweep_on(&spec, &planting)
}

pub fn run_sweep_on(spec: &SweepSpec, planting: &Planting) -> Result<Vec<SweepRow>, CliError> {
    let classified = classify_regime(planting, spec.flat_cutoff, spec.hilly_cutoff)?;
    let regime = spec.regime_override.unwrap_or(classified.regime);
    let base = RegimeSpec {
        regime,
        c: None,
        lambda: classified.rho,
        rho: classified.rho,
    };
    let stat = spec
        .stat_override
        .unwrap_or_else(|| StatisticKind::for_regime(regime));

    let jobs: Vec<(usize, Method)> = (0..spec.c_values.len())
        .flat_map(|ci| spec.methods.iter().map(move |&m| (ci, m)))
        .collect();

    jobs.par_iter()
        .map(|&(ci, method)| {
            let c = spec.c_values[ci];
            let regime_spec = base.with_c(c);
            let m = scale_m_capped(planting, &regime_spec, spec.max_m)?;
            let seed = job_seed(spec.seed, ci as u64);
            let (est, stat_name): (TvEstimate, &'static str) = match method {
                Method::Exact => (exact_tv_capped(planting, m, spec.enumeration_cap)?, "none"),
                Method::Optimal => (mc_tv_optimal(planting, m, spec.samples, seed)?, "none"),
                Method::Strategy => (
                    mc_tv_strategy(planting, m, stat, spec.samples, seed)?,
                    stat.as_str(),
                ),
            };
            Ok(SweepRow {
                c,
                m,
                n: planting.n(),
                k: planting.k(),
                v: planting.variance(),
                regime,
                rho: classified.rho,
                method: method.as_str(),
                stat: stat_name,
                tv: est.value,
                stderr: est.stderr,
                tv_predicted: predicted_tv(&regime_spec)?,
                samples: est.samples_per_side,
                seed: est.seed,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_table<W: Write>(
    rows: &[SweepRow],
    format: OutputFormat,
    out: W,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}
