//! Command-line front end for the `plantedbins` library.
//!
//! Data goes to stdout; warnings and errors go to stderr. Exit code 0 is
//! success, 1 a usage error, 2 a runtime error.

pub mod error;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use plantedbins::model::{
    scale_m_capped, DEFAULT_FLAT_CUTOFF, DEFAULT_HILLY_CUTOFF, DEFAULT_MAX_M,
};
use plantedbins::tv::DEFAULT_ENUMERATION_CAP;
use plantedbins::{classify_regime, Dist, Planting, Regime, RegimeSpec, StatisticKind};
use serde::Serialize;

pub use error::CliError;
pub use sweep::{run_sweep, Method, OutputFormat, SweepRow, SweepSpec, CSV_HEADER};

#[derive(Debug, Parser)]
#[command(
    name = "plantedbins",
    version,
    about = "Planted balls-into-bins detection experiments"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "PLANTEDBINS_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limiting TV for a regime and scale c.
    Predict(PredictArgs),
    /// Exact TV by enumerating all configurations.
    ExactTv(ExactTvArgs),
    /// Monte Carlo TV of the optimal test or a threshold strategy.
    McTv(McTvArgs),
    /// Predicted versus empirical moments of sum a_i q_i^p.
    Moments(MomentsArgs),
    /// KS distance of a standardized statistic from N(0, 1).
    Normality(NormalityArgs),
    /// Exact versus limiting error term of the log likelihood ratio.
    ErrorTerm(ErrorTermArgs),
    /// TV over a grid of c values.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct PlantingArgs {
    /// flat:K, singlebin:K or file:PATH (JSON).
    #[arg(long)]
    pub planting: String,
    /// Number of bins; required for flat: and singlebin:.
    #[arg(long)]
    pub n: Option<usize>,
    /// Override the classified regime.
    #[arg(long)]
    pub regime: Option<Regime>,
    #[arg(long, default_value_t = DEFAULT_FLAT_CUTOFF)]
    pub flat_cutoff: f64,
    #[arg(long, default_value_t = DEFAULT_HILLY_CUTOFF)]
    pub hilly_cutoff: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct BallsArgs {
    /// Number of balls.
    #[arg(long)]
    pub m: Option<u64>,
    /// Scale parameter; m is derived from the regime.
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Samples per side.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(2..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Regime; if omitted it is classified from --planting.
    #[arg(long)]
    pub regime: Option<Regime>,
    #[arg(long)]
    pub c: f64,
    /// Intermediate-regime lambda; defaults to rho of --planting.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub planting: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Significant digits.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=17))]
    pub digits: u32,
}

#[derive(Debug, Args)]
pub struct ExactTvArgs {
    #[command(flatten)]
    pub planting: PlantingArgs,
    #[command(flatten)]
    pub balls: BallsArgs,
    /// Largest number of configurations to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=17))]
    pub digits: u32,
}

#[derive(Debug, Args)]
pub struct McTvArgs {
    #[command(flatten)]
    pub planting: PlantingArgs,
    #[command(flatten)]
    pub balls: BallsArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, default_value = "optimal")]
    pub method: Method,
    /// Statistic for --method strategy; defaults to the regime's.
    #[arg(long)]
    pub stat: Option<StatisticKind>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub planting: PlantingArgs,
    #[command(flatten)]
    pub balls: BallsArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub power: Option<u32>,
    /// Named statistic instead of --power.
    #[arg(long, conflicts_with = "power")]
    pub stat: Option<StatisticKind>,
    #[arg(long, default_value = "st")]
    pub dist: Dist,
}

#[derive(Debug, Args)]
pub struct NormalityArgs {
    #[command(flatten)]
    pub planting: PlantingArgs,
    #[command(flatten)]
    pub balls: BallsArgs,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(100..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the regime's statistic.
    #[arg(long)]
    pub stat: Option<StatisticKind>,
    #[arg(long, default_value = "st")]
    pub dist: Dist,
    #[arg(long, default_value_t = plantedbins::asymptotics::DEFAULT_KS_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct ErrorTermArgs {
    #[command(flatten)]
    pub planting: PlantingArgs,
    #[command(flatten)]
    pub balls: BallsArgs,
    /// Configurations drawn from PL to average the exact term over.
    #[arg(long, default_value_t = 1_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub planting: PlantingArgs,
    /// Comma-separated c values.
    #[arg(long = "c", value_delimiter = ',', required = true, num_args = 1..)]
    pub c_values: Vec<f64>,
    /// Comma-separated subset of exact, optimal, strategy.
    #[arg(long, value_delimiter = ',', default_value = "optimal,strategy")]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub stat: Option<StatisticKind>,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
    #[arg(long, default_value_t = DEFAULT_MAX_M)]
    pub max_m: u64,
    #[arg(long, default_value = "csv")]
    pub format: OutputFormat,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn format_significant(x: f64, digits: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 1,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let threads = cli
        .threads
        .map(|t| t as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    // Output is buffered so the locked std handles need not cross threads.
    let mut out_buf = Vec::new();
    let mut err_buf = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &mut out_buf, &mut err_buf));
    err.write_all(&err_buf)?;
    out.write_all(&out_buf)?;
    out.flush()?;
    result
}

struct Setup {
    planting: Planting,
    spec: RegimeSpec,
    m: u64,
}

impl PlantingArgs {
    fn load(&self, err: &mut dyn Write) -> Result<(Planting, RegimeSpec), CliError> {
        let planting = plantedbins::resolve_planting(&self.planting, self.n)?;
        if planting.k() > 0 && planting.too_sparse_for_asymptotics() {
            writeln!(
                err,
                "warning: k = {} is below 3 sqrt(n) = {:.1}; limiting predictions may be inaccurate",
                planting.k(),
                3.0 * (planting.n() as f64).sqrt()
            )?;
        }
        let mut spec = if planting.k() == 0 {
            RegimeSpec {
                regime: Regime::Flat,
                c: None,
                lambda: 0.0,
                rho: 0.0,
            }
        } else {
            classify_regime(&planting, self.flat_cutoff, self.hilly_cutoff)?
        };
        if let Some(r) = self.regime {
            spec.regime = r;
        }
        Ok((planting, spec))
    }

    fn setup(&self, balls: &BallsArgs, err: &mut dyn Write) -> Result<Setup, CliError> {
        let (planting, mut spec) = self.load(err)?;
        let m = match (balls.m, balls.c) {
            (Some(m), _) => m,
            (None, Some(c)) => {
                spec = spec.with_c(c);
                scale_m_capped(&planting, &spec, DEFAULT_MAX_M)?
            }
            (None, None) => unreachable!("clap enforces one of --m, --c"),
        };
        Ok(Setup { planting, spec, m })
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct McTvOutput {
    tv: f64,
    stderr: f64,
    method: &'static str,
    stat: Option<StatisticKind>,
    m: u64,
    samples: u64,
    seed: u64,
}

#[derive(Serialize)]
struct ErrorTermOutput {
    m: u64,
    asymptotic: f64,
    exact_mean: f64,
    exact_sd: f64,
    mean_abs_gap: f64,
    samples: u64,
}

fn dispatch(command: Command, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<(), CliError> {
    match command {
        Command::Predict(a) => {
            let spec = match (&a.planting, a.regime) {
                (Some(src), regime) => {
                    let planting = plantedbins::resolve_planting(src, a.n)?;
                    let mut spec =
                        classify_regime(&planting, DEFAULT_FLAT_CUTOFF, DEFAULT_HILLY_CUTOFF)?;
                    if let Some(r) = regime {
                        spec.regime = r;
                    }
                    if let Some(l) = a.lambda {
                        spec.lambda = l;
                    }
                    spec.with_c(a.c)
                }
                (None, Some(regime)) => {
                    if regime == Regime::Intermediate && a.lambda.is_none() {
                        return Err(CliError::Usage(
                            "intermediate regime needs --lambda or --planting".into(),
                        ));
                    }
                    RegimeSpec::manual(regime, a.c, a.lambda.unwrap_or(0.0))
                }
                (None, None) => {
                    return Err(CliError::Usage("give --regime or --planting".into()));
                }
            };
            let tv = plantedbins::predicted_tv(&spec)?;
            writeln!(out, "{}", format_significant(tv, a.digits))?;
        }
        Command::ExactTv(a) => {
            let s = a.planting.setup(&a.balls, err)?;
            let est = plantedbins::tv::exact_tv_capped(&s.planting, s.m, a.cap)?;
            writeln!(out, "{}", format_significant(est.value, a.digits))?;
        }
        Command::McTv(a) => {
            let s = a.planting.setup(&a.balls, err)?;
            let (est, stat) = match a.method {
                Method::Optimal => (
                    plantedbins::mc_tv_optimal(&s.planting, s.m, a.mc.samples, a.mc.seed)?,
                    None,
                ),
                Method::Strategy => {
                    let kind = a
                        .stat
                        .unwrap_or_else(|| StatisticKind::for_regime(s.spec.regime));
                    let est = plantedbins::mc_tv_strategy(
                        &s.planting,
                        s.m,
                        kind,
                        a.mc.samples,
                        a.mc.seed,
                    )?;
                    (est, Some(kind))
                }
                Method::Exact => {
                    return Err(CliError::Usage("use the exact-tv command".into()));
                }
            };
            print_json(
                out,
                &McTvOutput {
                    tv: est.value,
                    stderr: est.stderr,
                    method: a.method.as_str(),
                    stat,
                    m: s.m,
                    samples: est.samples_per_side,
                    seed: est.seed,
                },
            )?;
        }
        Command::Moments(a) => {
            let s = a.planting.setup(&a.balls, err)?;
            let report = match (a.power, a.stat) {
                (_, Some(kind)) => plantedbins::empirical_statistic_moments(
                    &s.planting,
                    s.m,
                    kind,
                    a.dist,
                    a.mc.samples,
                    a.mc.seed,
                )?,
                (Some(power), None) => plantedbins::empirical_moments(
                    &s.planting,
                    s.m,
                    power,
                    a.dist,
                    a.mc.samples,
                    a.mc.seed,
                )?,
                (None, None) => return Err(CliError::Usage("give --power or --stat".into())),
            };
            print_json(out, &report)?;
        }
        Command::Normality(a) => {
            let s = a.planting.setup(&a.balls, err)?;
            let kind = a
                .stat
                .unwrap_or_else(|| StatisticKind::for_regime(s.spec.regime));
            let report = plantedbins::ks_normality_with_threshold(
                &s.planting,
                s.m,
                kind,
                a.dist,
                a.samples,
                a.seed,
                a.threshold,
            )?;
            print_json(out, &report)?;
        }
        Command::ErrorTerm(a) => {
            let s = a.planting.setup(&a.balls, err)?;
            let asymptotic = plantedbins::error_term_asymptotic(&s.planting, s.m)?;
            let mut rng = plantedbins::stream::derive_stream(a.seed, 0, 0);
            let mut exact = Vec::with_capacity(a.samples as usize);
            for _ in 0..a.samples {
                let z = plantedbins::sample_pl(&s.planting, s.m, &mut rng)?;
                exact.push(plantedbins::error_term_exact(&s.planting, &z)?);
            }
            let (mean, var) = plantedbins::asymptotics::mean_and_variance(&exact);
            let gap =
                exact.iter().map(|e| (e - asymptotic).abs()).sum::<f64>() / exact.len() as f64;
            print_json(
                out,
                &ErrorTermOutput {
                    m: s.m,
                    asymptotic,
                    exact_mean: mean,
                    exact_sd: var.sqrt(),
                    mean_abs_gap: gap,
                    samples: a.samples,
                },
            )?;
        }
        Command::Sweep(a) => {
            let spec = SweepSpec {
                planting_source: a.planting.planting.clone(),
                n: a.planting.n,
                regime_override: a.planting.regime,
                stat_override: a.stat,
                c_values: a.c_values,
                samples: a.mc.samples,
                seed: a.mc.seed,
                methods: a.methods,
                flat_cutoff: a.planting.flat_cutoff,
                hilly_cutoff: a.planting.hilly_cutoff,
                enumeration_cap: a.cap,
                max_m: a.max_m,
                output: a.out,
                format: a.format,
            };
            // Warns about sparse plantings; the sweep reloads it.
            a.planting.load(err)?;
            let rows = run_sweep(&spec)?;
            match &spec.output {
                Some(path) => {
                    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
                    sweep::write_table(&rows, spec.format, file)?;
                }
                None => sweep::write_table(&rows, spec.format, &mut *out)?,
            }
        }
    }
    Ok(())
}
