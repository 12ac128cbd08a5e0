//! Argument parsing and subcommand dispatch.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weibcv_core::bayes::{McmcConfig, Prior, Proposal};
use weibcv_core::censoring::generate_sample_with;
use weibcv_core::dataset::plasma_cell_myeloma;
use weibcv_core::least_squares::NllseVariant;
use weibcv_core::montecarlo::{IntervalMethod, Method, ProposalPolicy};
use weibcv_core::rng::{stream_rng, streams};
use weibcv_core::{CensoringScheme, Parameter, WeibullParams, WithdrawalRounding};

use crate::analysis::{analyze, Analysis, AnalysisOptions};
use crate::io::{read_sample, sample_to_json, write_text, IoError};
use crate::study::{parse_study, report_csv, report_rows, run_cells, REPORT_HEADER};
use crate::table;

/// Exit status of a failed run.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or arguments (exit 2).
    Usage(String),
    /// Unreadable or invalid input data (exit 3).
    Data(String),
    /// An estimator or sampler failed (exit 4).
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<weibcv_core::Error> for Failure {
    fn from(e: weibcv_core::Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Data(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "weibcv", version, about = "Weibull CV estimation from progressively type-I interval-censored data")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate parameters and intervals from a sample file.
    Fit(FitArgs),
    /// Draw one censored sample and write it as JSON.
    Simulate(SimulateArgs),
    /// Run a simulation study from a JSON config.
    Study(StudyArgs),
    /// Full analysis of the built-in plasma cell myeloma data.
    Demo(DemoArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Mle,
    Llse,
    Nllse,
    Bayes,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum IntervalArg {
    Aci,
    Maci,
    PbiL,
    PbiNl,
    Hpdi,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    #[value(name = "weighted_2_17")]
    Weighted,
    #[value(name = "paper_2_18")]
    Paper,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RoundingArg {
    Floor,
    Round,
    Stochastic,
}

#[derive(Args, Debug)]
struct EstimationArgs {
    /// Confidence or credible level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Base seed; every random component uses its own sub-stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bootstrap resamples for the percentile intervals.
    #[arg(long = "bootstrap", short = 'B')]
    bootstrap: Option<usize>,
    /// Total MCMC iterations.
    #[arg(long = "mcmc-iterations", short = 'M')]
    mcmc_iterations: Option<usize>,
    /// MCMC burn-in iterations.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Keep every `thin`-th state after burn-in.
    #[arg(long)]
    thin: Option<usize>,
    /// Diagonal proposal variances `VAR_KAPPA,VAR_TAU`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    sigma: Option<Vec<f64>>,
    /// Tune the proposal with pilot chains (starting from --sigma if given).
    #[arg(long)]
    tune: bool,
    /// `jeffreys` or `gamma:a1,a2,b1,b2`.
    #[arg(long)]
    prior: Option<String>,
    #[arg(long, value_enum, default_value = "weighted_2_17")]
    nllse_variant: VariantArg,
    /// Write the retained MCMC states to this CSV file.
    #[arg(long)]
    chain_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Sample file (JSON or CSV).
    input: PathBuf,
    #[arg(long, short = 'm', value_enum, value_delimiter = ',', default_value = "mle")]
    method: Vec<MethodArg>,
    #[arg(long, short = 'i', value_enum, value_delimiter = ',')]
    intervals: Vec<IntervalArg>,
    #[command(flatten)]
    common: EstimationArgs,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[command(flatten)]
    common: EstimationArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long)]
    tau: f64,
    /// Inspection times.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
    /// Withdrawal proportions; defaults to no early withdrawals.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "floor")]
    rounding: RoundingArg,
    /// Output file; stdout when absent.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// Study config (JSON).
    config: PathBuf,
    /// Directory for report.csv and report.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

/// Parse `args`, run the command, and print its output. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn execute(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Study(a) => cmd_study(a),
        Command::Demo(a) => cmd_demo(a),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_prior(s: &str) -> Result<Prior, Failure> {
    if s.eq_ignore_ascii_case("jeffreys") {
        return Ok(Prior::Jeffreys);
    }
    let rest = s
        .strip_prefix("gamma:")
        .ok_or_else(|| usage(format!("--prior must be `jeffreys` or `gamma:a1,a2,b1,b2`, got `{s}`")))?;
    let h: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("--prior: {e}")))?;
    match h[..] {
        [a1, a2, b1, b2] => Prior::gamma(a1, a2, b1, b2).map_err(|e| usage(format!("--prior: {e}"))),
        _ => Err(usage("--prior gamma needs four hyper-parameters")),
    }
}

fn build_options(
    common: &EstimationArgs,
    mut base: AnalysisOptions,
    methods: BTreeSet<Method>,
    intervals: BTreeSet<IntervalMethod>,
) -> Result<AnalysisOptions, Failure> {
    if !(common.level > 0.0 && common.level < 1.0) {
        return Err(usage(format!("--level must lie in (0, 1), got {}", common.level)));
    }
    base.methods = methods;
    base.intervals = intervals;
    base.level = common.level;
    base.seed = common.seed;
    if let Some(b) = common.bootstrap {
        if b == 0 {
            return Err(usage("--bootstrap must be at least 1"));
        }
        base.bootstrap = b;
    }
    let mcmc = McmcConfig::new(
        common.mcmc_iterations.unwrap_or(base.mcmc.iterations),
        common.burn_in.unwrap_or(base.mcmc.burn_in),
        common.thin.unwrap_or(base.mcmc.thin),
    )
    .map_err(|e| usage(e.to_string()))?;
    let needs_chain = base.methods.contains(&Method::Bayes) || base.intervals.contains(&IntervalMethod::Hpdi);
    if needs_chain && mcmc.retained() == 0 {
        return Err(usage("MCMC settings retain no states"));
    }
    if base.intervals.contains(&IntervalMethod::Hpdi) && (mcmc.retained() as f64) < 1.0 / (1.0 - base.level) {
        return Err(usage(format!("{} retained MCMC states are too few for an HPD interval", mcmc.retained())));
    }
    base.mcmc = mcmc;
    if let Some(p) = &common.prior {
        base.prior = parse_prior(p)?;
    }
    let fixed = match &common.sigma {
        Some(v) => Some(Proposal::diagonal(v[0], v[1]).map_err(|e| usage(format!("--sigma: {e}")))?),
        None => None,
    };
    base.proposal = match (common.tune, fixed) {
        (true, initial) => ProposalPolicy::Tuned {
            initial: initial.unwrap_or(Proposal::diagonal(1e-2, 1e-4).expect("positive diagonal")),
            pilot_iterations: 2000,
        },
        (false, Some(sigma)) => ProposalPolicy::Fixed { sigma },
        (false, None) => base.proposal,
    };
    base.nllse_variant = match common.nllse_variant {
        VariantArg::Weighted => NllseVariant::Weighted2_17,
        VariantArg::Paper => NllseVariant::Paper2_18,
    };
    Ok(base)
}

fn expand_methods(args: &[MethodArg]) -> BTreeSet<Method> {
    args.iter()
        .flat_map(|m| match m {
            MethodArg::Mle => vec![Method::Mle],
            MethodArg::Llse => vec![Method::Llse],
            MethodArg::Nllse => vec![Method::Nllse],
            MethodArg::Bayes => vec![Method::Bayes],
            MethodArg::All => vec![Method::Mle, Method::Llse, Method::Nllse, Method::Bayes],
        })
        .collect()
}

fn expand_intervals(args: &[IntervalArg]) -> BTreeSet<IntervalMethod> {
    use IntervalMethod::*;
    args.iter()
        .flat_map(|m| match m {
            IntervalArg::Aci => vec![Aci],
            IntervalArg::Maci => vec![Maci],
            IntervalArg::PbiL => vec![PbiL],
            IntervalArg::PbiNl => vec![PbiNl],
            IntervalArg::Hpdi => vec![Hpdi],
            IntervalArg::All => vec![Aci, Maci, PbiL, PbiNl, Hpdi],
        })
        .collect()
}

/// Options for `fit`: desk-scale MCMC with an information-scaled proposal.
fn fit_defaults() -> AnalysisOptions {
    AnalysisOptions {
        bootstrap: 2000,
        mcmc: McmcConfig { iterations: 11_000, burn_in: 1_000, thin: 1 },
        proposal: ProposalPolicy::default(),
        ..AnalysisOptions::reference(0)
    }
}

fn cmd_fit(a: FitArgs) -> Result<String, Failure> {
    let opts = build_options(&a.common, fit_defaults(), expand_methods(&a.method), expand_intervals(&a.intervals))?;
    let sample = read_sample(&a.input)?;
    let analysis = analyze(&sample, &opts)?;
    finish_analysis(&analysis, &a.common)
}

fn cmd_demo(a: DemoArgs) -> Result<String, Failure> {
    let base = AnalysisOptions::reference(a.common.seed);
    let (methods, intervals) = (base.methods.clone(), base.intervals.clone());
    let opts = build_options(&a.common, base, methods, intervals)?;
    let analysis = analyze(&plasma_cell_myeloma(), &opts)?;
    let mut out = String::new();
    if a.common.format == Format::Table {
        out.push_str("Plasma cell myeloma data: 112 patients, 9 inspections\n\n");
    }
    out.push_str(&finish_analysis(&analysis, &a.common)?);
    Ok(out)
}

fn finish_analysis(analysis: &Analysis, common: &EstimationArgs) -> Result<String, Failure> {
    if let (Some(path), Some(chain)) = (&common.chain_out, &analysis.chain) {
        write_text(path, &crate::io::chain_to_csv(chain))?;
    }
    Ok(render_analysis(analysis, common.format))
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

/// Render an analysis in the requested format.
pub fn render_analysis(analysis: &Analysis, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(analysis).expect("analysis serialises");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for p in &analysis.points {
                for (param, v) in p.estimates.iter() {
                    rows.push(vec![
                        "point".into(),
                        p.method.name().into(),
                        param.name().into(),
                        v.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ]);
                }
            }
            for (m, set) in &analysis.intervals {
                for (param, iv) in set.iter() {
                    rows.push(vec![
                        "interval".into(),
                        m.name().into(),
                        param.name().into(),
                        String::new(),
                        iv.lower.to_string(),
                        iv.upper.to_string(),
                        iv.width().to_string(),
                    ]);
                }
            }
            table::to_csv(&["kind", "method", "parameter", "estimate", "lower", "upper", "width"], &rows)
        }
        Format::Table => {
            let mut out = String::new();
            if !analysis.points.is_empty() {
                out.push_str("Point estimates\n");
                let rows: Vec<Vec<String>> = analysis
                    .points
                    .iter()
                    .map(|p| {
                        let mut r = vec![p.method.name().to_string()];
                        r.extend(Parameter::ALL.iter().map(|&q| num(*p.estimates.get(q))));
                        r
                    })
                    .collect();
                out.push_str(&table::to_text(&["method", "kappa", "tau", "cv_p", "cv_k"], &rows));
            }
            if !analysis.intervals.is_empty() {
                let _ = writeln!(out, "\n{}% intervals", analysis.level * 100.0);
                let rows: Vec<Vec<String>> = analysis
                    .intervals
                    .iter()
                    .flat_map(|(m, set)| {
                        set.iter().map(move |(p, iv)| {
                            vec![
                                m.name().to_string(),
                                p.name().to_string(),
                                num(iv.lower),
                                num(iv.upper),
                                num(iv.width()),
                            ]
                        })
                    })
                    .collect();
                out.push_str(&table::to_text(&["method", "parameter", "lower", "upper", "width"], &rows));
            }
            if let Some(m) = &analysis.mcmc {
                let _ = writeln!(
                    out,
                    "\nMCMC: acceptance rate {:.3}, {} retained states, proposal diag({:e}, {:e})",
                    m.acceptance_rate, m.retained, m.sigma[0][0], m.sigma[1][1]
                );
            }
            out
        }
    }
}

fn cmd_simulate(a: SimulateArgs) -> Result<String, Failure> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let params = WeibullParams::new(a.kappa, a.tau).map_err(|e| usage(e.to_string()))?;
    let scheme = match a.p {
        Some(p) => CensoringScheme::new(a.t, p)?,
        None => CensoringScheme::no_early_withdrawal(a.t)?,
    };
    let rounding = match a.rounding {
        RoundingArg::Floor => WithdrawalRounding::Floor,
        RoundingArg::Round => WithdrawalRounding::Round,
        RoundingArg::Stochastic => WithdrawalRounding::Stochastic,
    };
    let mut rng = stream_rng(a.seed, streams::SIMULATE);
    let sample = generate_sample_with(&params, &scheme, a.n, rounding, &mut rng);
    let json = sample_to_json(&sample);
    match a.out {
        Some(path) => {
            write_text(&path, &json)?;
            Ok(String::new())
        }
        None => Ok(json),
    }
}

fn cmd_study(a: StudyArgs) -> Result<String, Failure> {
    if let Some(t) = a.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let text = std::fs::read_to_string(&a.config).map_err(|e| Failure::Data(format!("{}: {e}", a.config.display())))?;
    let cells = parse_study(&text).map_err(|e| Failure::Data(format!("{}: {e}", a.config.display())))?;
    let reports = run_cells(&cells)?;
    let csv = report_csv(&reports);
    let mut json = serde_json::to_string_pretty(&reports).expect("report serialises");
    json.push('\n');
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))?;
        write_text(&dir.join("report.csv"), &csv)?;
        write_text(&dir.join("report.json"), &json)?;
    }
    Ok(match a.format {
        Format::Csv => csv,
        Format::Json => json,
        Format::Table => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(
                    out,
                    "{} n={} m={}: {} replications, {} rejected samples",
                    r.scheme_name, r.report.n, r.report.m, r.report.replications, r.report.rejected_samples
                );
            }
            out.push('\n');
            let keep = [0usize, 1, 3, 4, 5, 6, 8, 9, 12];
            let header: Vec<&str> = keep.iter().map(|&i| REPORT_HEADER[i]).collect();
            let rows: Vec<Vec<String>> =
                report_rows(&reports).into_iter().map(|r| keep.iter().map(|&i| shorten(&r[i])).collect()).collect();
            out.push_str(&table::to_text(&header, &rows));
            out
        }
    })
}

fn shorten(cell: &str) -> String {
    match cell.parse::<f64>() {
        Ok(v) if cell.contains('.') => format!("{v:.5}"),
        _ => cell.to_string(),
    }
}
