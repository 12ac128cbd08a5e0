//! Replicated simulation studies: draw samples from a known Weibull,
//! run the estimators and score them by MSE, coverage and width.
//!
//! Replication `r` draws everything from its own stream
//! `REPLICATION_BASE + r` of the study seed, so replications can run in
//! any order or in parallel; [`aggregate`] sorts outcomes by index before
//! summing, which makes the report bit-identical for a given config.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the build graph
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bayes::{bayes_estimate, chain_hpdi, rwmh, tune_sigma, McmcConfig, Prior, Proposal};
use crate::censoring::{generate_sample_with, CensoredSample, CensoringScheme, WithdrawalRounding};
use crate::distribution::WeibullParams;
use crate::error::{Error, Result};
use crate::estimate::{check_level, ByParameter, EstimateSet, IntervalEstimate, IntervalSet, Parameter};
use crate::least_squares::{llse, nllse, pbi, LsEstimator, NllseVariant};
use crate::mle::{asymptotic_intervals, fit_mle};
use crate::rng::{stream_rng, streams, StreamRng};

/// Point estimators compared in a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mle,
    Llse,
    Nllse,
    Bayes,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mle => "mle",
            Method::Llse => "llse",
            Method::Nllse => "nllse",
            Method::Bayes => "bayes",
        }
    }
}

/// Interval procedures compared in a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    Aci,
    Maci,
    PbiL,
    PbiNl,
    Hpdi,
}

impl IntervalMethod {
    pub fn name(self) -> &'static str {
        match self {
            IntervalMethod::Aci => "aci",
            IntervalMethod::Maci => "maci",
            IntervalMethod::PbiL => "pbi_l",
            IntervalMethod::PbiNl => "pbi_nl",
            IntervalMethod::Hpdi => "hpdi",
        }
    }
}

/// How each replication picks its random-walk proposal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProposalPolicy {
    /// The same covariance for every replication.
    Fixed { sigma: Proposal },
    /// `scale` times the inverse observed information at the MLE.
    ScaledInformation { scale: f64 },
    /// Pilot-tuned per replication, starting from `initial`.
    Tuned { initial: Proposal, pilot_iterations: usize },
}

impl Default for ProposalPolicy {
    fn default() -> Self {
        // 2.38^2 / d for a d = 2 random walk
        ProposalPolicy::ScaledInformation { scale: 2.38 * 2.38 / 2.0 }
    }
}

fn default_replications() -> usize {
    300
}
fn default_bootstrap() -> usize {
    500
}
fn default_mcmc() -> usize {
    10_000
}
fn default_burn_in() -> usize {
    1_000
}
fn default_thin() -> usize {
    1
}
fn default_level() -> f64 {
    0.95
}
fn default_prior() -> Prior {
    Prior::Jeffreys
}

/// One cell of a simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub params_truth: WeibullParams,
    pub scheme: CensoringScheme,
    pub n: u64,
    #[serde(rename = "L", default = "default_replications")]
    pub replications: usize,
    #[serde(rename = "B", default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(rename = "M", default = "default_mcmc")]
    pub mcmc_iterations: usize,
    #[serde(rename = "M_b", default = "default_burn_in")]
    pub mcmc_burn_in: usize,
    #[serde(default = "default_thin")]
    pub thin: usize,
    #[serde(default = "default_prior")]
    pub prior: Prior,
    #[serde(default = "default_level")]
    pub level: f64,
    pub methods: BTreeSet<Method>,
    #[serde(default)]
    pub intervals: BTreeSet<IntervalMethod>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub nllse_variant: NllseVariant,
    #[serde(default)]
    pub rounding: WithdrawalRounding,
    #[serde(default)]
    pub proposal: ProposalPolicy,
}

/// Draws that may be discarded as degenerate before a replication gives up.
const MAX_DEGENERATE_DRAWS: usize = 10_000;
/// Draws a replication may spend on samples where an estimator failed.
const MAX_FAILED_DRAWS: usize = 10;
/// Failure share above which a cell is flagged.
pub const UNRELIABLE_FAILURE_RATE: f64 = 0.2;

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |msg: alloc::string::String| Err(Error::Domain(msg));
        if self.replications == 0 {
            return cfg_err("L must be at least 1".into());
        }
        if self.n == 0 {
            return cfg_err("n must be at least 1".into());
        }
        check_level(self.level)?;
        if self.methods.is_empty() && self.intervals.is_empty() {
            return cfg_err("no methods or intervals selected".into());
        }
        let uses_pbi =
            self.intervals.contains(&IntervalMethod::PbiL) || self.intervals.contains(&IntervalMethod::PbiNl);
        if uses_pbi && self.bootstrap == 0 {
            return cfg_err("B must be at least 1 when a bootstrap interval is requested".into());
        }
        if self.uses_mcmc() {
            let mc = McmcConfig::new(self.mcmc_iterations, self.mcmc_burn_in, self.thin)?;
            if mc.retained() == 0 {
                return cfg_err("the MCMC settings retain no states".into());
            }
            if self.intervals.contains(&IntervalMethod::Hpdi) && (mc.retained() as f64) < 1.0 / (1.0 - self.level) {
                return cfg_err(format!("{} retained MCMC states are too few for an HPD interval", mc.retained()));
            }
            self.prior.validated()?;
            match self.proposal {
                ProposalPolicy::ScaledInformation { scale } if !(scale > 0.0 && scale.is_finite()) => {
                    return cfg_err(format!("proposal scale must be positive, got {scale}"));
                }
                ProposalPolicy::Tuned { pilot_iterations, .. } if pilot_iterations < 1000 => {
                    return cfg_err("pilot chains need at least 1000 iterations".into());
                }
                _ => {}
            }
        }
        EstimateSet::from_params(&self.params_truth)?;
        Ok(())
    }

    fn uses_mcmc(&self) -> bool {
        self.methods.contains(&Method::Bayes) || self.intervals.contains(&IntervalMethod::Hpdi)
    }

    fn needs_mle(&self) -> bool {
        self.methods.contains(&Method::Mle)
            || self.intervals.contains(&IntervalMethod::Aci)
            || self.intervals.contains(&IntervalMethod::Maci)
            || (self.uses_mcmc() && matches!(self.proposal, ProposalPolicy::ScaledInformation { .. }))
    }

    fn mcmc_config(&self) -> Result<McmcConfig> {
        McmcConfig::new(self.mcmc_iterations, self.mcmc_burn_in, self.thin)
    }
}

/// Everything one replication contributes to the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub index: usize,
    /// Degenerate samples discarded before the one used.
    pub rejected_samples: usize,
    /// Methods or intervals that failed on at least one draw of this
    /// replication (before any redraw).
    pub failed: Vec<Unit>,
    pub points: Vec<(Method, EstimateSet)>,
    pub intervals: Vec<(IntervalMethod, IntervalSet)>,
    pub acceptance_rate: Option<f64>,
}

/// A point or interval procedure, for failure accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum Unit {
    Point(Method),
    Interval(IntervalMethod),
}

#[derive(Default)]
struct Attempt {
    points: Vec<(Method, EstimateSet)>,
    intervals: Vec<(IntervalMethod, IntervalSet)>,
    failed: BTreeSet<Unit>,
    acceptance_rate: Option<f64>,
}

fn is_degenerate(sample: &CensoredSample) -> bool {
    sample.terminates_early() || sample.total_failures() == 0
}

/// Draw a usable sample from `rng`, counting discarded draws.
fn draw_sample(config: &StudyConfig, rng: &mut StreamRng, rejected: &mut usize) -> Result<CensoredSample> {
    for _ in 0..MAX_DEGENERATE_DRAWS {
        let s = generate_sample_with(&config.params_truth, &config.scheme, config.n, config.rounding, rng);
        if !is_degenerate(&s) {
            return Ok(s);
        }
        *rejected += 1;
    }
    Err(Error::NoConvergence("every simulated sample terminated early or had no failures"))
}

fn run_attempt(config: &StudyConfig, sample: &CensoredSample, rng: &mut StreamRng) -> Result<Attempt> {
    let mut out = Attempt::default();
    let fail = |out: &mut Attempt, u: Unit| {
        out.failed.insert(u);
    };

    let mle = if config.needs_mle() { fit_mle(sample).ok().filter(|f| f.converged) } else { None };
    if config.methods.contains(&Method::Mle) {
        match mle.as_ref().map(|f| EstimateSet::from_params(&f.params)) {
            Some(Ok(e)) => out.points.push((Method::Mle, e)),
            _ => fail(&mut out, Unit::Point(Method::Mle)),
        }
    }
    let wants_asym: Vec<IntervalMethod> =
        [IntervalMethod::Aci, IntervalMethod::Maci].into_iter().filter(|m| config.intervals.contains(m)).collect();
    let covariance = if !wants_asym.is_empty() || config.uses_mcmc() {
        mle.as_ref().map(|f| asymptotic_intervals(&f.params, sample, config.level))
    } else {
        None
    };
    for m in wants_asym {
        match &covariance {
            Some(Ok(iv)) => out.intervals.push((m, if m == IntervalMethod::Aci { iv.aci } else { iv.maci })),
            _ => fail(&mut out, Unit::Interval(m)),
        }
    }

    if config.methods.contains(&Method::Llse) {
        match llse(sample).and_then(|f| EstimateSet::from_params(&f.params)) {
            Ok(e) => out.points.push((Method::Llse, e)),
            Err(_) => fail(&mut out, Unit::Point(Method::Llse)),
        }
    }
    if config.methods.contains(&Method::Nllse) {
        match nllse(sample, config.nllse_variant)
            .ok()
            .filter(|f| f.converged)
            .map(|f| EstimateSet::from_params(&f.params))
        {
            Some(Ok(e)) => out.points.push((Method::Nllse, e)),
            _ => fail(&mut out, Unit::Point(Method::Nllse)),
        }
    }
    for (m, est) in
        [(IntervalMethod::PbiL, LsEstimator::Llse), (IntervalMethod::PbiNl, LsEstimator::Nllse(config.nllse_variant))]
    {
        if config.intervals.contains(&m) {
            match pbi(sample, est, config.bootstrap, config.level, rng) {
                Ok(r) => out.intervals.push((m, r.intervals)),
                Err(_) => fail(&mut out, Unit::Interval(m)),
            }
        }
    }

    if config.uses_mcmc() {
        let proposal = match config.proposal {
            ProposalPolicy::Fixed { sigma } => Ok(sigma),
            ProposalPolicy::ScaledInformation { scale } => match &covariance {
                Some(Ok(iv)) => Proposal::new(iv.covariance.0).and_then(|p| p.scaled(scale)),
                _ => Err(Error::NoConvergence("no MLE covariance for the proposal")),
            },
            ProposalPolicy::Tuned { initial, pilot_iterations } => {
                tune_sigma(sample, &config.prior, pilot_iterations, &initial, rng).map(|t| t.proposal)
            }
        };
        let chain = proposal.and_then(|p| rwmh(sample, &config.prior, &config.mcmc_config()?, &p, None, rng));
        let chain = chain.ok();
        out.acceptance_rate = chain.as_ref().map(|c| c.acceptance_rate);
        if config.methods.contains(&Method::Bayes) {
            match chain.as_ref().map(bayes_estimate) {
                Some(Ok(e)) if e.iter().all(|(_, v)| v.is_finite()) => out.points.push((Method::Bayes, e)),
                _ => fail(&mut out, Unit::Point(Method::Bayes)),
            }
        }
        if config.intervals.contains(&IntervalMethod::Hpdi) {
            match chain.as_ref().map(|c| chain_hpdi(c, config.level)) {
                Some(Ok(iv)) => out.intervals.push((IntervalMethod::Hpdi, iv)),
                _ => fail(&mut out, Unit::Interval(IntervalMethod::Hpdi)),
            }
        }
    }
    Ok(out)
}

/// Run replication `index` of a study.
///
/// Samples that terminate before the last inspection or contain no
/// failures are redrawn. A sample on which any selected procedure fails
/// is also redrawn, up to 10 draws; after that the procedures that still
/// fail are left out of this replication.
pub fn run_replication(config: &StudyConfig, index: usize) -> Result<ReplicationOutcome> {
    let mut rng = stream_rng(config.seed, streams::REPLICATION_BASE + index as u64);
    let mut rejected = 0;
    let mut failed = BTreeSet::new();
    let mut last = None;
    for _ in 0..MAX_FAILED_DRAWS {
        let sample = draw_sample(config, &mut rng, &mut rejected)?;
        let attempt = run_attempt(config, &sample, &mut rng)?;
        let clean = attempt.failed.is_empty();
        failed.extend(attempt.failed.iter().copied());
        last = Some(attempt);
        if clean {
            break;
        }
    }
    let attempt = last.unwrap_or_default();
    Ok(ReplicationOutcome {
        index,
        rejected_samples: rejected,
        failed: failed.into_iter().collect(),
        points: attempt.points,
        intervals: attempt.intervals,
        acceptance_rate: attempt.acceptance_rate,
    })
}

/// `mean((v - truth)^2)`.
pub fn mse(values: &[f64], truth: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("values"));
    }
    Ok(values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / values.len() as f64)
}

/// Share of intervals containing `truth`.
pub fn coverage(intervals: &[IntervalEstimate], truth: f64) -> Result<f64> {
    if intervals.is_empty() {
        return Err(Error::Empty("intervals"));
    }
    Ok(intervals.iter().filter(|iv| iv.contains(truth)).count() as f64 / intervals.len() as f64)
}

pub fn avg_width(intervals: &[IntervalEstimate]) -> Result<f64> {
    if intervals.is_empty() {
        return Err(Error::Empty("intervals"));
    }
    Ok(intervals.iter().map(IntervalEstimate::width).sum::<f64>() / intervals.len() as f64)
}

/// MSE of one method for one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub method: Method,
    pub parameter: Parameter,
    /// `None` when the method produced no estimate in any replication.
    pub mse: Option<f64>,
    pub mean: Option<f64>,
    /// Replications contributing an estimate.
    pub used: usize,
    /// Share of replications in which the method failed at least once.
    pub failure_rate: f64,
    pub unreliable: bool,
}

/// Coverage and width of one interval procedure for one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub method: IntervalMethod,
    pub parameter: Parameter,
    pub coverage: Option<f64>,
    pub avg_width: Option<f64>,
    pub used: usize,
    pub failure_rate: f64,
    pub unreliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub params_truth: WeibullParams,
    pub n: u64,
    pub m: usize,
    pub replications: usize,
    pub rejected_samples: usize,
    pub points: Vec<PointRow>,
    pub intervals: Vec<IntervalRow>,
    /// Mean MCMC acceptance rate over replications that ran a chain.
    pub mean_acceptance_rate: Option<f64>,
}

impl StudyReport {
    pub fn point(&self, method: Method, parameter: Parameter) -> Option<&PointRow> {
        self.points.iter().find(|r| r.method == method && r.parameter == parameter)
    }

    pub fn interval(&self, method: IntervalMethod, parameter: Parameter) -> Option<&IntervalRow> {
        self.intervals.iter().find(|r| r.method == method && r.parameter == parameter)
    }
}

/// Combine replication outcomes into a report. Outcomes may arrive in any
/// order; they are summed in index order.
pub fn aggregate(config: &StudyConfig, outcomes: &[ReplicationOutcome]) -> Result<StudyReport> {
    if outcomes.is_empty() {
        return Err(Error::Empty("replication outcomes"));
    }
    let mut sorted: Vec<&ReplicationOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| o.index);
    let total = sorted.len();
    let truth = EstimateSet::from_params(&config.params_truth)?;
    let failure_rate = |u: Unit| sorted.iter().filter(|o| o.failed.contains(&u)).count() as f64 / total as f64;

    let mut points = Vec::new();
    for &method in &config.methods {
        let rate = failure_rate(Unit::Point(method));
        let draws: Vec<&EstimateSet> =
            sorted.iter().filter_map(|o| o.points.iter().find(|(m, _)| *m == method).map(|(_, e)| e)).collect();
        for p in Parameter::ALL {
            let values: Vec<f64> = draws.iter().map(|e| *e.get(p)).collect();
            let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
            points.push(PointRow {
                method,
                parameter: p,
                mse: mse(&values, *truth.get(p)).ok(),
                mean,
                used: values.len(),
                failure_rate: rate,
                unreliable: rate > UNRELIABLE_FAILURE_RATE || values.is_empty(),
            });
        }
    }

    let mut intervals = Vec::new();
    for &method in &config.intervals {
        let rate = failure_rate(Unit::Interval(method));
        let sets: Vec<&IntervalSet> =
            sorted.iter().filter_map(|o| o.intervals.iter().find(|(m, _)| *m == method).map(|(_, s)| s)).collect();
        for p in Parameter::ALL {
            let ivs: Vec<IntervalEstimate> = sets.iter().map(|s| *s.get(p)).collect();
            intervals.push(IntervalRow {
                method,
                parameter: p,
                coverage: coverage(&ivs, *truth.get(p)).ok(),
                avg_width: avg_width(&ivs).ok(),
                used: ivs.len(),
                failure_rate: rate,
                unreliable: rate > UNRELIABLE_FAILURE_RATE || ivs.is_empty(),
            });
        }
    }

    let rates: Vec<f64> = sorted.iter().filter_map(|o| o.acceptance_rate).collect();
    Ok(StudyReport {
        params_truth: config.params_truth,
        n: config.n,
        m: config.scheme.len(),
        replications: total,
        rejected_samples: sorted.iter().map(|o| o.rejected_samples).sum(),
        points,
        intervals,
        mean_acceptance_rate: (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64),
    })
}

/// Run all `L` replications in order and aggregate them.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let outcomes = (0..config.replications).map(|r| run_replication(config, r)).collect::<Result<Vec<_>>>()?;
    aggregate(config, &outcomes)
}

/// Truth values as a `ByParameter`, for reports.
pub fn truth_values(config: &StudyConfig) -> Result<ByParameter<f64>> {
    EstimateSet::from_params(&config.params_truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn config(methods: &[Method], intervals: &[IntervalMethod]) -> StudyConfig {
        StudyConfig {
            params_truth: WeibullParams::new(1.25, 0.525).unwrap(),
            scheme: CensoringScheme::no_early_withdrawal(vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
            n: 50,
            replications: 4,
            bootstrap: 50,
            mcmc_iterations: 2_000,
            mcmc_burn_in: 200,
            thin: 1,
            prior: Prior::gamma(5.0, 4.0, 1.0, 2.0).unwrap(),
            level: 0.95,
            methods: methods.iter().copied().collect(),
            intervals: intervals.iter().copied().collect(),
            seed: 9,
            nllse_variant: NllseVariant::default(),
            rounding: WithdrawalRounding::Floor,
            proposal: ProposalPolicy::default(),
        }
    }

    #[test]
    fn metric_definitions() {
        assert_eq!(mse(&[2.0, 2.0], 2.0).unwrap(), 0.0);
        let iv = IntervalEstimate::new(1.0, 3.0, 0.95).unwrap();
        assert_eq!(coverage(&[iv], 2.0).unwrap(), 1.0);
        assert_eq!(avg_width(&[iv]).unwrap(), 2.0);
        let off = IntervalEstimate::new(2.0 + 1e-9, 3.0, 0.95).unwrap();
        assert_eq!(coverage(&[off], 2.0).unwrap(), 0.0);
        assert!(mse(&[], 1.0).is_err() && coverage(&[], 1.0).is_err() && avg_width(&[]).is_err());
    }

    #[test]
    fn pinned_outcomes_give_perfect_scores() {
        let cfg = config(&[Method::Mle], &[IntervalMethod::Maci]);
        let truth = truth_values(&cfg).unwrap();
        let around = truth.map(|_, v| IntervalEstimate::new(v - 1.0, v + 1.0, 0.95).unwrap());
        let outcomes: Vec<_> = (0..3)
            .map(|index| ReplicationOutcome {
                index,
                rejected_samples: 1,
                failed: vec![],
                points: vec![(Method::Mle, truth)],
                intervals: vec![(IntervalMethod::Maci, around)],
                acceptance_rate: None,
            })
            .collect();
        let r = aggregate(&cfg, &outcomes).unwrap();
        assert_eq!(r.rejected_samples, 3);
        for p in Parameter::ALL {
            assert_eq!(r.point(Method::Mle, p).unwrap().mse, Some(0.0));
            let row = r.interval(IntervalMethod::Maci, p).unwrap();
            assert_eq!(row.coverage, Some(1.0));
            assert_eq!(row.avg_width, Some(2.0));
        }
    }

    #[test]
    fn failure_rate_flags_unreliable() {
        let cfg = config(&[Method::Llse], &[]);
        let truth = truth_values(&cfg).unwrap();
        let outcomes: Vec<_> = (0..5)
            .map(|index| ReplicationOutcome {
                index,
                rejected_samples: 0,
                failed: if index < 2 { vec![Unit::Point(Method::Llse)] } else { vec![] },
                points: vec![(Method::Llse, truth)],
                intervals: vec![],
                acceptance_rate: None,
            })
            .collect();
        let row = aggregate(&cfg, &outcomes).unwrap().points[0].clone();
        assert!((row.failure_rate - 0.4).abs() < 1e-15);
        assert!(row.unreliable);
    }

    #[test]
    fn study_is_deterministic_and_order_free() {
        let cfg = config(
            &[Method::Mle, Method::Llse, Method::Nllse, Method::Bayes],
            &[IntervalMethod::Aci, IntervalMethod::Maci, IntervalMethod::PbiL, IntervalMethod::Hpdi],
        );
        let a = run_study(&cfg).unwrap();
        let b = run_study(&cfg).unwrap();
        assert_eq!(a, b);
        let mut outcomes: Vec<_> = (0..cfg.replications).map(|r| run_replication(&cfg, r).unwrap()).collect();
        outcomes.reverse();
        assert_eq!(aggregate(&cfg, &outcomes).unwrap(), a);
        assert_eq!(a.replications, cfg.replications);
        for row in &a.intervals {
            let c = row.coverage.unwrap();
            assert!((0.0..=1.0).contains(&c) && row.avg_width.unwrap() >= 0.0);
        }
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = config(&[Method::Mle], &[]);
        cfg.replications = 0;
        assert!(run_study(&cfg).is_err());
        let mut cfg = config(&[Method::Bayes], &[]);
        cfg.mcmc_burn_in = cfg.mcmc_iterations + 1;
        assert!(run_study(&cfg).is_err());
        let cfg = config(&[], &[]);
        assert!(run_study(&cfg).is_err());
    }
}
