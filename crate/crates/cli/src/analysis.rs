//! Full analysis of one sample: point estimates and intervals from every
//! requested method, with each random component on its own named stream.

use std::collections::BTreeSet;

use serde::Serialize;
use weibcv_core::bayes::{bayes_estimate, chain_hpdi, rwmh, tune_sigma, McmcChain, McmcConfig, Prior, Proposal};
use weibcv_core::least_squares::{llse, nllse, pbi, LsEstimator, NllseVariant};
use weibcv_core::mle::{asymptotic_intervals, fit_mle, AsymptoticIntervals, FitResult};
use weibcv_core::montecarlo::{IntervalMethod, Method, ProposalPolicy};
use weibcv_core::rng::{stream_rng, streams};
use weibcv_core::{CensoredSample, Error, EstimateSet, IntervalSet, Result};

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub methods: BTreeSet<Method>,
    pub intervals: BTreeSet<IntervalMethod>,
    pub level: f64,
    pub seed: u64,
    pub bootstrap: usize,
    pub mcmc: McmcConfig,
    pub prior: Prior,
    pub proposal: ProposalPolicy,
    pub nllse_variant: NllseVariant,
}

impl AnalysisOptions {
    /// The real-data settings: Jeffreys prior, proposal `diag(5e-5)`,
    /// 4,500 states kept from every 100th iteration after 5,000 burn-in,
    /// and 2,000 bootstrap resamples.
    pub fn reference(seed: u64) -> Self {
        Self {
            methods: [Method::Mle, Method::Llse, Method::Nllse, Method::Bayes].into(),
            intervals: [
                IntervalMethod::Aci,
                IntervalMethod::Maci,
                IntervalMethod::PbiL,
                IntervalMethod::PbiNl,
                IntervalMethod::Hpdi,
            ]
            .into(),
            level: 0.95,
            seed,
            bootstrap: 2000,
            mcmc: McmcConfig { iterations: 5_000 + 4_500 * 100, burn_in: 5_000, thin: 100 },
            prior: Prior::Jeffreys,
            proposal: ProposalPolicy::Fixed { sigma: Proposal::diagonal(5e-5, 5e-5).expect("positive diagonal") },
            nllse_variant: NllseVariant::default(),
        }
    }

    fn uses_mcmc(&self) -> bool {
        self.methods.contains(&Method::Bayes) || self.intervals.contains(&IntervalMethod::Hpdi)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointEstimate {
    pub method: Method,
    pub estimates: EstimateSet,
    /// Iterative fit diagnostics; absent for the posterior mean.
    pub fit: Option<FitResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct McmcSummary {
    pub acceptance_rate: f64,
    pub retained: usize,
    pub sigma: [[f64; 2]; 2],
    /// Pilot rounds used when the proposal was tuned.
    pub tuning_rounds: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub level: f64,
    pub points: Vec<PointEstimate>,
    pub intervals: Vec<(IntervalMethod, IntervalSet)>,
    pub mcmc: Option<McmcSummary>,
    #[serde(skip)]
    pub chain: Option<McmcChain>,
}

impl Analysis {
    pub fn point(&self, method: Method) -> Option<&EstimateSet> {
        self.points.iter().find(|p| p.method == method).map(|p| &p.estimates)
    }

    pub fn interval(&self, method: IntervalMethod) -> Option<&IntervalSet> {
        self.intervals.iter().find(|(m, _)| *m == method).map(|(_, s)| s)
    }
}

fn require_converged(fit: FitResult, what: &'static str) -> Result<FitResult> {
    if fit.converged {
        Ok(fit)
    } else {
        Err(Error::NoConvergence(what))
    }
}

/// Run every requested method on `sample`. Any failure aborts.
pub fn analyze(sample: &CensoredSample, opts: &AnalysisOptions) -> Result<Analysis> {
    let mut points = Vec::new();
    let mut intervals = Vec::new();

    let wants_asym = opts.intervals.contains(&IntervalMethod::Aci) || opts.intervals.contains(&IntervalMethod::Maci);
    let scaled_proposal = matches!(opts.proposal, ProposalPolicy::ScaledInformation { .. });
    let needs_mle = opts.methods.contains(&Method::Mle) || wants_asym || (opts.uses_mcmc() && scaled_proposal);

    let mut asym: Option<AsymptoticIntervals> = None;
    if needs_mle {
        let fit = require_converged(fit_mle(sample)?, "maximum likelihood")?;
        if opts.methods.contains(&Method::Mle) {
            points.push(PointEstimate {
                method: Method::Mle,
                estimates: EstimateSet::from_params(&fit.params)?,
                fit: Some(fit),
            });
        }
        if wants_asym || scaled_proposal {
            let iv = asymptotic_intervals(&fit.params, sample, opts.level)?;
            if opts.intervals.contains(&IntervalMethod::Aci) {
                intervals.push((IntervalMethod::Aci, iv.aci));
            }
            if opts.intervals.contains(&IntervalMethod::Maci) {
                intervals.push((IntervalMethod::Maci, iv.maci));
            }
            asym = Some(iv);
        }
    }
    if opts.methods.contains(&Method::Llse) {
        let fit = llse(sample)?;
        points.push(PointEstimate {
            method: Method::Llse,
            estimates: EstimateSet::from_params(&fit.params)?,
            fit: Some(fit),
        });
    }
    if opts.methods.contains(&Method::Nllse) {
        let fit = require_converged(nllse(sample, opts.nllse_variant)?, "nonlinear least squares")?;
        points.push(PointEstimate {
            method: Method::Nllse,
            estimates: EstimateSet::from_params(&fit.params)?,
            fit: Some(fit),
        });
    }
    for (m, est, stream) in [
        (IntervalMethod::PbiL, LsEstimator::Llse, streams::BOOTSTRAP_LINEAR),
        (IntervalMethod::PbiNl, LsEstimator::Nllse(opts.nllse_variant), streams::BOOTSTRAP_NONLINEAR),
    ] {
        if opts.intervals.contains(&m) {
            let mut rng = stream_rng(opts.seed, stream);
            intervals.push((m, pbi(sample, est, opts.bootstrap, opts.level, &mut rng)?.intervals));
        }
    }

    let mut mcmc = None;
    let mut chain = None;
    if opts.uses_mcmc() {
        let (proposal, tuning_rounds) = match opts.proposal {
            ProposalPolicy::Fixed { sigma } => (sigma, None),
            ProposalPolicy::ScaledInformation { scale } => {
                let cov = asym.as_ref().expect("computed above").covariance;
                (Proposal::new(cov.0)?.scaled(scale)?, None)
            }
            ProposalPolicy::Tuned { initial, pilot_iterations } => {
                let mut rng = stream_rng(opts.seed, streams::TUNING);
                let t = tune_sigma(sample, &opts.prior, pilot_iterations, &initial, &mut rng)?;
                (t.proposal, Some(t.rounds))
            }
        };
        let mut rng = stream_rng(opts.seed, streams::MCMC);
        let c = rwmh(sample, &opts.prior, &opts.mcmc, &proposal, None, &mut rng)?;
        if opts.methods.contains(&Method::Bayes) {
            points.push(PointEstimate { method: Method::Bayes, estimates: bayes_estimate(&c)?, fit: None });
        }
        if opts.intervals.contains(&IntervalMethod::Hpdi) {
            intervals.push((IntervalMethod::Hpdi, chain_hpdi(&c, opts.level)?));
        }
        mcmc = Some(McmcSummary {
            acceptance_rate: c.acceptance_rate,
            retained: c.len(),
            sigma: proposal.sigma(),
            tuning_rounds,
        });
        chain = Some(c);
    }
    points.sort_by_key(|p| p.method);
    intervals.sort_by_key(|(m, _)| *m);
    Ok(Analysis { level: opts.level, points, intervals, mcmc, chain })
}
