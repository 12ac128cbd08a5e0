//! Bayesian estimation with gamma or Jeffreys priors, sampled by a
//! random-walk Metropolis-Hastings chain.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the build graph
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::censoring::{midpoint_initial_estimates, CensoredSample};
use crate::distribution::{cv_pair_unchecked, WeibullParams};
use crate::error::{Error, Result};
use crate::estimate::{check_level, ByParameter, EstimateSet, IntervalEstimate, IntervalSet, Parameter};
use crate::mle::log_likelihood;

/// Independent priors on the shape and rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Prior {
    /// `pi(kappa, tau) ∝ 1 / (kappa tau)`, the gamma prior with all
    /// hyper-parameters zero.
    Jeffreys,
    /// `kappa ~ Gamma(a1, a2)`, `tau ~ Gamma(b1, b2)` (shape, rate).
    Gamma { a1: f64, a2: f64, b1: f64, b2: f64 },
}

impl Prior {
    pub fn gamma(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<Self> {
        Prior::Gamma { a1, a2, b1, b2 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if let Prior::Gamma { a1, a2, b1, b2 } = self {
            if [a1, a2, b1, b2].iter().any(|h| !(*h >= 0.0 && h.is_finite())) {
                return Err(Error::Domain(format!(
                    "gamma hyper-parameters must be finite and non-negative, got ({a1}, {a2}, {b1}, {b2})"
                )));
            }
        }
        Ok(self)
    }

    /// Prior means `(a1 / a2, b1 / b2)`; `None` for Jeffreys or a zero rate.
    pub fn mean(&self) -> Option<(f64, f64)> {
        match *self {
            Prior::Gamma { a1, a2, b1, b2 } if a2 > 0.0 && b2 > 0.0 => Some((a1 / a2, b1 / b2)),
            _ => None,
        }
    }

    /// Log prior density up to an additive constant.
    pub fn log_density(&self, kappa: f64, tau: f64) -> f64 {
        if !(kappa > 0.0 && tau > 0.0) {
            return f64::NEG_INFINITY;
        }
        match *self {
            Prior::Jeffreys => -kappa.ln() - tau.ln(),
            Prior::Gamma { a1, a2, b1, b2 } => (a1 - 1.0) * kappa.ln() + (b1 - 1.0) * tau.ln() - a2 * kappa - b2 * tau,
        }
    }
}

/// Log posterior up to an additive constant; `-inf` where undefined.
pub fn log_posterior(params: &WeibullParams, sample: &CensoredSample, prior: &Prior) -> f64 {
    let lp = prior.log_density(params.kappa(), params.tau());
    if lp == f64::NEG_INFINITY {
        return lp;
    }
    lp + log_likelihood(params, sample)
}

/// [`log_posterior`] at raw coordinates; `-inf` outside `kappa, tau > 0`.
pub fn log_posterior_at(kappa: f64, tau: f64, sample: &CensoredSample, prior: &Prior) -> f64 {
    match WeibullParams::new(kappa, tau) {
        Ok(p) => log_posterior(&p, sample, prior),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Gaussian random-walk proposal covariance with its Cholesky factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Proposal {
    sigma: [[f64; 2]; 2],
    chol: [[f64; 2]; 2],
}

impl Proposal {
    /// Fails unless `sigma` is symmetric positive definite.
    pub fn new(sigma: [[f64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = sigma;
        if !sigma.iter().flatten().all(|v| v.is_finite()) || (b - c).abs() > 1e-12 * (b.abs() + c.abs()) {
            return Err(Error::Domain(format!("proposal covariance must be finite and symmetric: {sigma:?}")));
        }
        if !(a > 0.0) {
            return Err(Error::Domain(format!("proposal covariance is not positive definite: {sigma:?}")));
        }
        let l00 = a.sqrt();
        let l10 = b / l00;
        let rem = d - l10 * l10;
        if !(rem > 0.0) {
            return Err(Error::Domain(format!("proposal covariance is not positive definite: {sigma:?}")));
        }
        Ok(Self { sigma, chol: [[l00, 0.0], [l10, rem.sqrt()]] })
    }

    pub fn diagonal(var_kappa: f64, var_tau: f64) -> Result<Self> {
        Self::new([[var_kappa, 0.0], [0.0, var_tau]])
    }

    pub fn sigma(&self) -> [[f64; 2]; 2] {
        self.sigma
    }

    /// The covariance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.sigma.map(|row| row.map(|v| v * factor)))
    }

    fn perturb<R: Rng + ?Sized>(&self, x: [f64; 2], rng: &mut R) -> [f64; 2] {
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        let l = &self.chol;
        [x[0] + l[0][0] * z0, x[1] + l[1][0] * z0 + l[1][1] * z1]
    }
}

impl TryFrom<[[f64; 2]; 2]> for Proposal {
    type Error = Error;

    fn try_from(sigma: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(sigma)
    }
}

impl From<Proposal> for [[f64; 2]; 2] {
    fn from(p: Proposal) -> Self {
        p.sigma
    }
}

/// Chain length, burn-in and thinning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McmcConfig {
    /// Total iterations `M`.
    pub iterations: usize,
    /// Discarded leading iterations `M_b`.
    pub burn_in: usize,
    pub thin: usize,
}

impl McmcConfig {
    pub fn new(iterations: usize, burn_in: usize, thin: usize) -> Result<Self> {
        if thin == 0 {
            return Err(Error::Domain("thinning interval must be at least 1".into()));
        }
        if burn_in > iterations {
            return Err(Error::Domain(format!("burn-in ({burn_in}) exceeds the number of iterations ({iterations})")));
        }
        Ok(Self { iterations, burn_in, thin })
    }

    /// `floor((M - M_b) / thin)`.
    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

/// Raw output of [`random_walk_metropolis`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomWalk {
    pub states: Vec<[f64; 2]>,
    pub accepted: usize,
}

/// Random-walk Metropolis on an arbitrary 2-D log density.
///
/// Iteration `d = 1..=M` proposes `x + L z` and accepts when
/// `ln u < log_target(x') - log_target(x)`. States at
/// `d = M_b + thin, M_b + 2 thin, ...` are kept.
pub fn random_walk_metropolis<F, R>(
    mut log_target: F,
    init: [f64; 2],
    proposal: &Proposal,
    config: &McmcConfig,
    rng: &mut R,
) -> Result<RandomWalk>
where
    F: FnMut([f64; 2]) -> f64,
    R: Rng + ?Sized,
{
    let config = McmcConfig::new(config.iterations, config.burn_in, config.thin)?;
    let mut x = init;
    let mut lp = log_target(x);
    if !lp.is_finite() {
        return Err(Error::Domain(format!("log target is not finite at the initial state {init:?}")));
    }
    let mut states = Vec::with_capacity(config.retained());
    let mut accepted = 0;
    for d in 1..=config.iterations {
        let candidate = proposal.perturb(x, rng);
        let lp_new = log_target(candidate);
        let u: f64 = rng.random();
        if lp_new.is_finite() && u.ln() < lp_new - lp {
            x = candidate;
            lp = lp_new;
            accepted += 1;
        }
        if d > config.burn_in && (d - config.burn_in) % config.thin == 0 {
            states.push(x);
        }
    }
    Ok(RandomWalk { states, accepted })
}

/// Retained posterior draws of `(kappa, tau, CV_p, CV_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcChain {
    pub states: Vec<EstimateSet>,
    pub config: McmcConfig,
    /// Accepted proposals over all `M` iterations.
    pub acceptance_rate: f64,
}

impl McmcChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Draws of one parameter in chain order.
    pub fn column(&self, p: Parameter) -> Vec<f64> {
        self.states.iter().map(|s| *s.get(p)).collect()
    }

    pub fn sorted_column(&self, p: Parameter) -> Vec<f64> {
        let mut v = self.column(p);
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Random-walk Metropolis-Hastings on the posterior of `(kappa, tau)`.
///
/// Starts from the midpoint estimates unless `init` is given. The CVs are
/// evaluated at every retained state.
pub fn rwmh<R: Rng + ?Sized>(
    sample: &CensoredSample,
    prior: &Prior,
    config: &McmcConfig,
    proposal: &Proposal,
    init: Option<WeibullParams>,
    rng: &mut R,
) -> Result<McmcChain> {
    let prior = prior.validated()?;
    let init = match init {
        Some(p) => p,
        None => midpoint_initial_estimates(sample)?,
    };
    let walk = random_walk_metropolis(
        |x| log_posterior_at(x[0], x[1], sample, &prior),
        [init.kappa(), init.tau()],
        proposal,
        config,
        rng,
    )?;
    let states = walk
        .states
        .iter()
        .map(|&[kappa, tau]| {
            let (cv_p, cv_k) = cv_pair_unchecked(kappa);
            ByParameter { kappa, tau, cv_p, cv_k }
        })
        .collect();
    let acceptance_rate = if config.iterations == 0 { 0.0 } else { walk.accepted as f64 / config.iterations as f64 };
    Ok(McmcChain { states, config: *config, acceptance_rate })
}

/// Posterior means (squared-error-loss Bayes estimates).
pub fn bayes_estimate(chain: &McmcChain) -> Result<EstimateSet> {
    if chain.is_empty() {
        return Err(Error::Empty("MCMC chain"));
    }
    let mut mean = EstimateSet::default();
    for (k, state) in chain.states.iter().enumerate() {
        let w = 1.0 / (k + 1) as f64;
        for p in Parameter::ALL {
            *mean.get_mut(p) += (state.get(p) - mean.get(p)) * w;
        }
    }
    Ok(mean)
}

/// Shortest interval covering `floor(M' level) + 1` consecutive sorted
/// draws. Ties go to the leftmost window.
///
/// Needs at least `1 / (1 - level)` draws so the window leaves at least
/// one draw out.
pub fn hpdi(sorted: &[f64], level: f64) -> Result<IntervalEstimate> {
    check_level(level)?;
    let len = sorted.len();
    if (len as f64) < 1.0 / (1.0 - level) {
        return Err(Error::Domain(format!(
            "HPD interval at level {level} needs at least {} draws, got {len}",
            (1.0 / (1.0 - level)).ceil()
        )));
    }
    if sorted.iter().any(|v| !v.is_finite()) || sorted.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("HPD interval needs finite values in ascending order".into()));
    }
    let w = ((len as f64 * level).floor() as usize).min(len - 1);
    let mut best = 0;
    for h in 1..len - w {
        if sorted[h + w] - sorted[h] < sorted[best + w] - sorted[best] {
            best = h;
        }
    }
    IntervalEstimate::new(sorted[best], sorted[best + w], level)
}

/// HPD intervals for all four parameters of a chain.
pub fn chain_hpdi(chain: &McmcChain, level: f64) -> Result<IntervalSet> {
    ByParameter::default().try_map(|p, _: &()| hpdi(&chain.sorted_column(p), level))
}

/// Outcome of [`tune_sigma`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedProposal {
    pub proposal: Proposal,
    pub acceptance_rate: f64,
    pub rounds: usize,
}

pub const TARGET_ACCEPTANCE: (f64, f64) = (0.25, 0.40);
const MAX_TUNING_ROUNDS: usize = 40;

/// Rescale `initial` with pilot chains until the acceptance rate lands in
/// `[0.25, 0.40]`.
///
/// The covariance is halved when acceptance is too low and doubled when
/// it is too high. When the direction flips the factor is square-rooted,
/// so a band narrower than one doubling step can still be hit.
pub fn tune_sigma<R: Rng + ?Sized>(
    sample: &CensoredSample,
    prior: &Prior,
    pilot_iterations: usize,
    initial: &Proposal,
    rng: &mut R,
) -> Result<TunedProposal> {
    if pilot_iterations < 1000 {
        return Err(Error::Domain(format!("pilot chains need at least 1000 iterations, got {pilot_iterations}")));
    }
    let init = midpoint_initial_estimates(sample)?;
    let config = McmcConfig::new(pilot_iterations, 0, pilot_iterations)?;
    let (lo, hi) = TARGET_ACCEPTANCE;
    let mut proposal = *initial;
    let mut factor: f64 = 2.0;
    let mut last_direction = 0i8;
    let mut rate = f64::NAN;
    for round in 1..=MAX_TUNING_ROUNDS {
        rate = rwmh(sample, prior, &config, &proposal, Some(init), rng)?.acceptance_rate;
        let direction = if rate < lo {
            -1
        } else if rate > hi {
            1
        } else {
            return Ok(TunedProposal { proposal, acceptance_rate: rate, rounds: round });
        };
        if last_direction != 0 && direction != last_direction {
            factor = factor.sqrt();
        }
        last_direction = direction;
        proposal = proposal.scaled(if direction > 0 { factor } else { 1.0 / factor })?;
    }
    Err(Error::TuningFailed { last_rate: rate })
}
