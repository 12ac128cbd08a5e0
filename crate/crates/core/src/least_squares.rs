//! Least-squares estimators on the nonparametric CDF, and percentile
//! bootstrap intervals.
//!
//! LLSE regresses `ln(-ln(1 - F_i))` on `ln t_i`. NLLSE minimises a
//! squared distance between the model CDF and the nonparametric one over
//! `(ln kappa, ln tau)`, starting from the LLSE point.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the build graph
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::censoring::{f_hat_moments, generate_sample, CensoredSample, CensoringScheme};
use crate::distribution::WeibullParams;
use crate::error::{Error, Result};
use crate::estimate::{check_level, ByParameter, EstimateSet, IntervalEstimate, IntervalSet};
use crate::mle::{FitResult, FitStatus};
use crate::optimize::{nelder_mead, NelderMeadOptions};

fn require_two_intervals(sample: &CensoredSample) -> Result<()> {
    if sample.len() < 2 {
        return Err(Error::InvalidSample(format!(
            "least squares needs at least 2 inspection times, got {}",
            sample.len()
        )));
    }
    Ok(())
}

/// Linear least-squares estimate from the moments-approximation CDF.
pub fn llse(sample: &CensoredSample) -> Result<FitResult> {
    require_two_intervals(sample)?;
    let f_hat = f_hat_moments(sample);
    let params = llse_from_cdf(sample.boundaries(), &f_hat)?;
    Ok(FitResult::new(params, sample, 0, FitStatus::Converged))
}

/// Fit `ln(-ln(1 - F_i)) = ln tau + kappa ln t_i` by ordinary least squares.
pub fn llse_from_cdf(boundaries: &[f64], f_hat: &[f64]) -> Result<WeibullParams> {
    if boundaries.len() != f_hat.len() {
        return Err(Error::Domain(format!("{} boundaries but {} CDF values", boundaries.len(), f_hat.len())));
    }
    if boundaries.len() < 2 {
        return Err(Error::Domain("regression needs at least 2 points".into()));
    }
    for (i, &f) in f_hat.iter().enumerate() {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::CdfDegenerate { index: i, value: f });
        }
    }
    let len = boundaries.len() as f64;
    let xs: Vec<f64> = boundaries.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = f_hat.iter().map(|&f| (-(-f).ln_1p()).ln()).collect();
    let x_bar = xs.iter().sum::<f64>() / len;
    let y_bar = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - x_bar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_bar) * (y - y_bar)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("inspection times give a rank-deficient design".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    WeibullParams::new(slope, intercept.exp())
}

/// Which squared-distance criterion NLLSE minimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NllseVariant {
    /// `sum X_i [(F_i - F_{i-1}) - (Fh_i - Fh_{i-1})]^2 + sum W_i [S_i - Sh_i]^2`
    #[default]
    #[serde(rename = "weighted_2_17")]
    Weighted2_17,
    /// `sum (X_i + W_i)(F_i - Fh_i)^2 - X_i (F_{i-1} - Fh_{i-1})^2`
    #[serde(rename = "paper_2_18")]
    Paper2_18,
}

/// NLLSE objective at `params` against the nonparametric CDF `f_hat`
/// (with `F_0 = Fh_0 = 0`).
pub fn nllse_objective(params: &WeibullParams, sample: &CensoredSample, f_hat: &[f64], variant: NllseVariant) -> f64 {
    let mut total = 0.0;
    let (mut f_prev, mut fh_prev) = (0.0, 0.0);
    for i in 0..sample.len() {
        let f = params.cdf_unchecked(sample.boundaries()[i]);
        let fh = f_hat[i];
        let x = sample.failures()[i] as f64;
        let w = sample.withdrawals()[i] as f64;
        total += match variant {
            NllseVariant::Weighted2_17 => x * ((f - f_prev) - (fh - fh_prev)).powi(2) + w * (fh - f).powi(2),
            NllseVariant::Paper2_18 => (x + w) * (f - fh).powi(2) - x * (f_prev - fh_prev).powi(2),
        };
        f_prev = f;
        fh_prev = fh;
    }
    total
}

/// Nonlinear least-squares estimate from the moments-approximation CDF.
pub fn nllse(sample: &CensoredSample, variant: NllseVariant) -> Result<FitResult> {
    require_two_intervals(sample)?;
    nllse_with_cdf(sample, &f_hat_moments(sample), variant)
}

/// NLLSE against a caller-supplied nonparametric CDF.
pub fn nllse_with_cdf(sample: &CensoredSample, f_hat: &[f64], variant: NllseVariant) -> Result<FitResult> {
    require_two_intervals(sample)?;
    let start = llse_from_cdf(sample.boundaries(), f_hat)?;
    let objective = |xi: [f64; 2]| match WeibullParams::new(xi[0].exp(), xi[1].exp()) {
        Ok(p) => nllse_objective(&p, sample, f_hat, variant),
        Err(_) => f64::INFINITY,
    };
    let best = nelder_mead(objective, [start.kappa().ln(), start.tau().ln()], &NelderMeadOptions::default());
    let params = WeibullParams::new(best.x[0].exp(), best.x[1].exp())?;
    let status = if best.converged { FitStatus::Converged } else { FitStatus::IterationLimit };
    Ok(FitResult::new(params, sample, best.iterations, status))
}

/// Estimator refitted on each bootstrap sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsEstimator {
    Llse,
    Nllse(NllseVariant),
}

impl LsEstimator {
    pub fn fit(self, sample: &CensoredSample) -> Result<FitResult> {
        match self {
            LsEstimator::Llse => llse(sample),
            LsEstimator::Nllse(v) => nllse(sample, v),
        }
    }
}

/// Sorted bootstrap replicates of one statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDistribution {
    values: Vec<f64>,
}

impl BootstrapDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("bootstrap distribution"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("bootstrap replicates must be finite".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Order statistics at [`percentile_ranks`].
    pub fn percentile_interval(&self, level: f64) -> Result<IntervalEstimate> {
        let (lo, hi) = percentile_ranks(self.values.len(), level)?;
        IntervalEstimate::new(self.values[lo - 1], self.values[hi - 1], level)
    }
}

/// One-based ranks `(round(beta B / 2), round((1 - beta / 2) B))` of the
/// percentile interval, clamped to `1..=B`.
pub fn percentile_ranks(b: usize, level: f64) -> Result<(usize, usize)> {
    check_level(level)?;
    if b == 0 {
        return Err(Error::Empty("bootstrap distribution"));
    }
    let beta = 1.0 - level;
    let bf = b as f64;
    let lo = ((beta * bf / 2.0).round() as usize).clamp(1, b);
    let hi = (((1.0 - beta / 2.0) * bf).round() as usize).clamp(lo, b);
    Ok((lo, hi))
}

/// Percentile bootstrap output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbiResult {
    pub point: FitResult,
    pub intervals: IntervalSet,
    pub distributions: ByParameter<BootstrapDistribution>,
    /// Resamples drawn, including the ones whose fit failed.
    pub attempts: usize,
    pub failures: usize,
}

/// Percentile bootstrap intervals, resampling with the withdrawal
/// proportions implied by `sample`.
pub fn pbi<R: Rng + ?Sized>(
    sample: &CensoredSample,
    estimator: LsEstimator,
    b: usize,
    level: f64,
    rng: &mut R,
) -> Result<PbiResult> {
    pbi_with_scheme(sample, &CensoringScheme::from_sample(sample), estimator, b, level, rng)
}

/// Percentile bootstrap intervals with an explicit censoring scheme.
///
/// Each resample is `n` units drawn from the fitted Weibull under
/// `scheme`. Resamples on which the estimator fails are redrawn, so the
/// distribution always has exactly `b` points; at most `10 b` draws are made.
pub fn pbi_with_scheme<R: Rng + ?Sized>(
    sample: &CensoredSample,
    scheme: &CensoringScheme,
    estimator: LsEstimator,
    b: usize,
    level: f64,
    rng: &mut R,
) -> Result<PbiResult> {
    check_level(level)?;
    if b == 0 {
        return Err(Error::Empty("bootstrap replicate count"));
    }
    let point = estimator.fit(sample)?;
    let max_attempts = b.saturating_mul(10);
    let mut draws: ByParameter<Vec<f64>> = ByParameter {
        kappa: Vec::with_capacity(b),
        tau: Vec::with_capacity(b),
        cv_p: Vec::with_capacity(b),
        cv_k: Vec::with_capacity(b),
    };
    let mut attempts = 0;
    let mut failures = 0;
    while draws.kappa.len() < b {
        if attempts == max_attempts {
            return Err(Error::BootstrapExhausted { attempts, failures });
        }
        attempts += 1;
        let resample = generate_sample(&point.params, scheme, sample.n(), rng);
        let est = estimator.fit(&resample).and_then(|fit| EstimateSet::from_params(&fit.params));
        match est {
            Ok(e) if e.iter().all(|(_, v)| v.is_finite()) => {
                for (p, v) in e.iter() {
                    draws.get_mut(p).push(*v);
                }
            }
            _ => failures += 1,
        }
    }
    let distributions = draws.try_map(|_, v| BootstrapDistribution::new(v.clone()))?;
    let intervals = distributions.try_map(|_, d| d.percentile_interval(level))?;
    Ok(PbiResult { point, intervals, distributions, attempts, failures })
}
