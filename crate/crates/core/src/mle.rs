//! Maximum likelihood for interval-censored Weibull data.
//!
//! With `D_i = t_i^kappa - t_{i-1}^kappa`, the log-likelihood is
//!
//! ```text
//! l(kappa, tau) = sum X_i ln(exp(tau D_i) - 1) - tau sum (X_i + W_i) t_i^kappa
//! ```
//!
//! Two solvers are provided: a safeguarded Newton-Raphson iteration on the
//! likelihood equations, and the alternating scheme that updates `tau` by
//! a fixed point on equivalent failure times and `kappa` by a 1-D profile
//! maximisation. Asymptotic intervals come from the observed information
//! and the delta method.

use alloc::format;
#[allow(unused_imports)] // unused when std is in the build graph
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::censoring::{midpoint_initial_estimates, midpoint_rate, CensoredSample, MAX_SHAPE};
use crate::distribution::{cv_k_dkappa, cv_p_dkappa, cv_pair_unchecked, WeibullParams, MIN_SHAPE};
use crate::error::{Error, Result};
use crate::estimate::{check_level, ByParameter, EstimateSet, IntervalEstimate, IntervalSet, Parameter};
use crate::optimize::maximize_bounded;
use crate::special::std_normal_quantile;

/// Why an iterative fit stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Converged,
    IterationLimit,
    SingularJacobian,
    /// No step-halving kept the iterate admissible.
    StepRejected,
}

/// Point estimate produced by one estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: WeibullParams,
    pub cv_p: f64,
    pub cv_k: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: FitStatus,
    /// Log-likelihood at `params`.
    pub loglik: f64,
}

impl FitResult {
    pub(crate) fn new(params: WeibullParams, sample: &CensoredSample, iterations: usize, status: FitStatus) -> Self {
        let (cv_p, cv_k) = cv_pair_unchecked(params.kappa());
        Self {
            params,
            cv_p,
            cv_k,
            iterations,
            converged: status == FitStatus::Converged,
            status,
            loglik: log_likelihood(&params, sample),
        }
    }

    pub fn estimates(&self) -> EstimateSet {
        ByParameter { kappa: self.params.kappa(), tau: self.params.tau(), cv_p: self.cv_p, cv_k: self.cv_k }
    }
}

/// Likelihood pieces evaluated at one point.
#[derive(Debug, Clone, Copy)]
struct Evaluation {
    loglik: f64,
    /// Exact gradient `(dl/dkappa, dl/dtau)`.
    gradient: [f64; 2],
    /// The likelihood equations `(l_1, l_2)`; `l_1` is `dl/dkappa / tau`.
    equations: [f64; 2],
    /// Jacobian of `(l_1, l_2)`.
    jacobian: [[f64; 2]; 2],
    /// Hessian of `l`.
    hessian: [[f64; 2]; 2],
}

fn evaluate(params: &WeibullParams, sample: &CensoredSample) -> Option<Evaluation> {
    let kappa = params.kappa();
    let tau = params.tau();
    let mut ll = 0.0;
    // l_1 and l_2 partial sums
    let (mut l1, mut l2) = (0.0, 0.0);
    let (mut j11, mut j12, mut j21, mut j22) = (0.0, 0.0, 0.0, 0.0);

    // t_{i-1}^kappa, t_{i-1}^kappa ln t_{i-1}, t_{i-1}^kappa ln^2 t_{i-1};
    // all zero at t_0 = 0 (0 ln 0 = 0).
    let (mut lo_k, mut lo_kl, mut lo_kll) = (0.0, 0.0, 0.0);
    for i in 0..sample.len() {
        let t = sample.boundaries()[i];
        let x = sample.failures()[i] as f64;
        let xw = x + sample.withdrawals()[i] as f64;
        let lt = t.ln();
        let tk = t.powf(kappa);
        let tkl = tk * lt;
        let tkll = tkl * lt;

        if x > 0.0 {
            let d = tk - lo_k;
            let dk = tkl - lo_kl;
            let dkk = tkll - lo_kll;
            let u = tau * d;
            // 1 - exp(-u) and exp(-u)
            let om = -(-u).exp_m1();
            let e = (-u).exp();
            if !(om > 0.0) {
                return None;
            }
            ll += x * (u + om.ln());
            l1 += x * dk / om;
            l2 += x * d / om;
            let om2 = om * om;
            j11 += x * (om * dkk - tau * dk * dk * e) / om2;
            j12 -= x * d * dk * e / om2;
            j21 += x * (om * dk - tau * d * dk * e) / om2;
            j22 -= x * d * d * e / om2;
        }
        ll -= tau * xw * tk;
        l1 -= xw * tkl;
        l2 -= xw * tk;
        j11 -= xw * tkll;
        j21 -= xw * tkl;

        lo_k = tk;
        lo_kl = tkl;
        lo_kll = tkll;
    }
    if !ll.is_finite() {
        return None;
    }
    Some(Evaluation {
        loglik: ll,
        gradient: [tau * l1, l2],
        equations: [l1, l2],
        jacobian: [[j11, j12], [j21, j22]],
        hessian: [[tau * j11, j21], [j21, j22]],
    })
}

/// Log-likelihood, or `-inf` where it is undefined (the sentinel
/// optimisers and samplers use for rejection).
pub fn log_likelihood(params: &WeibullParams, sample: &CensoredSample) -> f64 {
    evaluate(params, sample).map_or(f64::NEG_INFINITY, |e| e.loglik)
}

/// Same as [`log_likelihood`] for raw `(kappa, tau)`; `-inf` outside the
/// parameter space.
pub fn log_likelihood_at(kappa: f64, tau: f64, sample: &CensoredSample) -> f64 {
    match WeibullParams::new(kappa, tau) {
        Ok(p) => log_likelihood(&p, sample),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Exact gradient `(dl/dkappa, dl/dtau)`.
pub fn score(params: &WeibullParams, sample: &CensoredSample) -> Result<[f64; 2]> {
    evaluate(params, sample).map(|e| e.gradient).ok_or_else(|| undefined(params))
}

/// The likelihood equations `(l_1, l_2)` solved by Newton-Raphson.
/// `l_2 = dl/dtau`; `l_1 = (dl/dkappa) / tau`, which has the same roots.
pub fn likelihood_equations(params: &WeibullParams, sample: &CensoredSample) -> Result<[f64; 2]> {
    evaluate(params, sample).map(|e| e.equations).ok_or_else(|| undefined(params))
}

/// Jacobian `[[dl_1/dk, dl_1/dt], [dl_2/dk, dl_2/dt]]` of the likelihood equations.
pub fn likelihood_jacobian(params: &WeibullParams, sample: &CensoredSample) -> Result<[[f64; 2]; 2]> {
    evaluate(params, sample).map(|e| e.jacobian).ok_or_else(|| undefined(params))
}

fn undefined(params: &WeibullParams) -> Error {
    Error::Domain(format!("log-likelihood is not finite at kappa={}, tau={}", params.kappa(), params.tau()))
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Observed Fisher information (negative Hessian), ordered `(kappa, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoMatrix(pub [[f64; 2]; 2]);

/// Asymptotic variance-covariance matrix of `(kappa_hat, tau_hat)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance(pub [[f64; 2]; 2]);

impl InfoMatrix {
    pub fn det(&self) -> f64 {
        det2(&self.0)
    }

    /// Matrix inverse. Fails when the determinant is zero relative to the
    /// size of its terms.
    pub fn covariance(&self) -> Result<Covariance> {
        let m = &self.0;
        let det = self.det();
        let scale = (m[0][0] * m[1][1]).abs() + (m[0][1] * m[1][0]).abs();
        if !det.is_finite() || det.abs() <= 1e-12 * scale || det == 0.0 {
            return Err(Error::Singular { det: det.abs() });
        }
        Ok(Covariance([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]))
    }
}

impl Covariance {
    pub fn var_kappa(&self) -> f64 {
        self.0[0][0]
    }

    pub fn var_tau(&self) -> f64 {
        self.0[1][1]
    }

    pub fn cov_kappa_tau(&self) -> f64 {
        self.0[0][1]
    }
}

pub fn observed_information(params: &WeibullParams, sample: &CensoredSample) -> Result<InfoMatrix> {
    let h = evaluate(params, sample).ok_or_else(|| undefined(params))?.hessian;
    Ok(InfoMatrix([[-h[0][0], -h[0][1]], [-h[1][0], -h[1][1]]]))
}

/// Inverse of the observed information.
pub fn covariance(info: &InfoMatrix) -> Result<Covariance> {
    info.covariance()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Stop once `max(|d kappa|, |d tau|)` is at most this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200 }
    }
}

const MAX_HALVINGS: usize = 30;

/// Newton-Raphson on the likelihood equations from `init`.
///
/// A step that leaves the parameter space (or makes the likelihood
/// undefined) is halved, up to 30 times. A singular Jacobian or an
/// exhausted iteration budget is reported through [`FitResult::status`].
pub fn newton_raphson(sample: &CensoredSample, init: &WeibullParams, opts: &NewtonOptions) -> FitResult {
    let mut current = *init;
    let mut status = FitStatus::IterationLimit;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let Some(eval) = evaluate(&current, sample) else {
            status = FitStatus::StepRejected;
            break;
        };
        let j = eval.jacobian;
        let det = det2(&j);
        if !(det.abs() >= 1e-300) || !det.is_finite() {
            status = FitStatus::SingularJacobian;
            break;
        }
        let [l1, l2] = eval.equations;
        let step = [(j[1][1] * l1 - j[0][1] * l2) / det, (j[0][0] * l2 - j[1][0] * l1) / det];
        if !(step[0].is_finite() && step[1].is_finite()) {
            status = FitStatus::SingularJacobian;
            break;
        }
        iterations += 1;

        let mut scale = 1.0;
        let mut next = None;
        for _ in 0..=MAX_HALVINGS {
            let k = current.kappa() - scale * step[0];
            let t = current.tau() - scale * step[1];
            if let Ok(p) = WeibullParams::new(k, t) {
                if log_likelihood(&p, sample).is_finite() {
                    next = Some(p);
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some(next) = next else {
            status = FitStatus::StepRejected;
            break;
        };
        let moved = (next.kappa() - current.kappa()).abs().max((next.tau() - current.tau()).abs());
        current = next;
        if moved <= opts.tol {
            status = FitStatus::Converged;
            break;
        }
    }
    FitResult::new(current, sample, iterations, status)
}

/// Conditional mean of an Exponential(`tau`) variable given it falls in
/// `(a, b]`: `1/tau + (a e^{-tau a} - b e^{-tau b}) / (e^{-tau a} - e^{-tau b})`.
///
/// Evaluated as `a + 1/tau - delta / expm1(tau delta)` with `delta = b - a`,
/// switching to a series when `tau delta` is small. `b = inf` is allowed.
pub fn equivalent_failure_time(tau: f64, a: f64, b: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) || !(a >= 0.0 && a.is_finite()) || !(b > a) {
        return Err(Error::Domain(format!(
            "equivalent failure time needs tau > 0 and 0 <= a < b (tau={tau}, a={a}, b={b})"
        )));
    }
    Ok(equivalent_failure_time_unchecked(tau, a, b))
}

fn equivalent_failure_time_unchecked(tau: f64, a: f64, b: f64) -> f64 {
    if b.is_infinite() {
        return a + 1.0 / tau;
    }
    let delta = b - a;
    let u = tau * delta;
    let offset = if u < 1e-3 {
        // delta * (1/2 - u/12 + u^3/720)
        delta * (0.5 - u / 12.0 + u * u * u / 720.0)
    } else {
        1.0 / tau - delta / u.exp_m1()
    };
    a + offset
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeMleOptions {
    pub tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for AlternativeMleOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_outer: 200, max_inner: 500 }
    }
}

/// Alternating maximum likelihood.
///
/// Starting from the midpoint shape, each outer pass
/// 1. maps the inspection times to `t^kappa`, where the data are
///    exponential with rate `tau`;
/// 2. iterates `tau <- sum X / (sum X_i t*_i + sum W_i t_i^kappa)` with
///    `t*_i` the equivalent failure time of interval `i`, starting from
///    the midpoint rate;
/// 3. sets `kappa = argmax l(kappa, tau)` by bounded 1-D search.
///
/// The shape sequence converges linearly, so the loop stops only when both
/// the last move and the move extrapolated from the ratio of successive
/// moves are below `tol`. When that ratio is in (0, 1) the next pass starts
/// from the Aitken extrapolation of the sequence. At least two passes run.
pub fn fit_alternative_mle(sample: &CensoredSample, opts: &AlternativeMleOptions) -> Result<FitResult> {
    sample.require_failures()?;
    let init = midpoint_initial_estimates(sample)?;
    let total_x = sample.total_failures() as f64;
    let m = sample.len();

    let mut kappa_p = init.kappa();
    let mut tau_hat = init.tau();
    let mut outer = 0;
    let mut status = FitStatus::IterationLimit;
    let mut transformed = alloc::vec![0.0; m];
    let mut last_kappa = kappa_p;
    let mut prev_step: Option<f64> = None;

    while outer < opts.max_outer {
        outer += 1;
        for (s, &t) in transformed.iter_mut().zip(sample.boundaries()) {
            *s = t.powf(kappa_p);
        }

        let mut tau_p = midpoint_rate(sample, kappa_p)?;
        let mut inner_converged = false;
        for _ in 0..opts.max_inner {
            let mut exposure = 0.0;
            for i in 0..m {
                let x = sample.failures()[i];
                let s_hi = transformed[i];
                if x > 0 {
                    let s_lo = if i == 0 { 0.0 } else { transformed[i - 1] };
                    exposure += x as f64 * equivalent_failure_time_unchecked(tau_p, s_lo, s_hi);
                }
                exposure += sample.withdrawals()[i] as f64 * s_hi;
            }
            tau_hat = total_x / exposure;
            if !(tau_hat > 0.0 && tau_hat.is_finite()) {
                return Err(Error::NoConvergence("equivalent-failure-time rate update"));
            }
            let done = (tau_hat - tau_p).abs() < opts.tol * tau_p;
            tau_p = tau_hat;
            if done {
                inner_converged = true;
                break;
            }
        }

        let tau_fixed = tau_hat;
        let best = maximize_bounded(|k| log_likelihood_at(k, tau_fixed, sample), MIN_SHAPE, MAX_SHAPE, 1e-8);
        let kappa_hat = best.x;
        last_kappa = kappa_hat;
        let step = kappa_hat - kappa_p;
        // Ratio of successive steps; the remaining error is about step * rho / (1 - rho).
        let rho = prev_step.map(|d: f64| if step == 0.0 { 0.0 } else { step / d });
        let settled = match rho {
            Some(r) if r.abs() < 1.0 => step.abs() * r.abs() / (1.0 - r.abs()) < opts.tol,
            _ => false,
        };
        if step.abs() < opts.tol && settled && inner_converged {
            status = FitStatus::Converged;
            break;
        }
        match rho {
            Some(r) if r > 0.0 && r < 0.999 => {
                kappa_p = (kappa_hat + step * r / (1.0 - r)).clamp(MIN_SHAPE, MAX_SHAPE);
                prev_step = None;
            }
            _ => {
                kappa_p = kappa_hat;
                prev_step = Some(step);
            }
        }
    }
    let params = WeibullParams::new(last_kappa, tau_hat)?;
    Ok(FitResult::new(params, sample, outer, status))
}

/// Maximum likelihood: [`fit_alternative_mle`] with its default settings,
/// then Newton-Raphson from that point to the precision of the likelihood
/// equations. The Newton result is kept only when it converges close to
/// the starting point without lowering the likelihood.
pub fn fit_mle(sample: &CensoredSample) -> Result<FitResult> {
    let alt = fit_alternative_mle(sample, &AlternativeMleOptions::default())?;
    if !alt.converged {
        return Ok(alt);
    }
    let polished = newton_raphson(sample, &alt.params, &NewtonOptions::default());
    let near = (polished.params.kappa() - alt.params.kappa()).abs() <= 1e-3 * alt.params.kappa().max(1.0)
        && (polished.params.tau() / alt.params.tau()).ln().abs() <= 1e-2;
    if polished.converged && near && polished.loglik >= alt.loglik {
        Ok(FitResult { iterations: alt.iterations + polished.iterations, ..polished })
    } else {
        Ok(alt)
    }
}

/// Delta-method variance of a parameter estimate. The CVs depend on the
/// shape only, so their variance is `(dCV/dkappa)^2 var(kappa_hat)`.
pub fn delta_variance(params: &WeibullParams, cov: &Covariance, target: Parameter) -> Result<f64> {
    let var_k = cov.var_kappa();
    Ok(match target {
        Parameter::Kappa => var_k,
        Parameter::Tau => cov.var_tau(),
        Parameter::CvP => cv_p_dkappa(params.kappa())?.powi(2) * var_k,
        Parameter::CvK => cv_k_dkappa(params.kappa())?.powi(2) * var_k,
    })
}

/// Delta-method variance of `ln g`: `var(g) / g^2`.
pub fn log_delta_variance(params: &WeibullParams, cov: &Covariance, target: Parameter) -> Result<f64> {
    let g = *EstimateSet::from_params(params)?.get(target);
    if g == 0.0 {
        return Err(Error::Domain(format!("{target} estimate is zero; its log is undefined")));
    }
    Ok(delta_variance(params, cov, target)? / (g * g))
}

fn check_variance(variance: f64) -> Result<f64> {
    if variance >= 0.0 && variance.is_finite() {
        Ok(variance.sqrt())
    } else {
        Err(Error::Domain(format!("variance must be finite and non-negative, got {variance}")))
    }
}

/// `z_{1 - beta/2}` for a two-sided interval at `level = 1 - beta`.
pub fn normal_critical_value(level: f64) -> Result<f64> {
    check_level(level)?;
    std_normal_quantile(0.5 + 0.5 * level)
}

/// Wald interval `estimate +/- z sd`, lower end clamped at 0.
pub fn aci(estimate: f64, variance: f64, level: f64) -> Result<IntervalEstimate> {
    let z = normal_critical_value(level)?;
    let sd = check_variance(variance)?;
    IntervalEstimate::new((estimate - z * sd).max(0.0), estimate + z * sd, level)
}

/// Log-transformed interval `estimate * exp(-/+ z sd / estimate)`.
pub fn maci(estimate: f64, variance: f64, level: f64) -> Result<IntervalEstimate> {
    let z = normal_critical_value(level)?;
    let sd = check_variance(variance)?;
    if !(estimate > 0.0) {
        return Err(Error::Domain(format!("log-scale interval needs a positive estimate, got {estimate}")));
    }
    let h = z * sd / estimate;
    IntervalEstimate::new(estimate * (-h).exp(), estimate * h.exp(), level)
}

/// ACI and MACI for all four parameters at an MLE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticIntervals {
    pub covariance: Covariance,
    pub variances: ByParameter<f64>,
    pub aci: IntervalSet,
    pub maci: IntervalSet,
}

pub fn asymptotic_intervals(
    params: &WeibullParams,
    sample: &CensoredSample,
    level: f64,
) -> Result<AsymptoticIntervals> {
    check_level(level)?;
    let cov = observed_information(params, sample)?.covariance()?;
    if !(cov.var_kappa() > 0.0 && cov.var_tau() > 0.0) {
        return Err(Error::Domain("observed information is not positive definite at the estimate".into()));
    }
    let estimates = EstimateSet::from_params(params)?;
    let variances = estimates.try_map(|p, _| delta_variance(params, &cov, p))?;
    let aci_set = estimates.try_map(|p, g| aci(*g, *variances.get(p), level))?;
    let maci_set = estimates.try_map(|p, g| maci(*g, *variances.get(p), level))?;
    Ok(AsymptoticIntervals { covariance: cov, variances, aci: aci_set, maci: maci_set })
}
