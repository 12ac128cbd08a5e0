//! Progressively type-I interval-censored samples.
//!
//! `n` units start on test at `t_0 = 0` and are inspected at fixed times
//! `t_1 < ... < t_m`. At inspection `i` we learn `X_i`, the number of units
//! that failed in `(t_{i-1}, t_i]`, and then withdraw `W_i` of the survivors.
//! Units still alive at `t_m` are all withdrawn, so `sum(X_i + W_i) = n`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the build graph
use num_traits::Float;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::distribution::{WeibullParams, MIN_SHAPE};
use crate::error::{Error, Result};
use crate::optimize::maximize_bounded;

/// Upper end of the shape search used by the initialisers and the
/// profile maximisations.
pub const MAX_SHAPE: f64 = 50.0;

fn check_boundaries(t: &[f64]) -> core::result::Result<(), alloc::string::String> {
    if t.is_empty() {
        return Err("at least one inspection time is required".into());
    }
    let mut prev = 0.0;
    for (i, &ti) in t.iter().enumerate() {
        if !ti.is_finite() || ti <= prev {
            return Err(format!("inspection times must be finite, positive and strictly increasing (t[{i}] = {ti})"));
        }
        prev = ti;
    }
    Ok(())
}

/// Observed interval-censored data `(t_i, X_i, W_i)`, `i = 1..m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSample")]
pub struct CensoredSample {
    #[serde(rename = "t")]
    boundaries: Vec<f64>,
    #[serde(rename = "X")]
    failures: Vec<u64>,
    #[serde(rename = "W")]
    withdrawals: Vec<u64>,
    n: u64,
}

#[derive(Deserialize)]
struct RawSample {
    t: Vec<f64>,
    #[serde(rename = "X")]
    x: Vec<u64>,
    #[serde(rename = "W")]
    w: Vec<u64>,
    n: Option<u64>,
}

impl TryFrom<RawSample> for CensoredSample {
    type Error = Error;

    fn try_from(raw: RawSample) -> Result<Self> {
        match raw.n {
            Some(n) => CensoredSample::new(raw.t, raw.x, raw.w, n),
            None => CensoredSample::from_counts(raw.t, raw.x, raw.w),
        }
    }
}

impl CensoredSample {
    /// Validating constructor; `n` must equal `sum(X) + sum(W)`.
    pub fn new(boundaries: Vec<f64>, failures: Vec<u64>, withdrawals: Vec<u64>, n: u64) -> Result<Self> {
        check_boundaries(&boundaries).map_err(Error::InvalidSample)?;
        let m = boundaries.len();
        if failures.len() != m || withdrawals.len() != m {
            return Err(Error::InvalidSample(format!(
                "expected {m} failure and withdrawal counts, got {} and {}",
                failures.len(),
                withdrawals.len()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidSample("n must be positive".into()));
        }
        let total: u64 = failures.iter().chain(withdrawals.iter()).sum();
        if total != n {
            return Err(Error::InvalidSample(format!("sum(X) + sum(W) = {total} does not match n = {n}")));
        }
        Ok(Self { boundaries, failures, withdrawals, n })
    }

    /// Constructor that infers `n = sum(X) + sum(W)`.
    pub fn from_counts(boundaries: Vec<f64>, failures: Vec<u64>, withdrawals: Vec<u64>) -> Result<Self> {
        let n = failures.iter().chain(withdrawals.iter()).sum();
        Self::new(boundaries, failures, withdrawals, n)
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn failures(&self) -> &[u64] {
        &self.failures
    }

    pub fn withdrawals(&self) -> &[u64] {
        &self.withdrawals
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of inspection times `m`.
    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }

    pub fn total_failures(&self) -> u64 {
        self.failures.iter().sum()
    }

    /// `t_{i-1}` for the 0-based interval index `i`, with `t_{-1} = 0`.
    #[inline]
    pub fn lower(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.boundaries[i - 1]
        }
    }

    /// Units on test at the start of interval `i` (0-based).
    pub fn at_risk(&self) -> Vec<u64> {
        let mut alive = self.n;
        self.failures
            .iter()
            .zip(&self.withdrawals)
            .map(|(&x, &w)| {
                let r = alive;
                alive -= x + w;
                r
            })
            .collect()
    }

    /// True when every unit is gone before the last inspection time.
    pub fn terminates_early(&self) -> bool {
        let m = self.len();
        let before_last: u64 = self.failures[..m - 1].iter().chain(&self.withdrawals[..m - 1]).sum();
        before_last == self.n
    }

    pub(crate) fn require_failures(&self) -> Result<()> {
        if self.total_failures() == 0 {
            Err(Error::NoFailures)
        } else {
            Ok(())
        }
    }
}

/// Inspection times plus withdrawal proportions `p_i` of the survivors
/// at each inspection; the last proportion is always 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme")]
pub struct CensoringScheme {
    #[serde(rename = "t")]
    boundaries: Vec<f64>,
    #[serde(rename = "p")]
    proportions: Vec<f64>,
}

#[derive(Deserialize)]
struct RawScheme {
    t: Vec<f64>,
    p: Vec<f64>,
}

impl TryFrom<RawScheme> for CensoringScheme {
    type Error = Error;

    fn try_from(raw: RawScheme) -> Result<Self> {
        CensoringScheme::new(raw.t, raw.p)
    }
}

impl CensoringScheme {
    pub fn new(boundaries: Vec<f64>, proportions: Vec<f64>) -> Result<Self> {
        check_boundaries(&boundaries).map_err(Error::InvalidScheme)?;
        if proportions.len() != boundaries.len() {
            return Err(Error::InvalidScheme(format!(
                "{} inspection times but {} withdrawal proportions",
                boundaries.len(),
                proportions.len()
            )));
        }
        if let Some((i, p)) = proportions.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidScheme(format!("proportion p[{i}] = {p} is outside [0, 1]")));
        }
        if proportions.last() != Some(&1.0) {
            return Err(Error::InvalidScheme(
                "the last withdrawal proportion must be 1 (all survivors removed at t_m)".into(),
            ));
        }
        Ok(Self { boundaries, proportions })
    }

    /// Scheme with no early withdrawals: `p = (0, ..., 0, 1)`.
    pub fn no_early_withdrawal(boundaries: Vec<f64>) -> Result<Self> {
        let mut p = alloc::vec![0.0; boundaries.len()];
        if let Some(last) = p.last_mut() {
            *last = 1.0;
        }
        Self::new(boundaries, p)
    }

    /// Proportions implied by an observed sample:
    /// `p_i = W_i / (survivors after the failures in interval i)`, `p_m = 1`.
    pub fn from_sample(sample: &CensoredSample) -> Self {
        let m = sample.len();
        let mut alive = sample.n();
        let mut p = Vec::with_capacity(m);
        for i in 0..m {
            let after = alive - sample.failures()[i];
            let w = sample.withdrawals()[i];
            p.push(if i + 1 == m {
                1.0
            } else if after > 0 {
                w as f64 / after as f64
            } else {
                0.0
            });
            alive = after - w;
        }
        Self { boundaries: sample.boundaries().to_vec(), proportions: p }
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }
}

/// How a withdrawal proportion is turned into a unit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WithdrawalRounding {
    /// `floor(p * survivors)`.
    #[default]
    Floor,
    /// Nearest integer, ties away from zero.
    Round,
    /// `Binomial(survivors, p)`.
    Stochastic,
}

/// Draw a sample with floor-rounded withdrawals.
pub fn generate_sample<R: Rng + ?Sized>(
    params: &WeibullParams,
    scheme: &CensoringScheme,
    n: u64,
    rng: &mut R,
) -> CensoredSample {
    generate_sample_with(params, scheme, n, WithdrawalRounding::Floor, rng)
}

/// Sequential binomial generation: with `R_0 = n`, for each inspection
/// `X_i ~ Bin(R_{i-1}, q_i)` where `q_i` is the conditional failure
/// probability on `(t_{i-1}, t_i]`, then `W_i` is taken from the
/// `R_{i-1} - X_i` survivors.
pub fn generate_sample_with<R: Rng + ?Sized>(
    params: &WeibullParams,
    scheme: &CensoringScheme,
    n: u64,
    rounding: WithdrawalRounding,
    rng: &mut R,
) -> CensoredSample {
    let m = scheme.len();
    let mut failures = Vec::with_capacity(m);
    let mut withdrawals = Vec::with_capacity(m);
    let mut alive = n;
    let mut prev_tk = 0.0;
    for i in 0..m {
        let tk = scheme.boundaries[i].powf(params.kappa());
        // q = (F(t_i) - F(t_{i-1})) / (1 - F(t_{i-1}))
        let q = -(-params.tau() * (tk - prev_tk)).exp_m1();
        prev_tk = tk;
        let x = draw_binomial(alive, q, rng);
        let survivors = alive - x;
        let p = scheme.proportions[i];
        let w = if p >= 1.0 {
            survivors
        } else {
            match rounding {
                // The 1e-9 nudge keeps floor(W/r * r) == W for proportions
                // recovered from data.
                WithdrawalRounding::Floor => ((p * survivors as f64) + 1e-9).floor() as u64,
                WithdrawalRounding::Round => (p * survivors as f64).round() as u64,
                WithdrawalRounding::Stochastic => draw_binomial(survivors, p, rng),
            }
            .min(survivors)
        };
        failures.push(x);
        withdrawals.push(w);
        alive = survivors - w;
    }
    // The last proportion is 1, so every unit is accounted for.
    CensoredSample { boundaries: scheme.boundaries.clone(), failures, withdrawals, n }
}

fn draw_binomial<R: Rng + ?Sized>(trials: u64, p: f64, rng: &mut R) -> u64 {
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    match Binomial::new(trials, p) {
        Ok(b) => b.sample(rng),
        Err(_) => 0,
    }
}

/// Moments-approximation estimate of `F(t_i)`:
///
/// ```text
/// F_i = 1 - prod_{j=m-i+1}^{m} (sum_{k=m-j+2}^m X_k + sum_{k=m-j+1}^m W_k + j)
///                            / (sum_{k=m-j+1}^m (X_k + W_k) + j + 1)
/// ```
///
/// Writing `q = m - j + 1` for the interval of each factor, the numerator is
/// `N_q - X_q + j` and the denominator `N_q + j + 1`, where `N_q` is the
/// number at risk entering interval `q`. Every factor lies in (0, 1), so the
/// estimates are strictly increasing and strictly inside (0, 1) even when
/// some `X_i = 0`.
pub fn f_hat_moments(sample: &CensoredSample) -> Vec<f64> {
    let m = sample.len();
    let at_risk = sample.at_risk();
    let mut survival = 1.0;
    (0..m)
        .map(|q| {
            let j = (m - q) as f64;
            let n_q = at_risk[q] as f64;
            let x_q = sample.failures()[q] as f64;
            survival *= (n_q - x_q + j) / (n_q + j + 1.0);
            1.0 - survival
        })
        .collect()
}

/// Product-limit estimate `F_i = 1 - prod_{j<=i} (1 - X_j / N_j)`.
///
/// Fails when the estimate is 0 at the first inspection (`X_1 = 0`) or
/// reaches 1 anywhere, because `ln(-ln(1 - F))` is then undefined.
pub fn f_hat_km(sample: &CensoredSample) -> Result<Vec<f64>> {
    let at_risk = sample.at_risk();
    let mut survival = 1.0;
    let mut out = Vec::with_capacity(sample.len());
    for (i, (&x, &r)) in sample.failures().iter().zip(&at_risk).enumerate() {
        if r > 0 {
            survival *= 1.0 - x as f64 / r as f64;
        }
        let f = 1.0 - survival;
        if (i == 0 && f <= 0.0) || f >= 1.0 {
            return Err(Error::CdfDegenerate { index: i, value: f });
        }
        out.push(f);
    }
    Ok(out)
}

/// Rate that maximises the midpoint pseudo-likelihood at a fixed shape:
/// `tau(kappa) = sum X / (sum X_i m_i^kappa + sum W_i t_i^kappa)`.
pub fn midpoint_rate(sample: &CensoredSample, kappa: f64) -> Result<f64> {
    sample.require_failures()?;
    Ok(midpoint_rate_unchecked(sample, kappa))
}

fn midpoint_rate_unchecked(sample: &CensoredSample, kappa: f64) -> f64 {
    let mut exposure = 0.0;
    let mut d = 0.0;
    for i in 0..sample.len() {
        let x = sample.failures()[i] as f64;
        let w = sample.withdrawals()[i] as f64;
        let t = sample.boundaries()[i];
        let mid = 0.5 * (sample.lower(i) + t);
        exposure += x * mid.powf(kappa) + w * t.powf(kappa);
        d += x;
    }
    d / exposure
}

/// Starting values from the midpoint approximation: failures are treated
/// as exact at their interval midpoints and withdrawals as right-censored
/// at the inspection time. The shape maximises the profile pseudo
/// log-likelihood on `[MIN_SHAPE, MAX_SHAPE]`.
pub fn midpoint_initial_estimates(sample: &CensoredSample) -> Result<WeibullParams> {
    sample.require_failures()?;
    let d = sample.total_failures() as f64;
    let sum_x_ln_mid: f64 = (0..sample.len())
        .map(|i| {
            let mid = 0.5 * (sample.lower(i) + sample.boundaries()[i]);
            sample.failures()[i] as f64 * mid.ln()
        })
        .sum();
    let profile = |kappa: f64| {
        let tau = midpoint_rate_unchecked(sample, kappa);
        d * kappa.ln() + d * tau.ln() + (kappa - 1.0) * sum_x_ln_mid - d
    };
    let best = maximize_bounded(profile, MIN_SHAPE, MAX_SHAPE, 1e-10);
    WeibullParams::new(best.x, midpoint_rate_unchecked(sample, best.x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use alloc::vec;

    #[test]
    fn sample_validation() {
        assert!(CensoredSample::new(vec![1.0, 2.0], vec![1, 2], vec![0, 1], 4).is_ok());
        assert!(CensoredSample::new(vec![1.0, 2.0], vec![1, 2], vec![0, 1], 5).is_err());
        assert!(CensoredSample::new(vec![2.0, 2.0], vec![1, 2], vec![0, 1], 4).is_err());
        assert!(CensoredSample::new(vec![0.0, 2.0], vec![1, 2], vec![0, 1], 4).is_err());
        assert!(CensoredSample::new(vec![1.0], vec![1, 2], vec![0], 3).is_err());
        assert!(CensoredSample::new(vec![1.0, f64::NAN], vec![1, 2], vec![0, 1], 4).is_err());
        assert_eq!(CensoredSample::from_counts(vec![1.0], vec![3], vec![1]).unwrap().n(), 4);
    }

    #[test]
    fn scheme_validation() {
        assert!(CensoringScheme::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.5, 0.0, 0.0, 1.0]).is_ok());
        assert!(CensoringScheme::new(vec![1.0, 2.0], vec![0.5, 0.9]).is_err());
        assert!(CensoringScheme::new(vec![1.0, 2.0], vec![-0.1, 1.0]).is_err());
        assert!(CensoringScheme::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }

    #[test]
    fn certain_failure() {
        let params = WeibullParams::new(1.0, 1.0).unwrap();
        let scheme = CensoringScheme::new(vec![100.0], vec![1.0]).unwrap();
        let s = generate_sample(&params, &scheme, 25, &mut stream_rng(1, 0));
        assert_eq!(s.failures(), &[25]);
        assert_eq!(s.withdrawals(), &[0]);
    }

    #[test]
    fn no_early_withdrawals_when_proportions_zero() {
        let params = WeibullParams::new(0.75, 0.052).unwrap();
        let scheme = CensoringScheme::no_early_withdrawal(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut rng = stream_rng(2, 0);
        for _ in 0..200 {
            let s = generate_sample(&params, &scheme, 50, &mut rng);
            assert!(s.withdrawals()[..3].iter().all(|&w| w == 0));
            assert_eq!(s.failures().iter().sum::<u64>() + s.withdrawals()[3], 50);
        }
    }

    #[test]
    fn scheme_recovered_from_sample_regenerates_withdrawals() {
        let s = CensoredSample::new(vec![1.0, 2.0, 3.0], vec![3, 2, 1], vec![1, 7, 2], 16).unwrap();
        let scheme = CensoringScheme::from_sample(&s);
        assert_eq!(scheme.proportions(), &[1.0 / 13.0, 7.0 / 10.0, 1.0]);
        // With the same failures the floor rule reproduces W exactly.
        let mut alive = 16u64;
        for i in 0..3 {
            let after = alive - s.failures()[i];
            let w = ((scheme.proportions()[i] * after as f64) + 1e-9).floor() as u64;
            assert_eq!(w.min(after), s.withdrawals()[i]);
            alive = after - w.min(after);
        }
    }

    #[test]
    fn moments_single_interval() {
        let s = CensoredSample::new(vec![1.0], vec![3], vec![1], 4).unwrap();
        let f = f_hat_moments(&s);
        assert!((f[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn moments_defined_with_zero_failures() {
        let s = CensoredSample::new(vec![1.0, 2.0, 3.0], vec![0, 0, 2], vec![0, 1, 3], 6).unwrap();
        let f = f_hat_moments(&s);
        assert!(f.iter().all(|&v| v > 0.0 && v < 1.0 && v.is_finite()));
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn km_examples() {
        let s = CensoredSample::new(vec![1.0, 2.0], vec![2, 3], vec![1, 4], 10).unwrap();
        let f = f_hat_km(&s).unwrap();
        assert!((f[0] - 0.2).abs() < 1e-15);
        assert!((f[1] - (0.2 + 0.8 * 3.0 / 7.0)).abs() < 1e-15);

        let all_fail = CensoredSample::new(vec![1.0], vec![5], vec![0], 5).unwrap();
        assert!(matches!(f_hat_km(&all_fail), Err(Error::CdfDegenerate { index: 0, .. })));

        let none_first = CensoredSample::new(vec![1.0, 2.0], vec![0, 3], vec![0, 2], 5).unwrap();
        assert!(matches!(f_hat_km(&none_first), Err(Error::CdfDegenerate { index: 0, .. })));
    }

    #[test]
    fn midpoint_rate_closed_form_at_unit_shape() {
        let s = CensoredSample::new(vec![2.0], vec![3], vec![2], 5).unwrap();
        // tau(1) = 3 / (3 * 1 + 2 * 2)
        assert!((midpoint_rate(&s, 1.0).unwrap() - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_requires_failures() {
        let s = CensoredSample::new(vec![1.0, 2.0], vec![0, 0], vec![1, 3], 4).unwrap();
        assert_eq!(midpoint_initial_estimates(&s), Err(Error::NoFailures));
        assert_eq!(midpoint_rate(&s, 1.0), Err(Error::NoFailures));
    }

    #[test]
    fn early_termination_detection() {
        let s = CensoredSample::new(vec![1.0, 2.0, 3.0], vec![4, 1, 0], vec![0, 0, 0], 5).unwrap();
        assert!(s.terminates_early());
        let s = CensoredSample::new(vec![1.0, 2.0, 3.0], vec![4, 0, 1], vec![0, 0, 0], 5).unwrap();
        assert!(!s.terminates_early());
    }
}
