//! Two-parameter Weibull distribution in the shape/rate form
//! `F(t) = 1 - exp(-tau * t^kappa)` and its coefficients of variation.
//!
//! Both coefficients depend on the shape only, through the gamma ratio
//! `r(kappa) = Gamma(1 + 2/kappa) / Gamma(1 + 1/kappa)^2`:
//!
//! ```text
//! CV_p = sqrt(r - 1)          (Pearson: sd / mean)
//! CV_k = sqrt(1 - 1/r)        (Kvalseth: sd / sqrt(E[T^2]))
//! ```
//!
//! The ratio is evaluated in log space and the square-root arguments through
//! `expm1`, so nothing overflows and large shapes keep their digits.

use alloc::format;
#[allow(unused_imports)] // unused when std is in the build graph
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{digamma_unchecked, ln_gamma_unchecked};

/// Smallest shape accepted by the coefficient-of-variation routines.
pub const MIN_SHAPE: f64 = 0.05;

/// Shape `kappa` and rate `tau` of a Weibull lifetime distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct WeibullParams {
    kappa: f64,
    tau: f64,
}

#[derive(Deserialize)]
struct RawParams {
    kappa: f64,
    tau: f64,
}

impl TryFrom<RawParams> for WeibullParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        WeibullParams::new(raw.kappa, raw.tau)
    }
}

impl WeibullParams {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite() && tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!(
                "Weibull parameters must be finite and positive (kappa={kappa}, tau={tau})"
            )));
        }
        Ok(Self { kappa, tau })
    }

    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Scale parameter `eta` of the `(t/eta)^kappa` parameterisation.
    pub fn scale(&self) -> f64 {
        self.tau.powf(-1.0 / self.kappa)
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("cdf needs a finite t >= 0, got {t}")));
        }
        Ok(self.cdf_unchecked(t))
    }

    #[inline]
    pub(crate) fn cdf_unchecked(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        -(-self.tau * t.powf(self.kappa)).exp_m1()
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("pdf needs a finite t > 0, got {t}")));
        }
        let tk = t.powf(self.kappa);
        Ok(self.kappa * self.tau * tk / t * (-self.tau * tk).exp())
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile needs p in [0,1), got {p}")));
        }
        Ok((-(-p).ln_1p() / self.tau).powf(1.0 / self.kappa))
    }

    pub fn cv_p(&self) -> Result<f64> {
        cv_p(self.kappa)
    }

    pub fn cv_k(&self) -> Result<f64> {
        cv_k(self.kappa)
    }
}

fn check_shape(kappa: f64) -> Result<()> {
    if kappa.is_nan() || kappa < MIN_SHAPE || !kappa.is_finite() {
        return Err(Error::ShapeOutOfRange { kappa, min: MIN_SHAPE });
    }
    Ok(())
}

/// `ln r(kappa)`; positive for every kappa > 0.
#[inline]
fn ln_gamma_ratio(kappa: f64) -> f64 {
    ln_gamma_unchecked(1.0 + 2.0 / kappa) - 2.0 * ln_gamma_unchecked(1.0 + 1.0 / kappa)
}

/// `(CV_p, CV_k)` without the shape guard. Used for MCMC states, which may
/// wander below [`MIN_SHAPE`] where the log-space evaluation is still fine.
pub(crate) fn cv_pair_unchecked(kappa: f64) -> (f64, f64) {
    let lr = ln_gamma_ratio(kappa);
    (lr.exp_m1().sqrt(), (-(-lr).exp_m1()).sqrt())
}

/// Pearson coefficient of variation of a Weibull with shape `kappa`.
pub fn cv_p(kappa: f64) -> Result<f64> {
    check_shape(kappa)?;
    Ok(ln_gamma_ratio(kappa).exp_m1().sqrt())
}

/// Kvalseth coefficient of variation of a Weibull with shape `kappa`.
pub fn cv_k(kappa: f64) -> Result<f64> {
    check_shape(kappa)?;
    Ok((-(-ln_gamma_ratio(kappa)).exp_m1()).sqrt())
}

/// `Psi(1 + 1/kappa) - Psi(1 + 2/kappa)`, the common factor of both slopes.
#[inline]
fn digamma_gap(kappa: f64) -> f64 {
    digamma_unchecked(1.0 + 1.0 / kappa) - digamma_unchecked(1.0 + 2.0 / kappa)
}

/// `d CV_p / d kappa = Gamma(1+2/k) [Psi(1+1/k) - Psi(1+2/k)] / (k^2 CV_p Gamma(1+1/k)^2)`.
pub fn cv_p_dkappa(kappa: f64) -> Result<f64> {
    let cv = cv_p(kappa)?;
    let r = ln_gamma_ratio(kappa).exp();
    Ok(r * digamma_gap(kappa) / (kappa * kappa * cv))
}

/// `d CV_k / d kappa = Gamma(1+1/k)^2 [Psi(1+1/k) - Psi(1+2/k)] / (k^2 CV_k Gamma(1+2/k))`.
pub fn cv_k_dkappa(kappa: f64) -> Result<f64> {
    let cv = cv_k(kappa)?;
    let r_inv = (-ln_gamma_ratio(kappa)).exp();
    Ok(r_inv * digamma_gap(kappa) / (kappa * kappa * cv))
}
