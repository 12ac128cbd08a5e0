//! Result types shared by every estimator.

use alloc::format;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::distribution::{cv_k, cv_p, WeibullParams};
use crate::error::{Error, Result};

/// The four quantities of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Kappa,
    Tau,
    CvP,
    CvK,
}

impl Parameter {
    pub const ALL: [Parameter; 4] = [Parameter::Kappa, Parameter::Tau, Parameter::CvP, Parameter::CvK];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Kappa => "kappa",
            Parameter::Tau => "tau",
            Parameter::CvP => "cv_p",
            Parameter::CvK => "cv_k",
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One value per [`Parameter`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ByParameter<T> {
    pub kappa: T,
    pub tau: T,
    pub cv_p: T,
    pub cv_k: T,
}

impl<T> ByParameter<T> {
    pub fn get(&self, p: Parameter) -> &T {
        match p {
            Parameter::Kappa => &self.kappa,
            Parameter::Tau => &self.tau,
            Parameter::CvP => &self.cv_p,
            Parameter::CvK => &self.cv_k,
        }
    }

    pub fn get_mut(&mut self, p: Parameter) -> &mut T {
        match p {
            Parameter::Kappa => &mut self.kappa,
            Parameter::Tau => &mut self.tau,
            Parameter::CvP => &mut self.cv_p,
            Parameter::CvK => &mut self.cv_k,
        }
    }

    pub fn map<U, F: FnMut(Parameter, &T) -> U>(&self, mut f: F) -> ByParameter<U> {
        ByParameter {
            kappa: f(Parameter::Kappa, &self.kappa),
            tau: f(Parameter::Tau, &self.tau),
            cv_p: f(Parameter::CvP, &self.cv_p),
            cv_k: f(Parameter::CvK, &self.cv_k),
        }
    }

    pub fn try_map<U, F: FnMut(Parameter, &T) -> Result<U>>(&self, mut f: F) -> Result<ByParameter<U>> {
        Ok(ByParameter {
            kappa: f(Parameter::Kappa, &self.kappa)?,
            tau: f(Parameter::Tau, &self.tau)?,
            cv_p: f(Parameter::CvP, &self.cv_p)?,
            cv_k: f(Parameter::CvK, &self.cv_k)?,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (Parameter, &T)> {
        Parameter::ALL.into_iter().map(move |p| (p, self.get(p)))
    }
}

/// Point estimates of `(kappa, tau, CV_p, CV_k)` from one method.
pub type EstimateSet = ByParameter<f64>;

impl EstimateSet {
    /// Plug-in estimates: the CVs are functions of the shape alone.
    pub fn from_params(params: &WeibullParams) -> Result<Self> {
        Ok(Self { kappa: params.kappa(), tau: params.tau(), cv_p: cv_p(params.kappa())?, cv_k: cv_k(params.kappa())? })
    }
}

/// A two-sided interval at a nominal coverage level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl IntervalEstimate {
    pub fn new(lower: f64, upper: f64, level: f64) -> Result<Self> {
        check_level(level)?;
        if !(lower <= upper) {
            return Err(Error::Domain(format!("interval bounds out of order: [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper, level })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Intervals for all four parameters from one method.
pub type IntervalSet = ByParameter<IntervalEstimate>;

pub(crate) fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("confidence level must lie in (0, 1), got {level}")))
    }
}
