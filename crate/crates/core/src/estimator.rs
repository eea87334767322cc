//! A common front for the direct and Lempel-Ziv estimators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::direct::{self, ReduciblePolicy, StationaryMethod, DEFAULT_LIMIT_STEPS};
use crate::error::{Error, Result};
use crate::markov::Sequence;
use crate::swlz;

/// Which estimator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DirectEmpirical,
    DirectEigen,
    DirectLimit,
    Swlz,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DirectEmpirical => "direct_empirical",
            Method::DirectEigen => "direct_eigen",
            Method::DirectLimit => "direct_limit",
            Method::Swlz => "swlz",
        })
    }
}

/// An entropy-rate point estimate in bits per symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: Method,
    /// Assumed Markov order; absent for the Lempel-Ziv estimator.
    pub order: Option<usize>,
    pub n_obs: usize,
    /// Whether the estimated transition matrix was irreducible. Absent for
    /// the Lempel-Ziv estimator, which never builds one.
    pub irreducible: Option<bool>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

fn default_steps() -> usize {
    DEFAULT_LIMIT_STEPS
}

/// Estimator descriptor, as used by the bootstrap, the experiment runner and
/// the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Estimator {
    Empirical {
        order: usize,
    },
    Eigen {
        order: usize,
        /// Report 0 with a warning instead of failing on a reducible estimate.
        #[serde(default)]
        zero_on_reducible: bool,
    },
    Limit {
        order: usize,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default)]
        zero_on_reducible: bool,
    },
    Swlz,
}

impl Estimator {
    pub fn method(&self) -> Method {
        match self {
            Estimator::Empirical { .. } => Method::DirectEmpirical,
            Estimator::Eigen { .. } => Method::DirectEigen,
            Estimator::Limit { .. } => Method::DirectLimit,
            Estimator::Swlz => Method::Swlz,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match *self {
            Estimator::Empirical { order }
            | Estimator::Eigen { order, .. }
            | Estimator::Limit { order, .. } => Some(order),
            Estimator::Swlz => None,
        }
    }

    /// Same estimator with the reducible-to-zero mode switched on or off.
    /// Only the eigenvector and limit estimators are affected.
    pub fn with_zero_on_reducible(self, on: bool) -> Self {
        match self {
            Estimator::Eigen { order, .. } => Estimator::Eigen { order, zero_on_reducible: on },
            Estimator::Limit { order, steps, .. } => Estimator::Limit { order, steps, zero_on_reducible: on },
            other => other,
        }
    }

    /// Short label such as `empirical(m=2)` or `swlz`.
    pub fn label(&self) -> String {
        match self {
            Estimator::Empirical { order } => format!("empirical(m={order})"),
            Estimator::Eigen { order, .. } => format!("eigen(m={order})"),
            Estimator::Limit { order, .. } => format!("limit(m={order})"),
            Estimator::Swlz => "swlz".to_string(),
        }
    }

    fn direct_parts(&self) -> Option<(usize, StationaryMethod, ReduciblePolicy)> {
        let policy = |zero: bool| if zero { ReduciblePolicy::Zero } else { ReduciblePolicy::Error };
        match *self {
            Estimator::Empirical { order } => {
                Some((order, StationaryMethod::Empirical, ReduciblePolicy::Error))
            }
            Estimator::Eigen { order, zero_on_reducible } => {
                Some((order, StationaryMethod::Eigen, policy(zero_on_reducible)))
            }
            Estimator::Limit { order, steps, zero_on_reducible } => {
                Some((order, StationaryMethod::Limit { steps }, policy(zero_on_reducible)))
            }
            Estimator::Swlz => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Estimator::Empirical { order } | Estimator::Eigen { order, .. } if order == 0 => {
                Err(Error::InvalidParameter("order must be at least 1".into()))
            }
            Estimator::Limit { order, steps, .. } if order == 0 || steps == 0 => {
                Err(Error::InvalidParameter("order and steps must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn estimate(&self, seq: &Sequence) -> Result<EntropyEstimate> {
        self.validate()?;
        match self.direct_parts() {
            Some((order, method, policy)) => direct::estimate_direct(seq, order, method, policy),
            None => swlz::swlz_entropy(seq),
        }
    }

    /// Estimate from several observation windows of one process. Direct
    /// estimators pool within-window transitions only; the Lempel-Ziv
    /// estimator sees the windows concatenated.
    pub fn estimate_segments(&self, segments: &[Sequence]) -> Result<EntropyEstimate> {
        self.validate()?;
        match self.direct_parts() {
            Some((order, method, policy)) => {
                direct::estimate_direct_segments(segments, order, method, policy)
            }
            None => {
                let kappa = segments.first().map(Sequence::kappa).ok_or(Error::NoTransitions)?;
                let states: Vec<u32> =
                    segments.iter().flat_map(|s| s.states().iter().copied()).collect();
                swlz::swlz_entropy(&Sequence::new(states, kappa)?)
            }
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
