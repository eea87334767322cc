//! Stationary bootstrap standard errors.
//!
//! A resample is built by concatenating blocks `x_I … x_{I+L-1}` with `I`
//! uniform on the positions, `L ~ Geometric(p)` on `{1, 2, …}` and indices
//! wrapping around the end of the sequence, then truncating to the original
//! length.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{EntropyEstimate, Estimator};
use crate::markov::Sequence;
use crate::rng::substream;

/// Lower clamp for the block-continuation parameter.
pub const MIN_P: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub p: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn new(p: f64, replicates: usize, seed: u64) -> Result<Self> {
        let config = Self { p, replicates, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter(format!("bootstrap p = {} is outside (0, 1]", self.p)));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidParameter("at least two bootstrap replicates are needed".into()));
        }
        Ok(())
    }
}

/// How replicates whose estimator fails are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicatePolicy {
    /// Record a reducible eigenvector or limit estimate as 0 bits.
    #[default]
    Zero,
    /// Leave failed replicates out and report how many there were.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PChoice {
    pub p: f64,
    pub warning: Option<String>,
}

/// `p = Ĥ / log₂ n`, so that the mean block length `1/p` matches the mean
/// Lempel-Ziv phrase length `log₂ n / Ĥ`. Clamped to `[1e-6, 1]`.
pub fn choose_p(h_hat: f64, n: usize) -> PChoice {
    let raw = if n >= 2 { h_hat / (n as f64).log2() } else { f64::NAN };
    if raw.is_nan() || raw < MIN_P {
        PChoice {
            p: MIN_P,
            warning: Some(format!("p = {raw:.3e} from Ĥ = {h_hat} and n = {n} clamped to {MIN_P:e}")),
        }
    } else if raw > 1.0 {
        PChoice {
            p: 1.0,
            warning: Some(format!("p = {raw:.4} from Ĥ = {h_hat} and n = {n} clamped to 1")),
        }
    } else {
        PChoice { p: raw, warning: None }
    }
}

/// One block length, `Geometric(p)` on `{1, 2, …}` with mean `1/p`.
pub fn sample_block_length<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<usize> {
    let geometric = Geometric::new(p)
        .map_err(|e| Error::InvalidParameter(format!("bootstrap p = {p}: {e}")))?;
    Ok(geometric.sample(rng).saturating_add(1) as usize)
}

/// Copy `len` symbols starting at `start`, wrapping around the end.
pub fn wrapped_block(states: &[u32], start: usize, len: usize) -> Vec<u32> {
    (0..len).map(|k| states[(start + k) % states.len()]).collect()
}

pub fn stationary_bootstrap_sample<R: Rng + ?Sized>(seq: &Sequence, p: f64, rng: &mut R) -> Result<Sequence> {
    let states = seq.states();
    let n = states.len();
    let geometric = Geometric::new(p)
        .map_err(|e| Error::InvalidParameter(format!("bootstrap p = {p}: {e}")))?;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let start = rng.random_range(0..n);
        let len = (geometric.sample(rng).saturating_add(1) as usize).min(n - out.len());
        out.extend((0..len).map(|k| states[(start + k) % n]));
    }
    Sequence::new(out, seq.kappa())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// Estimate on the original sequence.
    pub point: EntropyEstimate,
    /// Replicate estimates in replicate order; failed replicates are either
    /// zero or absent depending on the policy.
    pub estimates: Vec<f64>,
    /// Sample standard deviation of `estimates` (divisor `B - 1`).
    pub standard_error: f64,
    pub p_used: f64,
    pub estimator: Estimator,
    pub replicates: usize,
    /// Replicates recorded as zero after a reducible estimate.
    pub zeroed: usize,
    /// Replicates left out after a failure.
    pub dropped: usize,
}

pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Bootstrap standard error of `estimator` on `seq`. Replicate `b` draws from
/// sub-stream `b` of `config.seed`, so results do not depend on how the work
/// is scheduled.
pub fn bootstrap_se(
    seq: &Sequence,
    estimator: &Estimator,
    config: &BootstrapConfig,
    policy: ReplicatePolicy,
) -> Result<BootstrapResult> {
    config.validate()?;
    if seq.len() < 2 {
        return Err(Error::TooShort("bootstrap needs at least two observations".into()));
    }
    let point = estimator.estimate(seq)?;
    let replicate_estimator = match policy {
        ReplicatePolicy::Zero => estimator.with_zero_on_reducible(true),
        ReplicatePolicy::Drop => *estimator,
    };
    let outcomes: Vec<Result<EntropyEstimate>> = (0..config.replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(config.seed, b as u64);
            let sample = stationary_bootstrap_sample(seq, config.p, &mut rng)?;
            replicate_estimator.estimate(&sample)
        })
        .collect();

    let mut estimates = Vec::with_capacity(config.replicates);
    let (mut zeroed, mut dropped) = (0, 0);
    for outcome in outcomes {
        match outcome {
            Ok(e) => {
                if e.warnings.iter().any(|w| w.starts_with("reducible")) {
                    zeroed += 1;
                }
                estimates.push(e.value);
            }
            Err(err) if policy == ReplicatePolicy::Zero && err.is_numeric() => {
                zeroed += 1;
                estimates.push(0.0);
            }
            Err(_) => dropped += 1,
        }
    }
    if estimates.len() < 2 {
        return Err(Error::Numerical(format!(
            "only {} of {} bootstrap replicates produced an estimate",
            estimates.len(),
            config.replicates
        )));
    }
    Ok(BootstrapResult {
        point,
        standard_error: sample_sd(&estimates),
        estimates,
        p_used: config.p,
        estimator: *estimator,
        replicates: config.replicates,
        zeroed,
        dropped,
    })
}
