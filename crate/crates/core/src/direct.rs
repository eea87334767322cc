//! Plug-in estimation of the entropy rate from an estimated transition
//! matrix and stationary distribution.
//!
//! Three stationary estimators are provided:
//!
//! - [`stationary_empirical`]: row-total frequencies `n_{i+} / n_{++}`;
//! - [`stationary_eigen`]: the left unit eigenvector of the transition matrix;
//! - [`stationary_limit`]: the Cesàro average of the first row of `Pⁱ`.
//!
//! The eigenvector and limit estimators require an irreducible matrix. Short
//! sequences from sticky chains often produce reducible estimates (a state
//! that was never left looks absorbing); [`ReduciblePolicy::Zero`] reports
//! such estimates as 0 bits with a warning instead of failing.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimator::{EntropyEstimate, Method};
use crate::markov::{
    count_segments, embed_order, ProbabilityVector, Sequence, TransitionCounts, TransitionMatrix,
};

/// Residual bound `‖πP − π‖∞` for the eigenvector solution.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Matrices up to this size are solved directly; larger ones iterate.
const DIRECT_SOLVE_LIMIT: usize = 512;

pub const DEFAULT_LIMIT_STEPS: usize = 100_000;

/// Convergence bound for the Cesàro average, `‖avg_N − avg_{N/2}‖∞`.
pub const LIMIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryMethod {
    Empirical,
    Eigen,
    Limit { steps: usize },
}

impl StationaryMethod {
    fn tag(&self) -> Method {
        match self {
            StationaryMethod::Empirical => Method::DirectEmpirical,
            StationaryMethod::Eigen => Method::DirectEigen,
            StationaryMethod::Limit { .. } => Method::DirectLimit,
        }
    }
}

/// What to do when the stationary estimator meets a reducible matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReduciblePolicy {
    #[default]
    Error,
    /// Report a zero estimate with a warning.
    Zero,
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(dist: &ProbabilityVector) -> f64 {
    entropy_bits(dist.as_slice().iter().copied())
}

fn entropy_bits(probs: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = probs.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum();
    h.max(0.0)
}

pub fn stationary_empirical(counts: &TransitionCounts) -> Result<ProbabilityVector> {
    let total = counts.grand_total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    ProbabilityVector::from_weights(counts.row_totals().iter().map(|&n| n as f64).collect())
}

/// `‖πP − π‖∞`.
pub fn fixed_point_residual(p: &TransitionMatrix, pi: &ProbabilityVector) -> f64 {
    p.left_multiply(pi.as_slice())
        .iter()
        .zip(pi.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Left eigenvector of `P` for eigenvalue 1, normalised to sum to one.
///
/// Irreducibility is checked first: a reducible matrix (including one with
/// undefined rows) either has several unit eigenvectors or none that is a
/// valid stationary distribution of the observed states.
pub fn stationary_eigen(p: &TransitionMatrix) -> Result<ProbabilityVector> {
    if let Some(reason) = p.reducibility() {
        return Err(Error::Reducible(reason));
    }
    let n = p.size();
    let start = if n <= DIRECT_SOLVE_LIMIT {
        direct_solve(p)?
    } else {
        vec![1.0 / n as f64; n]
    };
    let pi = ProbabilityVector::from_weights(start.iter().map(|&x| x.max(0.0)).collect())?;
    if fixed_point_residual(p, &pi) < EIGEN_RESIDUAL {
        return Ok(pi);
    }
    refine(p, pi)
}

/// Solve `(Pᵀ − I) v = 0` with the last equation replaced by `Σ v = 1`.
fn direct_solve(p: &TransitionMatrix) -> Result<Vec<f64>> {
    let n = p.size();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for &(j, pij) in p.row(i) {
            a[(j as usize, i)] += pij;
        }
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let v = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular system for the stationary distribution".into()))?;
    Ok(v.iter().copied().collect())
}

/// Lazy power iteration `v ← (v + vP) / 2`; the lazy chain is aperiodic and
/// shares the stationary distribution of `P`.
fn refine(p: &TransitionMatrix, mut pi: ProbabilityVector) -> Result<ProbabilityVector> {
    const MAX_SWEEPS: usize = 1_000_000;
    for _ in 0..MAX_SWEEPS {
        let step = p.left_multiply(pi.as_slice());
        let lazy: Vec<f64> = step.iter().zip(pi.as_slice()).map(|(a, b)| 0.5 * (a + b)).collect();
        pi = ProbabilityVector::from_weights(lazy)?;
        if fixed_point_residual(p, &pi) < EIGEN_RESIDUAL {
            return Ok(pi);
        }
    }
    Err(Error::Numerical(format!(
        "stationary distribution did not reach residual {EIGEN_RESIDUAL}"
    )))
}

/// Cesàro estimate together with its convergence diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub pi: ProbabilityVector,
    /// `‖avg_N − avg_{⌊N/2⌋}‖∞`; zero when `N = 1`.
    pub delta: f64,
    pub converged: bool,
}

/// `(1/N) Σ_{i=1}^{N} Pⁱ(α_1, ·)`, computed with vector-matrix products on the
/// first row only.
pub fn stationary_limit(p: &TransitionMatrix, steps: usize) -> Result<ProbabilityVector> {
    stationary_limit_checked(p, steps).map(|l| l.pi)
}

pub fn stationary_limit_checked(p: &TransitionMatrix, steps: usize) -> Result<LimitEstimate> {
    if steps == 0 {
        return Err(Error::InvalidParameter("the Cesàro average needs at least one step".into()));
    }
    if let Some(reason) = p.reducibility() {
        return Err(Error::Reducible(reason));
    }
    let n = p.size();
    let half = steps / 2;
    let mut row = vec![0.0; n];
    row[0] = 1.0;
    let mut sum = vec![0.0; n];
    let mut half_sum = None;
    for i in 1..=steps {
        row = p.left_multiply(&row);
        let mass: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= mass);
        sum.iter_mut().zip(&row).for_each(|(s, x)| *s += x);
        if i == half {
            half_sum = Some(sum.clone());
        }
    }
    let avg: Vec<f64> = sum.iter().map(|s| s / steps as f64).collect();
    let delta = match half_sum {
        Some(h) => avg
            .iter()
            .zip(&h)
            .map(|(a, s)| (a - s / half as f64).abs())
            .fold(0.0, f64::max),
        None => 0.0,
    };
    Ok(LimitEstimate {
        pi: ProbabilityVector::from_weights(avg)?,
        delta,
        converged: delta < LIMIT_TOLERANCE,
    })
}

/// `-Σ_i π_i Σ_j P_ij log₂ P_ij` in bits per step.
///
/// Rows with zero weight contribute nothing, whether or not they are
/// defined. An undefined row with positive weight is an error.
pub fn entropy_rate(p: &TransitionMatrix, pi: &ProbabilityVector) -> Result<f64> {
    if p.size() != pi.len() {
        return Err(Error::DimensionMismatch { expected: p.size(), found: pi.len() });
    }
    let mut rate = 0.0;
    for (i, &w) in pi.as_slice().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        if !p.is_defined(i) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} is undefined but has stationary weight {w}"
            )));
        }
        rate += w * entropy_bits(p.row(i).iter().map(|&(_, pij)| pij));
    }
    Ok(rate.max(0.0))
}

/// Entropy rate of a sequence under an assumed order `m`.
pub fn estimate_direct(
    seq: &Sequence,
    order: usize,
    method: StationaryMethod,
    policy: ReduciblePolicy,
) -> Result<EntropyEstimate> {
    estimate_direct_segments(std::slice::from_ref(seq), order, method, policy)
}

/// As [`estimate_direct`], pooling the transitions observed inside each
/// segment. Segments must share an alphabet.
pub fn estimate_direct_segments(
    segments: &[Sequence],
    order: usize,
    method: StationaryMethod,
    policy: ReduciblePolicy,
) -> Result<EntropyEstimate> {
    if order == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    let n_obs: usize = segments.iter().map(Sequence::len).sum();
    let embedded = segments
        .iter()
        .filter(|s| s.len() > order)
        .map(|s| embed_order(s, order).map(|e| e.sequence))
        .collect::<Result<Vec<_>>>()?;
    if embedded.is_empty() {
        let longest = segments.iter().map(Sequence::len).max().unwrap_or(0);
        return Err(Error::InsufficientLength { order, len: longest });
    }
    let full = count_segments(&embedded)?;
    // States that never occur carry no information and only make the
    // estimated matrix trivially reducible.
    let observed = full.observed_states();
    let counts = full.restrict(&observed)?;
    let p = TransitionMatrix::mle(&counts)?;
    let irreducible = p.is_irreducible();

    let mut warnings = Vec::new();
    let pi = match method {
        StationaryMethod::Empirical => stationary_empirical(&counts),
        StationaryMethod::Eigen => stationary_eigen(&p),
        StationaryMethod::Limit { steps } => stationary_limit_checked(&p, steps).map(|l| {
            if !l.converged {
                warnings.push(format!(
                    "Cesàro average not converged after {steps} steps (change {:.3e} over the last half)",
                    l.delta
                ));
            }
            l.pi
        }),
    };
    let estimate = |value: f64, warnings: Vec<String>| EntropyEstimate {
        value,
        method: method.tag(),
        order: Some(order),
        n_obs,
        irreducible: Some(irreducible),
        warnings,
    };
    let pi = match (pi, policy) {
        (Ok(pi), _) => pi,
        (Err(Error::Reducible(reason)), ReduciblePolicy::Zero) => {
            warnings.push(format!("reducible transition matrix ({reason}); reporting 0"));
            return Ok(estimate(0.0, warnings));
        }
        (Err(e), _) => return Err(e),
    };
    let never_left: Vec<usize> = p
        .undefined_rows()
        .into_iter()
        .filter(|&i| pi.get(i) == 0.0)
        .map(|i| observed[i])
        .collect();
    if !never_left.is_empty() {
        warnings.push(format!(
            "states {never_left:?} were never left; their rows contribute nothing"
        ));
    }
    let value = entropy_rate(&p, &pi)?;
    Ok(estimate(value, warnings))
}
