//! Ground-truth chains and the Monte Carlo experiment runner.
//!
//! Besides first-order simulation this module carries the two-state
//! second-order family used to study order misspecification. Its 4×4
//! composite matrix is indexed by the pair (previous, current) in the order
//! `AA, AB, BA, BB`:
//!
//! ```text
//!        AA    AB    BA    BB
//! AA  [ 1-a    a     0     0  ]
//! AB  [  0     0     b    1-b ]
//! BA  [ 1-c    c     0     0  ]
//! BB  [  0     0     d    1-d ]
//! ```
//!
//! Note that this is the opposite digit order from [`crate::markov::embed_order`];
//! entropy rates do not depend on the labelling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_se, choose_p, BootstrapConfig, ReplicatePolicy};
use crate::direct::{entropy_rate, stationary_eigen};
use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::markov::{ProbabilityVector, Sequence, TransitionMatrix};
use crate::rng::{child_seed, substream};

/// Starting state of a simulated chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Draw `x_0` from the stationary distribution.
    Stationary,
    State(usize),
    Distribution(ProbabilityVector),
}

fn draw(entries: impl Iterator<Item = (usize, f64)>, rng: &mut (impl Rng + ?Sized)) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (j, p) in entries {
        acc += p;
        last = j;
        if u < acc {
            return j;
        }
    }
    last
}

/// Simulate `n` observations by inverse-CDF sampling from the rows of `p`.
pub fn simulate_chain<R: Rng + ?Sized>(
    p: &TransitionMatrix,
    n: usize,
    init: Init,
    rng: &mut R,
) -> Result<Sequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("cannot simulate an empty sequence".into()));
    }
    let undefined = p.undefined_rows();
    if !undefined.is_empty() {
        return Err(Error::InvalidMatrix(format!("rows {undefined:?} are undefined")));
    }
    let first = match init {
        Init::State(s) if s < p.size() => s,
        Init::State(s) => return Err(Error::StateOutOfRange { state: s, kappa: p.size() }),
        Init::Distribution(d) if d.len() == p.size() => {
            draw(d.as_slice().iter().copied().enumerate(), rng)
        }
        Init::Distribution(d) => {
            return Err(Error::DimensionMismatch { expected: p.size(), found: d.len() })
        }
        Init::Stationary => {
            let pi = stationary_eigen(p)?;
            draw(pi.as_slice().iter().copied().enumerate(), rng)
        }
    };
    let mut states = Vec::with_capacity(n);
    let mut current = first;
    states.push(current as u32);
    for _ in 1..n {
        current = draw(p.row(current).iter().map(|&(j, q)| (j as usize, q)), rng);
        states.push(current as u32);
    }
    Sequence::new(states, p.size())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    /// Sticky chain: `P_ii = diag`, the rest spread evenly.
    Low,
    /// Every entry `1/κ`.
    High,
    /// The built-in 8-state matrix [`MEDIUM_BUILTIN`].
    #[serde(alias = "medium-builtin", alias = "medium_builtin")]
    Medium,
}

/// An 8-state matrix with heterogeneous rows (row entropies from about 0.79
/// to 2.16 bits, entropy rate about 1.488 bits). It is a stand-in for an
/// intermediate-entropy benchmark and does not reproduce any published
/// matrix.
pub const MEDIUM_BUILTIN: [[f64; 8]; 8] = [
    [0.84, 0.10, 0.06, 0.00, 0.00, 0.00, 0.00, 0.00],
    [0.00, 0.70, 0.20, 0.10, 0.00, 0.00, 0.00, 0.00],
    [0.05, 0.00, 0.60, 0.25, 0.10, 0.00, 0.00, 0.00],
    [0.00, 0.10, 0.00, 0.55, 0.20, 0.10, 0.05, 0.00],
    [0.05, 0.00, 0.05, 0.00, 0.50, 0.20, 0.10, 0.10],
    [0.10, 0.05, 0.00, 0.05, 0.00, 0.50, 0.20, 0.10],
    [0.10, 0.00, 0.05, 0.00, 0.05, 0.10, 0.50, 0.20],
    [0.20, 0.05, 0.05, 0.00, 0.05, 0.05, 0.10, 0.50],
];

pub fn benchmark_matrix(kind: BenchmarkKind, kappa: usize, diag: f64) -> Result<TransitionMatrix> {
    match kind {
        BenchmarkKind::Low => {
            if kappa < 2 {
                return Err(Error::InvalidParameter("the low-entropy benchmark needs κ ≥ 2".into()));
            }
            if !(0.0..=1.0).contains(&diag) {
                return Err(Error::InvalidParameter(format!("diagonal {diag} outside [0, 1]")));
            }
            let off = (1.0 - diag) / (kappa - 1) as f64;
            TransitionMatrix::from_rows(
                (0..kappa)
                    .map(|i| (0..kappa).map(|j| if i == j { diag } else { off }).collect())
                    .collect(),
            )
        }
        BenchmarkKind::High => {
            if kappa == 0 {
                return Err(Error::InvalidParameter("κ must be positive".into()));
            }
            TransitionMatrix::from_rows(vec![vec![1.0 / kappa as f64; kappa]; kappa])
        }
        BenchmarkKind::Medium => {
            if kappa != 8 {
                return Err(Error::InvalidParameter(
                    "the built-in medium benchmark has exactly 8 states".into(),
                ));
            }
            TransitionMatrix::from_rows(MEDIUM_BUILTIN.iter().map(|r| r.to_vec()).collect())
        }
    }
}

/// Exact entropy rate of an irreducible matrix.
pub fn analytic_rate(p: &TransitionMatrix) -> Result<f64> {
    entropy_rate(p, &stationary_eigen(p)?)
}

/// Transition probabilities of the two-state second-order family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SecondOrderParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let params = Self { a, b, c, d };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// `ψ = a(1-b) + 2da + d(1-c)`, the normaliser of the stationary law.
    pub fn psi(&self) -> f64 {
        let Self { a, b, c, d } = *self;
        a * (1.0 - b) + 2.0 * d * a + d * (1.0 - c)
    }
}

/// The 4×4 composite matrix, rows and columns ordered `AA, AB, BA, BB`.
pub fn second_order_matrix(params: &SecondOrderParams) -> Result<TransitionMatrix> {
    params.validate()?;
    let SecondOrderParams { a, b, c, d } = *params;
    TransitionMatrix::from_rows(vec![
        vec![1.0 - a, a, 0.0, 0.0],
        vec![0.0, 0.0, b, 1.0 - b],
        vec![1.0 - c, c, 0.0, 0.0],
        vec![0.0, 0.0, d, 1.0 - d],
    ])
}

/// `ψ⁻¹ (d(1-c), da, da, a(1-b))`.
pub fn second_order_stationary(params: &SecondOrderParams) -> Result<ProbabilityVector> {
    params.validate()?;
    let SecondOrderParams { a, b, c, d } = *params;
    if params.psi() <= 0.0 {
        return Err(Error::Reducible(format!("second-order chain {params:?} has ψ = 0")));
    }
    ProbabilityVector::from_weights(vec![d * (1.0 - c), d * a, d * a, a * (1.0 - b)])
}

/// Entropy rate per base symbol of the second-order chain.
pub fn second_order_rate(params: &SecondOrderParams) -> Result<f64> {
    let p2 = second_order_matrix(params)?;
    if let Some(reason) = p2.reducibility() {
        return Err(Error::Reducible(reason));
    }
    entropy_rate(&p2, &second_order_stationary(params)?)
}

/// The observed first-order transition probabilities `p`, `q` together with
/// the dependence parameters `φ`, `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReparamPoint {
    pub p: f64,
    pub q: f64,
    pub phi: f64,
    pub gamma: f64,
}

/// Slack allowed on the φ/γ bounds for values computed in floating point.
const BOUND_SLACK: f64 = 1e-12;

/// Upper bound `min(x/(1-x), (1-x)/x)` for a dependence parameter.
pub fn dependence_upper_bound(x: f64) -> f64 {
    (x / (1.0 - x)).min((1.0 - x) / x)
}

impl ReparamPoint {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("p", self.p), ("q", self.q)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {x} must lie in (0, 1)")));
            }
        }
        for (name, v, x) in [("φ", self.phi, self.p), ("γ", self.gamma, self.q)] {
            let upper = dependence_upper_bound(x);
            if !(v >= -1.0 - BOUND_SLACK && v <= upper + BOUND_SLACK) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} violates -1 ≤ {name} ≤ min({x}/(1-{x}), (1-{x})/{x}) = {upper}"
                )));
            }
        }
        Ok(())
    }

    /// Recover `φ = a/p − 1`, `γ = d/q − 1` for given observed `p`, `q`.
    pub fn recover(params: &SecondOrderParams, p: f64, q: f64) -> Self {
        Self { p, q, phi: params.a / p - 1.0, gamma: params.d / q - 1.0 }
    }
}

/// `a = p(1+φ)`, `c = 1 − (1−p)(1+φ)`, `d = q(1+γ)`, `b = 1 − (1−q)(1+γ)`.
pub fn reparam_to_abcd(point: &ReparamPoint) -> Result<SecondOrderParams> {
    point.validate()?;
    let ReparamPoint { p, q, phi, gamma } = *point;
    let unit = |x: f64| x.clamp(0.0, 1.0);
    Ok(SecondOrderParams {
        a: unit(p * (1.0 + phi)),
        b: unit(1.0 - (1.0 - q) * (1.0 + gamma)),
        c: unit(1.0 - (1.0 - p) * (1.0 + phi)),
        d: unit(q * (1.0 + gamma)),
    })
}

/// The composite matrix written directly in `(p, q, φ, γ)`. Requires
/// `φ, γ > −1`.
pub fn reparam_matrix(point: &ReparamPoint) -> Result<TransitionMatrix> {
    point.validate()?;
    let ReparamPoint { p, q, phi, gamma } = *point;
    if phi <= -1.0 || gamma <= -1.0 {
        return Err(Error::InvalidParameter("the direct form needs φ, γ > -1".into()));
    }
    let (f, g) = (1.0 + phi, 1.0 + gamma);
    TransitionMatrix::from_rows(vec![
        vec![f * (1.0 / f - p), p * f, 0.0, 0.0],
        vec![0.0, 0.0, g * (q - gamma / g), (1.0 - q) * g],
        vec![(1.0 - p) * f, f * (p - phi / f), 0.0, 0.0],
        vec![0.0, 0.0, q * g, g * (1.0 / g - q)],
    ])
}

/// First-order transition matrix seen when a second-order chain is observed
/// one symbol at a time for a long time.
pub fn first_order_projection(params: &SecondOrderParams) -> Result<TransitionMatrix> {
    let p2 = second_order_matrix(params)?;
    if let Some(reason) = p2.reducibility() {
        return Err(Error::Reducible(reason));
    }
    let SecondOrderParams { a, b, c, d } = *params;
    let from_a = (1.0 - c) + a;
    let from_b = d + (1.0 - b);
    TransitionMatrix::from_rows(vec![
        vec![(1.0 - c) / from_a, a / from_a],
        vec![d / from_b, (1.0 - b) / from_b],
    ])
}

/// Simulate `n` base symbols (A = 0, B = 1) of the second-order chain, with
/// the first pair drawn from its stationary law.
pub fn simulate_second_order<R: Rng + ?Sized>(
    params: &SecondOrderParams,
    n: usize,
    rng: &mut R,
) -> Result<Sequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("cannot simulate an empty sequence".into()));
    }
    let p2 = second_order_matrix(params)?;
    let pi = second_order_stationary(params)?;
    let pair = draw(pi.as_slice().iter().copied().enumerate(), rng);
    let mut states = vec![(pair >> 1) as u32, (pair & 1) as u32];
    let mut row = pair;
    while states.len() < n {
        let next = draw(p2.row(row).iter().map(|&(j, q)| (j as usize, q)), rng);
        states.push((next & 1) as u32);
        row = next;
    }
    states.truncate(n);
    Sequence::new(states, 2)
}

/// Analytic entropy rate over a `(φ, γ)` grid at fixed `p`, `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySurface {
    pub p: f64,
    pub q: f64,
    pub phi: Vec<f64>,
    pub gamma: Vec<f64>,
    /// `values[i][j]` at `(phi[i], gamma[j])`; `None` where the point is out
    /// of bounds or the chain is reducible.
    pub values: Vec<Vec<Option<f64>>>,
}

impl EntropySurface {
    /// Largest valid value with its `(φ, γ)`.
    pub fn argmax(&self) -> Option<(f64, f64, f64)> {
        let mut best: Option<(f64, f64, f64)> = None;
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(v) = *v {
                    if best.is_none_or(|(b, _, _)| v > b) {
                        best = Some((v, self.phi[i], self.gamma[j]));
                    }
                }
            }
        }
        best
    }
}

pub fn surface_point(p: f64, q: f64, phi: f64, gamma: f64) -> Option<f64> {
    let params = reparam_to_abcd(&ReparamPoint { p, q, phi, gamma }).ok()?;
    second_order_rate(&params).ok()
}

pub fn entropy_surface(p: f64, q: f64, phi_grid: &[f64], gamma_grid: &[f64]) -> EntropySurface {
    let values = phi_grid
        .iter()
        .map(|&phi| gamma_grid.iter().map(|&gamma| surface_point(p, q, phi, gamma)).collect())
        .collect();
    EntropySurface { p, q, phi: phi_grid.to_vec(), gamma: gamma_grid.to_vec(), values }
}

/// `points` evenly spaced values spanning the admissible range of a
/// dependence parameter for observed probability `x`.
pub fn dependence_grid(x: f64, points: usize) -> Vec<f64> {
    let upper = dependence_upper_bound(x);
    match points {
        0 => Vec::new(),
        1 => vec![-1.0],
        _ => (0..points)
            .map(|k| -1.0 + (upper + 1.0) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// The process an experiment simulates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Benchmark {
        name: BenchmarkKind,
        #[serde(default = "default_kappa")]
        kappa: usize,
        #[serde(default = "default_diag")]
        diag: f64,
    },
    Matrix {
        rows: Vec<Vec<f64>>,
    },
    SecondOrder {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
}

fn default_kappa() -> usize {
    8
}

fn default_diag() -> f64 {
    0.95
}

enum Source {
    First(TransitionMatrix),
    Second(SecondOrderParams),
}

impl Generator {
    fn source(&self) -> Result<Source> {
        match self {
            Generator::Benchmark { name, kappa, diag } => {
                benchmark_matrix(*name, *kappa, *diag).map(Source::First)
            }
            Generator::Matrix { rows } => TransitionMatrix::from_rows(rows.clone()).map(Source::First),
            Generator::SecondOrder { a, b, c, d } => {
                SecondOrderParams::new(*a, *b, *c, *d).map(Source::Second)
            }
        }
    }

    /// Exact entropy rate of the generating process.
    pub fn true_rate(&self) -> Result<f64> {
        match self.source()? {
            Source::First(p) => analytic_rate(&p),
            Source::Second(params) => second_order_rate(&params),
        }
    }

    pub fn simulate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sequence> {
        match self.source()? {
            Source::First(p) => simulate_chain(&p, n, Init::Stationary, rng),
            Source::Second(params) => simulate_second_order(&params, n, rng),
        }
    }
}

/// Bootstrap standard errors to attach to every experiment cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapPlan {
    pub replicates: usize,
    #[serde(default)]
    pub policy: ReplicatePolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub generator: Generator,
    /// Prefix lengths at which every estimator is applied.
    pub lengths: Vec<usize>,
    pub replicates: usize,
    pub estimators: Vec<Estimator>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapPlan>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::InvalidParameter("lengths: at least one length is required".into()));
        }
        if self.lengths[0] == 0 {
            return Err(Error::InvalidParameter("lengths: lengths must be positive".into()));
        }
        if let Some(w) = self.lengths.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "lengths: must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates: must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidParameter("estimators: at least one estimator is required".into()));
        }
        for e in &self.estimators {
            e.validate()?;
        }
        if let Some(b) = &self.bootstrap {
            if b.replicates < 2 {
                return Err(Error::InvalidParameter("bootstrap.replicates: must be at least 2".into()));
            }
        }
        self.generator.source().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCell {
    pub replicates: usize,
    /// Bootstrap standard error of each simulated series, in replicate order.
    pub standard_errors: Vec<Option<f64>>,
    pub median_se: Option<f64>,
    pub mean_se: Option<f64>,
}

/// Summary of one estimator at one length across the simulated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub length: usize,
    pub estimator: Estimator,
    pub label: String,
    /// Point estimate of each simulated series, `None` where it failed.
    pub estimates: Vec<Option<f64>>,
    pub n_ok: usize,
    pub n_failed: usize,
    pub min: Option<f64>,
    pub mean: Option<f64>,
    pub max: Option<f64>,
    /// Standard deviation across series (divisor `n - 1`).
    pub sd: Option<f64>,
    #[serde(default)]
    pub errors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub replicates: usize,
    pub generator: Generator,
    pub true_rate: Option<f64>,
    pub cells: Vec<Cell>,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl ExperimentReport {
    pub fn cell(&self, length: usize, estimator: &Estimator) -> Option<&Cell> {
        self.cells.iter().find(|c| c.length == length && c.estimator == *estimator)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

struct ReplicateOutcome {
    estimates: Vec<std::result::Result<f64, String>>,
    ses: Vec<Option<f64>>,
}

fn run_replicate(plan: &ExperimentPlan, r: usize) -> Result<ReplicateOutcome> {
    let max_len = *plan.lengths.last().expect("validated");
    let seq = plan.generator.simulate(max_len, &mut substream(plan.seed, r as u64))?;
    let mut estimates = Vec::new();
    let mut ses = Vec::new();
    for (li, &len) in plan.lengths.iter().enumerate() {
        let prefix = seq.prefix(len)?;
        for (ei, est) in plan.estimators.iter().enumerate() {
            let point = est.estimate(&prefix);
            if let Some(b) = &plan.bootstrap {
                let cell = (r * plan.lengths.len() + li) * plan.estimators.len() + ei;
                let se = point.as_ref().ok().and_then(|e| {
                    let p = choose_p(e.value, len).p;
                    let config = BootstrapConfig {
                        p,
                        replicates: b.replicates,
                        seed: child_seed(plan.seed ^ 0x5eed_b007, cell as u64),
                    };
                    bootstrap_se(&prefix, est, &config, b.policy).ok().map(|res| res.standard_error)
                });
                ses.push(se);
            }
            estimates.push(point.map(|e| e.value).map_err(|e| e.to_string()));
        }
    }
    Ok(ReplicateOutcome { estimates, ses })
}

/// Simulate `replicates` series of length `max(lengths)` and apply every
/// estimator to every prefix length. Series `r` uses sub-stream `r` of the
/// plan seed, so the report is identical however the work is scheduled.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    let true_rate = plan.generator.true_rate().ok();
    let outcomes = (0..plan.replicates)
        .into_par_iter()
        .map(|r| run_replicate(plan, r))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::with_capacity(plan.lengths.len() * plan.estimators.len());
    for (li, &length) in plan.lengths.iter().enumerate() {
        for (ei, estimator) in plan.estimators.iter().enumerate() {
            let k = li * plan.estimators.len() + ei;
            let mut errors: Vec<String> = Vec::new();
            let estimates: Vec<Option<f64>> = outcomes
                .iter()
                .map(|o| match &o.estimates[k] {
                    Ok(v) => Some(*v),
                    Err(msg) => {
                        if !errors.contains(msg) {
                            errors.push(msg.clone());
                        }
                        None
                    }
                })
                .collect();
            let ok: Vec<f64> = estimates.iter().flatten().copied().collect();
            let bootstrap = plan.bootstrap.as_ref().map(|b| {
                let standard_errors: Vec<Option<f64>> = outcomes.iter().map(|o| o.ses[k]).collect();
                let valid: Vec<f64> = standard_errors.iter().flatten().copied().collect();
                BootstrapCell {
                    replicates: b.replicates,
                    median_se: median(&valid),
                    mean_se: (!valid.is_empty()).then(|| valid.iter().sum::<f64>() / valid.len() as f64),
                    standard_errors,
                }
            });
            cells.push(Cell {
                length,
                estimator: *estimator,
                label: estimator.label(),
                n_ok: ok.len(),
                n_failed: estimates.len() - ok.len(),
                min: ok.iter().copied().reduce(f64::min),
                mean: (!ok.is_empty()).then(|| ok.iter().sum::<f64>() / ok.len() as f64),
                max: ok.iter().copied().reduce(f64::max),
                sd: (ok.len() >= 2).then(|| crate::bootstrap::sample_sd(&ok)),
                estimates,
                errors,
                bootstrap,
            });
        }
    }
    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: plan.seed,
        replicates: plan.replicates,
        generator: plan.generator.clone(),
        true_rate,
        cells,
    })
}
