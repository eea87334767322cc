//! Two-sample pooled-variance t statistic for comparing groups of
//! per-subject entropy estimates.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub group_a: Vec<f64>,
    pub group_b: Vec<f64>,
    /// `(mean_a - mean_b) / (s_p sqrt(1/n_a + 1/n_b))`.
    pub t_statistic: f64,
    pub df: usize,
    pub means: (f64, f64),
    pub pooled_sd: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sum_sq(v: &[f64], m: f64) -> f64 {
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Equal-variance t statistic of `a` minus `b`.
pub fn ttest_pooled(a: &[f64], b: &[f64]) -> Result<GroupComparison, CliError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(CliError::input(format!(
            "each group needs at least two values (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if let Some(x) = a.iter().chain(b).find(|x| !x.is_finite()) {
        return Err(CliError::input(format!("non-finite value {x}")));
    }
    let (ma, mb) = (mean(a), mean(b));
    let df = a.len() + b.len() - 2;
    let pooled_var = (sum_sq(a, ma) + sum_sq(b, mb)) / df as f64;
    if pooled_var <= 0.0 {
        return Err(CliError::numeric("pooled variance is zero: every group is constant"));
    }
    let pooled_sd = pooled_var.sqrt();
    let scale = pooled_sd * (1.0 / a.len() as f64 + 1.0 / b.len() as f64).sqrt();
    Ok(GroupComparison {
        group_a: a.to_vec(),
        group_b: b.to_vec(),
        t_statistic: (ma - mb) / scale,
        df,
        means: (ma, mb),
        pooled_sd,
    })
}

/// Pearson correlation of paired values.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, CliError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(CliError::input("correlation needs two paired samples of length at least 2"));
    }
    let (mx, my) = (mean(x), mean(y));
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let denom = (sum_sq(x, mx) * sum_sq(y, my)).sqrt();
    if denom == 0.0 {
        return Err(CliError::numeric("correlation is undefined for a constant sample"));
    }
    Ok(cov / denom)
}
