//! Versioned JSON reports and their flat CSV views.

use std::fs;
use std::io::Write;
use std::path::Path;

use entrate::sim::ExperimentReport;
use entrate::{EntropyEstimate, Method};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One estimator applied to the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub method: Method,
    pub order: Option<usize>,
    pub label: String,
    pub value_bits: f64,
    pub n_obs: usize,
    pub irreducible: Option<bool>,
    /// Bootstrap standard error, when requested.
    pub se: Option<f64>,
    pub p_used: Option<f64>,
    pub bootstrap_replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub bootstrap_zeroed: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub bootstrap_dropped: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl EstimateRecord {
    pub fn from_estimate(label: String, e: EntropyEstimate) -> Self {
        Self {
            method: e.method,
            order: e.order,
            label,
            value_bits: e.value,
            n_obs: e.n_obs,
            irreducible: e.irreducible,
            se: None,
            p_used: None,
            bootstrap_replicates: None,
            bootstrap_zeroed: 0,
            bootstrap_dropped: 0,
            warnings: e.warnings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub alphabet: Vec<String>,
    pub n_obs: usize,
    pub estimates: Vec<EstimateRecord>,
}

impl EstimateReport {
    pub fn new(seed: Option<u64>, inputs: Vec<String>, alphabet: Vec<String>, n_obs: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            seed,
            inputs,
            alphabet,
            n_obs,
            estimates: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "method", "order", "label", "value_bits", "se", "p_used", "n_obs", "irreducible", "seed", "warnings",
        ])
        .map_err(csv_error)?;
        for r in &self.estimates {
            w.write_record([
                r.method.to_string(),
                opt(r.order),
                r.label.clone(),
                r.value_bits.to_string(),
                opt(r.se),
                opt(r.p_used),
                r.n_obs.to_string(),
                opt(r.irreducible),
                opt(self.seed),
                r.warnings.join("; "),
            ])
            .map_err(csv_error)?;
        }
        finish(w)
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::input(format!("csv: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// One row per (length, estimator) cell.
pub fn experiment_csv(report: &ExperimentReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "length", "label", "method", "order", "n_ok", "n_failed", "min", "mean", "max", "sd", "true_rate",
        "median_boot_se", "mean_boot_se",
    ])
    .map_err(csv_error)?;
    for c in &report.cells {
        let boot = c.bootstrap.as_ref();
        w.write_record([
            c.length.to_string(),
            c.label.clone(),
            c.estimator.method().to_string(),
            opt(c.estimator.order()),
            c.n_ok.to_string(),
            c.n_failed.to_string(),
            opt(c.min),
            opt(c.mean),
            opt(c.max),
            opt(c.sd),
            opt(report.true_rate),
            opt(boot.and_then(|b| b.median_se)),
            opt(boot.and_then(|b| b.mean_se)),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

/// Write `contents` to `path`, or to standard output when `path` is `-`.
pub fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(contents.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CliError::input(format!("cannot write to standard output: {e}")));
    }
    fs::write(path, contents).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use entrate::estimator::Estimator;
    use entrate::Sequence;
    use proptest::prelude::*;

    fn sample() -> EstimateReport {
        let s = Sequence::new(vec![0, 1, 1, 0, 2, 1, 0, 0, 2], 3).unwrap();
        let mut r = EstimateReport::new(Some(7), vec!["x.txt".into()], vec!["a".into(), "b".into(), "c".into()], 9);
        for e in [Estimator::Empirical { order: 1 }, Estimator::Swlz] {
            let mut rec = EstimateRecord::from_estimate(e.label(), e.estimate(&s).unwrap());
            rec.se = Some(0.125);
            rec.warnings.push("a, \"quoted\" warning".into());
            r.estimates.push(rec);
        }
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: EstimateReport = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(back, r);
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["estimates"][1]["method"], "swlz");
        assert!(v["estimates"][1]["order"].is_null());
    }

    #[test]
    fn csv_is_flat() {
        let text = sample().to_csv().unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[0][0], "direct_empirical");
        assert_eq!(&rows[0][4], "0.125");
        assert_eq!(&rows[1][9], "a, \"quoted\" warning");
    }

    proptest! {
        #[test]
        fn json_round_trip_is_exact(values in proptest::collection::vec(0.0f64..8.0, 1..6), seed in any::<u64>()) {
            let mut r = sample();
            r.seed = Some(seed);
            for (rec, v) in r.estimates.iter_mut().zip(&values) {
                rec.value_bits = *v;
                rec.se = Some(v / 7.0);
            }
            let back: EstimateReport = serde_json::from_str(&to_json(&r)).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
