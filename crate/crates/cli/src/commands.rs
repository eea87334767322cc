use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use entrate::bootstrap::{bootstrap_se, choose_p, BootstrapConfig, ReplicatePolicy};
use entrate::estimator::Estimator;
use entrate::rng::substream;
use entrate::sim::{
    analytic_rate, benchmark_matrix, run_experiment, second_order_rate, simulate_chain, simulate_second_order,
    ExperimentPlan, ExperimentReport, Init, SecondOrderParams,
};
use entrate::swlz::swlz_parse;
use entrate::{Alphabet, Sequence, TransitionMatrix};
use serde_json::json;

use crate::cli::{
    BootstrapArgs, Cli, Command, EstimateArgs, ExperimentArgs, InputArgs, OutputArgs, ParseArgs, SimulateArgs,
    TtestArgs,
};
use crate::error::CliError;
use crate::ingest::{self, Boundaries, Format, IngestOptions, Ingested};
use crate::report::{self, EstimateRecord, EstimateReport};
use crate::ttest::ttest_pooled;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate(args) => estimate(&args),
        Command::Bootstrap(args) => bootstrap(&args),
        Command::Simulate(args) => simulate(&args),
        Command::Experiment(args) => experiment(&args),
        Command::Ttest(args) => ttest(&args),
        Command::Parse(args) => parse(&args),
    }
}

fn warn(message: &str) {
    eprintln!("warning: {message}");
}

fn load(input: &InputArgs) -> Result<Ingested, CliError> {
    let alphabet = input.alphabet.as_deref().map(ingest::read_alphabet).transpose()?;
    let opts = IngestOptions {
        format: input.format,
        collapse_repeats: input.collapse_repeats,
        alphabet,
        boundaries: if input.exclude_boundaries { Boundaries::Exclude } else { Boundaries::Include },
    };
    ingest::ingest(&input.files, &opts)
}

/// Warning when `n ≤ κ^m`: too few observations to fill an order-`m`
/// transition matrix.
pub fn order_warning(n: usize, kappa: usize, order: usize) -> Option<String> {
    let cells = u32::try_from(order).ok().and_then(|m| kappa.checked_pow(m));
    match cells {
        Some(c) if n > c => None,
        Some(c) => Some(format!(
            "{n} observations do not exceed κ^m = {kappa}^{order} = {c}; order {order} is not reliably estimable"
        )),
        None => Some(format!("κ^m = {kappa}^{order} overflows; order {order} is not estimable")),
    }
}

/// Apply every estimator to the ingested data.
pub fn estimate_all(data: &Ingested, estimators: &[Estimator]) -> Result<Vec<EstimateRecord>, CliError> {
    let n = data.n_obs();
    let mut records = Vec::with_capacity(estimators.len());
    for est in estimators {
        let e = est.estimate_segments(&data.segments)?;
        let mut rec = EstimateRecord::from_estimate(est.label(), e);
        if let Some(order) = est.order() {
            if let Some(w) = order_warning(n, data.alphabet.kappa(), order) {
                rec.warnings.insert(0, w);
            }
        }
        records.push(rec);
    }
    Ok(records)
}

fn base_report(data: &Ingested, seed: Option<u64>) -> EstimateReport {
    EstimateReport::new(
        seed,
        data.sources.iter().map(|p| p.display().to_string()).collect(),
        data.alphabet.symbols().to_vec(),
        data.n_obs(),
    )
}

fn emit_estimates(report: &EstimateReport, output: &OutputArgs) -> Result<(), CliError> {
    for r in &report.estimates {
        for w in &r.warnings {
            warn(&format!("{}: {w}", r.label));
        }
    }
    if let Some(path) = &output.json {
        report::write_output(path, &report::to_json(report))?;
    }
    if let Some(path) = &output.csv {
        report::write_output(path, report.to_csv()?.trim_end())?;
    }
    if !output.uses_stdout() {
        print!("{}", estimate_table(report));
    }
    Ok(())
}

pub fn estimate_table(report: &EstimateReport) -> String {
    let mut out = format!("n = {}, κ = {}\n", report.n_obs, report.alphabet.len());
    let boot = report.estimates.iter().any(|r| r.se.is_some());
    let _ = writeln!(out, "{:<18} {:>10}{}", "estimator", "bits", if boot { "         se        p" } else { "" });
    for r in &report.estimates {
        let _ = write!(out, "{:<18} {:>10.4}", r.label, r.value_bits);
        if let (Some(se), Some(p)) = (r.se, r.p_used) {
            let _ = write!(out, " {se:>10.4} {p:>8.4}");
        }
        out.push('\n');
    }
    out
}

fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let data = load(&args.input)?;
    let mut report = base_report(&data, None);
    report.estimates = estimate_all(&data, &args.estimators.estimators())?;
    emit_estimates(&report, &args.output)
}

fn bootstrap(args: &BootstrapArgs) -> Result<(), CliError> {
    if args.input.exclude_boundaries {
        return Err(CliError::input("--exclude-boundaries cannot be combined with the bootstrap"));
    }
    let data = load(&args.input)?;
    let seq = data.joined();
    let policy = if args.drop_failed { ReplicatePolicy::Drop } else { ReplicatePolicy::Zero };
    let mut report = base_report(&data, Some(args.seed));
    report.estimates = estimate_all(&data, &args.estimators.estimators())?;
    for (rec, est) in report.estimates.iter_mut().zip(args.estimators.estimators()) {
        let p = match args.p {
            Some(p) => p,
            None => {
                let choice = choose_p(rec.value_bits, seq.len());
                if let Some(w) = choice.warning {
                    rec.warnings.push(w);
                }
                choice.p
            }
        };
        let config = BootstrapConfig::new(p, args.replicates, args.seed)?;
        let result = bootstrap_se(&seq, &est, &config, policy)?;
        rec.se = Some(result.standard_error);
        rec.p_used = Some(result.p_used);
        rec.bootstrap_replicates = Some(result.replicates);
        rec.bootstrap_zeroed = result.zeroed;
        rec.bootstrap_dropped = result.dropped;
        if result.zeroed > 0 {
            rec.warnings.push(format!("{} bootstrap replicates were reducible and counted as 0 bits", result.zeroed));
        }
        if result.dropped > 0 {
            rec.warnings.push(format!("{} bootstrap replicates failed and were left out", result.dropped));
        }
    }
    emit_estimates(&report, &args.output)
}

fn read_matrix(path: &Path) -> Result<TransitionMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: expected an array of rows: {e}", path.display())))?;
    Ok(TransitionMatrix::from_rows(rows)?)
}

/// Sequence file text: a comment header and 50 tokens per line.
pub fn sequence_text(header: &[String], tokens: &[&str]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    for line in tokens.chunks(50) {
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut rng = substream(args.seed, 0);
    let (seq, alphabet, rate, source): (Sequence, Alphabet, Option<f64>, String) =
        if let Some(v) = &args.second_order {
            let [a, b, c, d] = v[..] else {
                return Err(CliError::input("--second-order takes exactly four values a,b,c,d"));
            };
            if args.init_state.is_some() {
                return Err(CliError::input("--init-state applies to first-order chains only"));
            }
            let params = SecondOrderParams::new(a, b, c, d)?;
            let seq = simulate_second_order(&params, args.length, &mut rng)?;
            (seq, Alphabet::new(["A", "B"])?, second_order_rate(&params).ok(), format!("second-order a={a} b={b} c={c} d={d}"))
        } else {
            let (p, source) = match (&args.benchmark, &args.matrix) {
                (Some(kind), _) => {
                    (benchmark_matrix((*kind).into(), args.kappa, args.diag)?, format!("benchmark {kind:?}").to_lowercase())
                }
                (None, Some(path)) => (read_matrix(path)?, format!("matrix {}", path.display())),
                (None, None) => unreachable!("clap requires a source"),
            };
            let init = args.init_state.map_or(Init::Stationary, Init::State);
            let seq = simulate_chain(&p, args.length, init, &mut rng)?;
            (seq, Alphabet::numbered(p.size())?, analytic_rate(&p).ok(), source)
        };
    let mut header = vec![source, format!("seed {} length {}", args.seed, args.length)];
    if let Some(h) = rate {
        header.push(format!("true entropy rate {h:.6} bits"));
    }
    let text = sequence_text(&header, &alphabet.decode(&seq));
    match &args.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_plan(path: &Path) -> Result<ExperimentPlan, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let plan: ExperimentPlan = serde_json::from_str(&text).map_err(|e| {
        CliError::input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })?;
    plan.validate().map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(plan)
}

pub fn experiment_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    if let Some(h) = report.true_rate {
        let _ = writeln!(out, "true entropy rate {h:.4} bits, {} series, seed {}", report.replicates, report.seed);
    }
    let boot = report.cells.iter().any(|c| c.bootstrap.is_some());
    let _ = writeln!(
        out,
        "{:>7} {:<16} {:>5} {:>8} {:>8} {:>8} {:>8}{}",
        "length",
        "estimator",
        "ok",
        "min",
        "mean",
        "max",
        "sd",
        if boot { " median_se" } else { "" }
    );
    let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    for c in &report.cells {
        let _ = write!(
            out,
            "{:>7} {:<16} {:>5} {:>8} {:>8} {:>8} {:>8}",
            c.length,
            c.label,
            c.n_ok,
            f(c.min),
            f(c.mean),
            f(c.max),
            f(c.sd)
        );
        if let Some(b) = &c.bootstrap {
            let _ = write!(out, " {:>9}", f(b.median_se));
        }
        out.push('\n');
    }
    out
}

fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let mut plan = read_plan(&args.plan)?;
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    if let Some(r) = args.replicates {
        plan.replicates = r;
    }
    let report = run_experiment(&plan)?;
    for c in &report.cells {
        for e in &c.errors {
            warn(&format!("n = {} {}: {e}", c.length, c.label));
        }
    }
    if let Some(path) = &args.output.json {
        report::write_output(path, &report::to_json(&report))?;
    }
    if let Some(path) = &args.output.csv {
        report::write_output(path, report::experiment_csv(&report)?.trim_end())?;
    }
    if !args.output.uses_stdout() {
        print!("{}", experiment_table(&report));
    }
    Ok(())
}

fn ttest(args: &TtestArgs) -> Result<(), CliError> {
    let r = ttest_pooled(&args.a, &args.b)?;
    match &args.json {
        Some(path) => report::write_output(path, &report::to_json(&r)),
        None => {
            println!("t = {:.4}  df = {}  mean(a) = {:.4}  mean(b) = {:.4}", r.t_statistic, r.df, r.means.0, r.means.1);
            Ok(())
        }
    }
}

fn parse(args: &ParseArgs) -> Result<(), CliError> {
    let (source, text, default_format) = match (&args.text, &args.file) {
        (Some(t), _) => (PathBuf::from("<text>"), t.clone(), Format::Chars),
        (None, Some(path)) => {
            let t = fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
            (path.clone(), t, Format::Tokens)
        }
        (None, None) => unreachable!("clap requires an input"),
    };
    let format = args.format.unwrap_or(default_format);
    let alphabet = args.alphabet.as_deref().map(ingest::read_alphabet).transpose()?;
    let opts = IngestOptions { format, collapse_repeats: args.collapse_repeats, alphabet, boundaries: Boundaries::Include };
    let data = ingest::ingest_texts(&[(source, text)], &opts)?;
    let seq = data.joined();
    let parsing = swlz_parse(&seq);
    let symbols = data.alphabet.decode(&seq);
    let sep = if data.alphabet.symbols().iter().all(|s| s.chars().count() == 1) { "" } else { " " };
    let phrases: Vec<String> =
        parsing.phrases.iter().map(|p| symbols[p.start..p.start + p.len].join(sep)).collect();
    match &args.json {
        Some(path) => {
            let items: Vec<_> = parsing
                .phrases
                .iter()
                .zip(&phrases)
                .map(|(p, text)| json!({ "start": p.start, "len": p.len, "novel": p.novel, "text": text }))
                .collect();
            let doc = json!({ "n_obs": seq.len(), "kappa": seq.kappa(), "phrases": items });
            report::write_output(path, &serde_json::to_string_pretty(&doc).expect("json"))
        }
        None => {
            println!("{}", phrases.join(" | "));
            if parsing.phrases.last().is_some_and(|p| !p.novel) {
                warn("the last phrase already occurs earlier in the sequence");
            }
            Ok(())
        }
    }
}
