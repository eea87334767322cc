//! The stationary bootstrap should not understate the sampling spread of
//! the plug-in estimate on the sticky 8-state chain.

use entrate::bootstrap::ReplicatePolicy;
use entrate::estimator::Estimator;
use entrate::sim::{run_experiment, BenchmarkKind, BootstrapPlan, ExperimentPlan, Generator};

#[test]
fn bootstrap_se_is_conservative_on_low_entropy_chain() {
    let est = Estimator::Empirical { order: 1 };
    let plan = ExperimentPlan {
        generator: Generator::Benchmark { name: BenchmarkKind::Low, kappa: 8, diag: 0.95 },
        lengths: vec![1000, 5000],
        replicates: 100,
        estimators: vec![est],
        seed: 314,
        bootstrap: Some(BootstrapPlan { replicates: 100, policy: ReplicatePolicy::Zero }),
    };
    let report = run_experiment(&plan).unwrap();
    for n in [1000, 5000] {
        let cell = report.cell(n, &est).unwrap();
        let spread = cell.sd.unwrap();
        let median = cell.bootstrap.as_ref().unwrap().median_se.unwrap();
        assert!(median >= 0.8 * spread, "n = {n}: median SE {median} vs spread {spread}");
    }
}
