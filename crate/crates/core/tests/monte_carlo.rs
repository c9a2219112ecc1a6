use bvis_core::estimators::exact_expectation_walkers;
use bvis_core::theory::DEFAULT_TOL;
use bvis_core::{
    aggregate_trials, density_walkers, density_watchpoints, exact_expectation_watchpoints,
    validate_watchpoint_set, BExponent, LatticePoint, Mode, SimulationSpec, WalkerConfig,
};

fn three_points(b: BExponent) -> bvis_core::WatchpointSet {
    validate_watchpoint_set(
        b,
        &[LatticePoint::new(0, 0), LatticePoint::new(1, 2), LatticePoint::new(2, 1)],
    )
    .unwrap()
}

#[test]
fn monte_carlo_agrees_with_exact_expectation() {
    let cases = [
        (BExponent::new(1, 2).unwrap(), 0.5, 50usize),
        (BExponent::new(2, 3).unwrap(), 0.3, 200),
        (BExponent::new(1, 1).unwrap(), 0.7, 120),
    ];
    for (b, a, steps) in cases {
        let alpha = WalkerConfig::new(a).unwrap();
        let set = three_points(b);
        let exact = exact_expectation_watchpoints(&set, alpha, steps).unwrap();
        let spec = SimulationSpec {
            b,
            mode: Mode::Watchpoints { watchpoints: set, alpha },
            steps,
            trials: 100_000,
            master_seed: 0xDEC0DE,
        };
        let theory = density_watchpoints(b, 3, DEFAULT_TOL).unwrap();
        let agg = aggregate_trials(&spec, theory).unwrap();
        let se = agg.sample_std / (spec.trials as f64).sqrt();
        assert!(
            (agg.mean_proportion - exact).abs() <= 5.0 * se,
            "{b} n={steps}: mc {} exact {exact} se {se}",
            agg.mean_proportion
        );
    }
}

#[test]
fn walkers_monte_carlo_agrees_with_exact_expectation() {
    let b = BExponent::new(2, 3).unwrap();
    let alphas = vec![WalkerConfig::new(0.5).unwrap(), WalkerConfig::new(0.3).unwrap(), WalkerConfig::new(0.6).unwrap()];
    let exact = exact_expectation_walkers(b, &alphas, 150).unwrap();
    let spec = SimulationSpec {
        b,
        mode: Mode::Walkers { alphas },
        steps: 150,
        trials: 100_000,
        master_seed: 77,
    };
    let agg = aggregate_trials(&spec, density_walkers(b, 3, DEFAULT_TOL).unwrap()).unwrap();
    let se = agg.sample_std / (spec.trials as f64).sqrt();
    assert!((agg.mean_proportion - exact).abs() <= 5.0 * se);
}

#[test]
fn exact_expectations_near_limits_at_n_1000() {
    let b = BExponent::new(1, 2).unwrap();
    let e = exact_expectation_watchpoints(&three_points(b), WalkerConfig::new(0.5).unwrap(), 1000).unwrap();
    assert!((e - 0.534567).abs() < 0.02, "{e}");

    let b = BExponent::new(2, 3).unwrap();
    let half = WalkerConfig::new(0.5).unwrap();
    let e = exact_expectation_walkers(b, &[half, half], 1000).unwrap();
    assert!((e - 0.933076).abs() < 0.02, "{e}");
}
