use duality_lab::{run_experiment, serialize_report, Command, ExperimentConfig, Format, Theorem};

#[test]
fn hundred_trial_theorem1_sweep_has_no_violations() {
    let mut cfg = ExperimentConfig::new(Command::DualityVerify);
    cfg.theorem = Theorem::Theorem1;
    cfg.trials = 100;
    cfg.dims = vec![2, 3];
    let doc = run_experiment(&cfg).unwrap();
    assert_eq!(doc.summary.violations, Some(0));
    assert_eq!(doc.summary.trials, 100);
}

#[test]
fn records_come_back_in_trial_order() {
    let mut cfg = ExperimentConfig::new(Command::UncertaintySweep);
    cfg.trials = 64;
    let doc = run_experiment(&cfg).unwrap();
    let order: Vec<usize> = doc.records.iter().map(|r| r.trial).collect();
    assert_eq!(order, (0..64).collect::<Vec<_>>());
}

#[test]
fn violation_count_matches_pass_flags() {
    let mut cfg = ExperimentConfig::new(Command::DualityVerify);
    cfg.theorem = Theorem::Theorem2b;
    cfg.trials = 20;
    cfg.qubits = vec![1, 2];
    let doc = run_experiment(&cfg).unwrap();
    let failing = doc
        .column("pass")
        .unwrap()
        .iter()
        .filter(|v| matches!(v, duality_lab::Value::Flag(false)))
        .count();
    assert_eq!(doc.summary.violations, Some(failing));
}

#[test]
fn identical_configs_give_identical_bytes() {
    for theorem in [Theorem::CsiToPa, Theorem::PaToCsi] {
        let mut cfg = ExperimentConfig::new(Command::DualityVerify);
        cfg.theorem = theorem;
        cfg.qubits = vec![2, 3];
        cfg.trials = 6;
        for format in [Format::Csv, Format::Json] {
            let a = serialize_report(&run_experiment(&cfg).unwrap(), format).unwrap();
            let b = serialize_report(&run_experiment(&cfg).unwrap(), format).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn different_base_seeds_differ() {
    let mut cfg = ExperimentConfig::new(Command::Entropy);
    cfg.trials = 2;
    let a = run_experiment(&cfg).unwrap();
    cfg.seed = 1;
    let b = run_experiment(&cfg).unwrap();
    assert_ne!(a.reals("h"), b.reals("h"));
}

#[test]
fn entropy_rows_are_ordered() {
    let mut cfg = ExperimentConfig::new(Command::Entropy);
    cfg.trials = 3;
    cfg.dims = vec![2, 3];
    let doc = run_experiment(&cfg).unwrap();
    for r in 0..3 {
        let get = |c: &str| doc.reals(c)[r];
        assert!(get("h_min") <= get("h") + 1e-7);
        assert!(get("h") <= get("h_max") + 1e-7);
        assert!(get("h_min") <= get("h_min_smooth") + 1e-7);
        assert!(get("h_max_smooth") <= get("h_max") + 1e-7);
    }
}
