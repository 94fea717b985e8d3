//! Fixture sweeps against checked-in CSV. Regenerate with `GOLDEN_UPDATE=1`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use duality_lab::{run_experiment, serialize_report, Command, ExperimentConfig, Fixture, Format};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn tolerances() -> BTreeMap<String, f64> {
    let text = std::fs::read_to_string(golden_dir().join("tolerances.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn check(name: &str, cfg: ExperimentConfig) {
    let csv = serialize_report(&run_experiment(&cfg).unwrap(), Format::Csv).unwrap();
    let path = golden_dir().join(format!("{name}.csv"));
    if std::env::var_os("GOLDEN_UPDATE").is_some() {
        std::fs::write(&path, &csv).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    let actual = String::from_utf8(csv).unwrap();
    let tol = tolerances();
    let mut exp_lines = expected.lines();
    let mut act_lines = actual.lines();
    let header = exp_lines.next().unwrap();
    assert_eq!(act_lines.next().unwrap(), header, "{name}: header");
    let columns: Vec<&str> = header.split(',').collect();
    let (exp_rows, act_rows): (Vec<_>, Vec<_>) = (exp_lines.collect(), act_lines.collect());
    assert_eq!(exp_rows.len(), act_rows.len(), "{name}: row count");
    for (e, a) in exp_rows.iter().zip(&act_rows) {
        for ((col, ev), av) in columns.iter().zip(e.split(',')).zip(a.split(',')) {
            match tol.get(*col) {
                Some(t) => {
                    let (x, y): (f64, f64) = (ev.parse().unwrap(), av.parse().unwrap());
                    assert!((x - y).abs() <= *t, "{name}: {col} {x} vs {y}");
                }
                None => assert_eq!(ev, av, "{name}: {col}"),
            }
        }
    }
}

fn sweep(fixture: Fixture, dims: Vec<usize>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Command::UncertaintySweep);
    cfg.fixture = fixture;
    cfg.trials = dims.len();
    cfg.dims = dims;
    cfg
}

#[test]
fn ghz_sweep_matches_golden() {
    check("uncertainty_ghz", sweep(Fixture::Ghz, vec![2, 3]));
}

#[test]
fn itilde_sweep_matches_golden() {
    check("uncertainty_itilde", sweep(Fixture::Itilde, vec![2]));
}
