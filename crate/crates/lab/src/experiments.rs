//! Sweep drivers. Every trial derives its randomness from
//! [`derive_seed`]; trials run on the rayon pool and are collected in index
//! order, so output bytes do not depend on scheduling.
//!
//! Sweeps that iterate a parameter list (`lengths`, `deltas`) group trials:
//! trial `t` uses list entry `t mod k` and seed group `t div k`, so all list
//! entries of a group see the same state and the same hash prefix.

use std::time::Instant;

use duality_core::binlin::{sample_full_rank, BinaryMatrix, HashFamilySpec, HashKind};
use duality_core::duality::{self, Case, DualityReport, TripartiteState, UncertaintyReport};
use duality_core::entropy::{
    cond_entropy, max_entropy, min_entropy, smooth_max_entropy, smooth_min_entropy, SmoothingBall,
};
use duality_core::protocols::{csi_length_bound, hash_cq, p_secure, pa_length_bound, run_csi};
use duality_core::qcore::io::{cq_from_json, state_from_json};
use duality_core::qcore::{random_density, rng_from_seed, CqState, DensityOperator};
use log::info;
use rayon::prelude::*;

use crate::config::{Command, ExperimentConfig, Fixture, HashSampler, Theorem};
use crate::error::{LabError, Result};
use crate::fixtures;
use crate::report::{ReportDocument, TrialRecord, Value};
use crate::seeding::derive_seed;

/// Validate `config` and run the sweep it names.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportDocument> {
    config.validate()?;
    info!("running {} with {} trial(s)", config.command.name(), config.trials);
    let doc = match config.command {
        Command::Entropy => entropy(config),
        Command::PaRun => pa_run(config),
        Command::CsiRun => csi_run(config),
        Command::DualityVerify => duality_verify(config),
        Command::UncertaintySweep => uncertainty_sweep(config),
    }?;
    if let Some(v) = doc.summary.violations {
        info!("{} violation(s) in {} trial(s)", v, doc.summary.trials);
    }
    Ok(doc)
}

fn run_trials<F>(trials: usize, f: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(usize) -> Result<(u64, Vec<Value>)> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let (seed, values) = f(t)?;
            Ok(TrialRecord {
                trial: t,
                seed,
                values,
                duration_ms: Some(start.elapsed().as_secs_f64() * 1e3),
            })
        })
        .collect()
}

fn cycle<T: Copy>(list: &[T], i: usize) -> T {
    list[i % list.len()]
}

fn read(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::io(path.display().to_string(), e))
}

const ENTROPY_COLUMNS: [&str; 7] = ["dim_a", "dim_b", "h", "h_min", "h_max", "h_min_smooth", "h_max_smooth"];

fn entropy_row(rho: &DensityOperator, cond: &[usize], eps: f64) -> Result<Vec<Value>> {
    let dims = rho.dims();
    let dim_b: usize = cond.iter().map(|&i| dims[i]).product();
    let ball = SmoothingBall::new(eps)?;
    Ok(vec![
        (rho.dim() / dim_b).into(),
        dim_b.into(),
        cond_entropy(rho, cond)?.into(),
        min_entropy(rho, cond)?.into(),
        max_entropy(rho, cond)?.into(),
        smooth_min_entropy(rho, cond, ball)?.into(),
        smooth_max_entropy(rho, cond, ball)?.into(),
    ])
}

/// Conditional entropies of a state file, or of random `A ⊗ B` mixed states.
fn entropy(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    if let Some(path) = &cfg.state {
        let rho = state_from_json(&read(path)?)?.density();
        let cond = if cfg.conditioned_on.is_empty() {
            vec![rho.dims().len() - 1]
        } else {
            cfg.conditioned_on.clone()
        };
        let start = Instant::now();
        let values = entropy_row(&rho, &cond, cfg.eps1)?;
        let rec = TrialRecord {
            trial: 0,
            seed: cfg.seed,
            values,
            duration_ms: Some(start.elapsed().as_secs_f64() * 1e3),
        };
        let mut doc = ReportDocument::new(cfg.clone(), &ENTROPY_COLUMNS, vec![rec]);
        doc.notes.push(format!("state file {}", path.display()));
        return Ok(doc);
    }
    let records = run_trials(cfg.trials, |t| {
        let seed = derive_seed(cfg.seed, t as u64);
        let d = cycle(&cfg.dims, t);
        let dims = [d, cfg.b_dim];
        let rho = random_density(&dims, d * cfg.b_dim, &mut rng_from_seed(seed));
        Ok((seed, entropy_row(&rho, &[1], cfg.eps1)?))
    })?;
    Ok(ReportDocument::new(cfg.clone(), &ENTROPY_COLUMNS, records))
}

fn load_cq(cfg: &ExperimentConfig, fallback: impl FnOnce() -> duality_core::Result<CqState>) -> Result<CqState> {
    Ok(match &cfg.state {
        Some(path) => cq_from_json(&read(path)?)?,
        None => fallback()?,
    })
}

fn register_bits(cq: &CqState) -> Result<usize> {
    let d = cq.alphabet();
    if !d.is_power_of_two() || d < 2 {
        return Err(LabError::Config(format!("cq alphabet {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

fn check_lengths(lengths: &[usize], n: usize) -> Result<()> {
    match lengths.iter().find(|&&l| l > n) {
        Some(l) => Err(LabError::Config(format!("length {l} exceeds register size {n}"))),
        None => Ok(()),
    }
}

/// Square hash from the configured family; prefixes of its rows are the
/// nested shorter hashes.
fn square_hash(kind: HashSampler, n: usize, seed: u64) -> Result<BinaryMatrix> {
    Ok(match kind {
        HashSampler::FullRank => sample_full_rank(n, n, seed)?,
        HashSampler::UniformLinear => HashFamilySpec::new(HashKind::UniformLinear, n, n, seed)?.sample(),
        HashSampler::Toeplitz => HashFamilySpec::new(HashKind::Toeplitz, n, n, seed)?.sample(),
    })
}

/// Hash the register of a cq state and report the key's distance from ideal.
fn pa_run(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    let cq = load_cq(cfg, fixtures::pa_source)?;
    let n = register_bits(&cq)?;
    check_lengths(&cfg.lengths, n)?;
    let (bound, h) = pa_length_bound(&cq, cfg.eps1, cfg.eps2)?;
    let lengths = if cfg.lengths.is_empty() { vec![bound] } else { cfg.lengths.clone() };
    let records = run_trials(cfg.trials, |t| {
        let seed = derive_seed(cfg.seed, (t / lengths.len()) as u64);
        let ell = cycle(&lengths, t);
        let g = square_hash(cfg.hash, n, seed)?.row_range(0, ell);
        let key = hash_cq(&cq, &g)?;
        Ok((seed, vec![ell.into(), p_secure(&key).into(), bound.into()]))
    })?;
    let mut doc = ReportDocument::new(cfg.clone(), &["length", "p_secure", "bound_value"], records);
    doc.notes.push(format!("h_min_smooth = {h:.11e} (eps1 = {})", cfg.eps1));
    Ok(doc)
}

/// Compress the register with full-rank hashes and decode with the PGM.
fn csi_run(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    let cq = load_cq(cfg, || fixtures::csi_source(cfg.copies))?;
    let n = register_bits(&cq)?;
    check_lengths(&cfg.lengths, n)?;
    let (bound, h) = csi_length_bound(&cq, cfg.eps1, cfg.eps2)?;
    let lengths = if cfg.lengths.is_empty() { vec![bound] } else { cfg.lengths.clone() };
    let records = run_trials(cfg.trials, |t| {
        let seed = derive_seed(cfg.seed, (t / lengths.len()) as u64);
        let ell = cycle(&lengths, t);
        let f = sample_full_rank(n, n, seed)?.row_range(0, ell);
        let (_, report) = run_csi(&cq, &f)?;
        Ok((seed, vec![ell.into(), report.achieved.into(), bound.into()]))
    })?;
    let mut doc = ReportDocument::new(cfg.clone(), &["length", "p_guess", "bound_value"], records);
    doc.notes.push(format!("h_max_smooth = {h:.11e} (eps1 = {})", cfg.eps1));
    Ok(doc)
}

fn report_values(r: &DualityReport) -> [Value; 5] {
    [
        r.epsilon.into(),
        r.bound.into(),
        r.achieved.into(),
        r.slack.into(),
        r.passed.into(),
    ]
}

const REPORT_COLUMNS: [&str; 5] = ["epsilon", "bound", "achieved", "slack", "pass"];

fn with_report(prefix: &[&'static str]) -> Vec<&'static str> {
    prefix.iter().chain(REPORT_COLUMNS.iter()).copied().collect()
}

fn qubit_register(n: usize) -> Vec<usize> {
    vec![2; n]
}

fn case_state(case: Case, n: usize, cfg: &ExperimentConfig, seed: u64) -> Result<TripartiteState> {
    let a = qubit_register(n);
    Ok(match case {
        Case::A => duality::random_case_a_state(&a, cfg.b_dim, cfg.r_dim, seed)?,
        Case::B => duality::random_case_b_state(&a, cfg.b_dim, cfg.r_dim, seed)?,
    })
}

fn case_name(case: Case) -> &'static str {
    match case {
        Case::A => "a",
        Case::B => "b",
    }
}

fn duality_verify(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    let (columns, records) = match cfg.theorem {
        Theorem::Theorem1 => (
            with_report(&["dim"]),
            run_trials(cfg.trials, |t| {
                let seed = derive_seed(cfg.seed, t as u64);
                let d = cycle(&cfg.dims, t);
                let state = duality::random_tripartite(&[d], &[cfg.b_dim], &[cfg.r_dim], seed)?;
                let r = duality::verify_theorem1(&state)?;
                let mut v = vec![d.into()];
                v.extend(report_values(&r));
                Ok((seed, v))
            })?,
        ),
        Theorem::Theorem2a | Theorem::Theorem2b => (
            with_report(&["qubits"]),
            run_trials(cfg.trials, |t| {
                let seed = derive_seed(cfg.seed, t as u64);
                let n = cycle(&cfg.qubits, t);
                let (_, r) = if cfg.theorem == Theorem::Theorem2a {
                    duality::recover_measurement_case_a(&case_state(Case::A, n, cfg, seed)?)?
                } else {
                    duality::recover_measurement_case_b(&case_state(Case::B, n, cfg, seed)?)?
                };
                let mut v = vec![n.into()];
                v.extend(report_values(&r));
                Ok((seed, v))
            })?,
        ),
        Theorem::CsiToPa => (
            with_report(&["qubits", "length", "key_length"]),
            run_trials(cfg.trials, |t| {
                let seed = derive_seed(cfg.seed, t as u64);
                let n = cycle(&cfg.qubits, t);
                let ell = length_for(cfg, t, n)?;
                let state =
                    duality::random_tripartite(&qubit_register(n), &[cfg.b_dim], &[cfg.r_dim], seed)?;
                let f = sample_full_rank(ell, n, derive_seed(seed, 0))?;
                let (protocol, _) = run_csi(&state.z_given_b()?, &f)?;
                let r = duality::csi_to_pa(&state, &protocol)?;
                let mut v = vec![n.into(), ell.into(), r.key_length.unwrap_or(0).into()];
                v.extend(report_values(&r));
                Ok((seed, v))
            })?,
        ),
        Theorem::PaToCsi => (
            with_report(&["qubits", "case", "length", "compressed_length"]),
            run_trials(cfg.trials, |t| {
                let seed = derive_seed(cfg.seed, t as u64);
                let n = cycle(&cfg.qubits, t);
                let ell = length_for(cfg, t, n)?;
                let case = cycle(&cfg.cases, t);
                let state = case_state(case, n, cfg, seed)?;
                let g = sample_full_rank(ell, n, derive_seed(seed, 0))?;
                let (_, r) = duality::pa_to_csi(&state, &g, case)?;
                let mut v = vec![
                    n.into(),
                    case_name(case).into(),
                    ell.into(),
                    r.compressed_length.unwrap_or(0).into(),
                ];
                v.extend(report_values(&r));
                Ok((seed, v))
            })?,
        ),
    };
    Ok(ReportDocument::new(cfg.clone(), &columns, records))
}

/// Cycled length, defaulting to `n − 1`; must lie in `1..n`.
fn length_for(cfg: &ExperimentConfig, t: usize, n: usize) -> Result<usize> {
    let ell = if cfg.lengths.is_empty() { n.saturating_sub(1) } else { cycle(&cfg.lengths, t) };
    if ell == 0 || ell >= n {
        return Err(LabError::Config(format!("length {ell} outside 1..{n} for {n} qubits")));
    }
    Ok(ell)
}

fn fixture_state(cfg: &ExperimentConfig, d: usize, seed: u64) -> Result<TripartiteState> {
    Ok(match cfg.fixture {
        Fixture::Random => duality::random_tripartite(&[d], &[cfg.b_dim], &[cfg.r_dim], seed)?,
        Fixture::Ghz => duality::ghz_state(d)?,
        Fixture::Itilde => duality::itilde_product_state()?,
    })
}

fn uncertainty_values(u: &UncertaintyReport) -> [Value; 5] {
    [
        u.h_x_r.into(),
        u.h_z_b.into(),
        u.bound.into(),
        u.slack.into(),
        u.passed.into(),
    ]
}

fn uncertainty_sweep(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    if cfg.fixture == Fixture::Itilde && cfg.dims.iter().any(|&d| d != 2) {
        return Err(LabError::Config("the itilde fixture has d = 2".into()));
    }
    if cfg.deltas.is_empty() {
        let records = run_trials(cfg.trials, |t| {
            let seed = derive_seed(cfg.seed, t as u64);
            let d = cycle(&cfg.dims, t);
            let u = duality::check_uncertainty(&fixture_state(cfg, d, seed)?)?;
            let mut v = vec![d.into()];
            v.extend(uncertainty_values(&u));
            Ok((seed, v))
        })?;
        let columns = ["dim", "h_x_r", "h_z_b", "bound", "slack", "pass"];
        return Ok(ReportDocument::new(cfg.clone(), &columns, records));
    }
    let k = cfg.deltas.len();
    let records = run_trials(cfg.trials, |t| {
        let group = t / k;
        let seed = derive_seed(cfg.seed, group as u64);
        let d = cycle(&cfg.dims, group);
        let delta = cycle(&cfg.deltas, t);
        let u = duality::check_smooth_uncertainty(&fixture_state(cfg, d, seed)?, delta)?;
        let mut v = vec![d.into(), delta.into()];
        v.extend(uncertainty_values(&u));
        v.push(u.vacuous.into());
        Ok((seed, v))
    })?;
    let columns = [
        "dim",
        "delta",
        "h_min_x_r",
        "h_max_z_b",
        "bound",
        "slack",
        "pass",
        "vacuous",
    ];
    let mut doc = ReportDocument::new(cfg.clone(), &columns, records);
    let vacuous = doc
        .column("vacuous")
        .unwrap_or_default()
        .iter()
        .filter(|v| matches!(v, Value::Flag(true)))
        .count();
    if vacuous > 0 {
        doc.notes.push(format!(
            "bound is vacuous at this scale: right side log2(d) - 8 log2(1/delta) - 12 is negative in {vacuous} of {} trials",
            doc.records.len()
        ));
    }
    Ok(doc)
}
