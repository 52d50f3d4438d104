//! Alternating (see-saw) maximization of a correlation Bell expression.
//!
//! Each sweep sets the state to the top eigenvector of the current Bell
//! operator, then replaces every observable by the sign of its effective
//! operator, which is the exact maximizer over Hermitian contractions with
//! everything else fixed. Every step is therefore nondecreasing.

use rayon::prelude::*;

use super::{
    bell_operator, bell_value, check_correlation_inequality, hermitian_eigen, hermitian_sign, make_value, random,
    BellValue, CMatrix, QuantumModel, State,
};
use crate::error::{Error, Result};
use crate::geometry::Inequality;

pub const MAX_SEESAW_DIM: usize = 1 << 12;

/// Slack allowed on the per-step monotonicity check.
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Stop when the relative change over a sweep drops below this.
    pub tolerance: f64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions { restarts: 20, seed: 0, max_sweeps: 500, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub best: BellValue,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    /// Whether the best restart met the tolerance before `max_sweeps`.
    pub converged: bool,
    pub sweeps: usize,
    /// Objective after every state and observable step of the best restart.
    pub trace: Vec<f64>,
}

struct Run {
    model: QuantumModel,
    value: f64,
    converged: bool,
    sweeps: usize,
    trace: Vec<f64>,
}

fn check_dims(ineq: &Inequality, local_dims: &[usize]) -> Result<()> {
    if local_dims.len() != ineq.scenario.n_parties || local_dims.contains(&0) {
        return Err(Error::DimensionMismatch { expected: ineq.scenario.n_parties, found: local_dims.len() });
    }
    let total = local_dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match total {
        Some(t) if t <= MAX_SEESAW_DIM => Ok(()),
        _ => Err(Error::DimensionLimit(total.unwrap_or(usize::MAX))),
    }
}

fn run(ineq: &Inequality, coefficients: &[f64], local_dims: &[usize], observables: Vec<Vec<CMatrix>>, opts: &SeesawOptions) -> Result<Run> {
    let mut model = QuantumModel { local_dims: local_dims.to_vec(), state: State::Pure(super::CVector::zeros(0)), observables };
    let mut trace: Vec<f64> = Vec::new();
    let push = |trace: &mut Vec<f64>, v: f64| -> Result<()> {
        if let Some(&last) = trace.last() {
            if v < last - MONOTONE_SLACK * last.abs().max(1.0) {
                return Err(Error::Invariant(format!("see-saw objective decreased from {last} to {v}")));
            }
        }
        trace.push(v);
        Ok(())
    };

    let mut previous = f64::NEG_INFINITY;
    let mut converged = false;
    let mut sweeps = 0;
    let mut value = f64::NEG_INFINITY;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let b = bell_operator(ineq, &model.observables)?;
        let (values, vectors) = hermitian_eigen(&b);
        let top = values.len() - 1;
        model.state = State::Pure(vectors.column(top).into_owned());
        push(&mut trace, values[top])?;

        for party in 0..model.n_parties() {
            for setting in 0..model.n_settings() {
                let y = model.effective_operator(coefficients, party, setting);
                model.observables[party][setting] = hermitian_sign(&y);
                value = bell_value(ineq, &model)?.value;
                push(&mut trace, value)?;
            }
        }

        if (value - previous).abs() <= opts.tolerance * value.abs().max(1.0) {
            converged = true;
            break;
        }
        previous = value;
    }
    Ok(Run { model, value, converged, sweeps, trace })
}

fn finish(ineq: &Inequality, runs: Vec<Run>) -> SeesawResult {
    let restart_values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let mut best = 0;
    for (i, v) in restart_values.iter().enumerate() {
        if *v > restart_values[best] {
            best = i;
        }
    }
    let run = runs.into_iter().nth(best).expect("at least one restart");
    SeesawResult {
        best: make_value(run.value, run.model, ineq),
        best_restart: best,
        restart_values,
        converged: run.converged,
        sweeps: run.sweeps,
        trace: run.trace,
    }
}

/// Best see-saw value over seeded random restarts. Restart `r` draws its
/// initial observables from stream `r` of `opts.seed`, so the result does not
/// depend on scheduling.
pub fn quantum_value_seesaw(ineq: &Inequality, local_dims: &[usize], opts: &SeesawOptions) -> Result<SeesawResult> {
    let coefficients = check_correlation_inequality(ineq)?;
    check_dims(ineq, local_dims)?;
    if opts.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let m = ineq.scenario.n_settings;
    let runs: Vec<Run> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = random::rng(opts.seed, r as u64);
            let observables = local_dims
                .iter()
                .map(|&d| (0..m).map(|_| random::random_observable(d, &mut rng)).collect())
                .collect();
            run(ineq, &coefficients, local_dims, observables, opts)
        })
        .collect::<Result<_>>()?;
    Ok(finish(ineq, runs))
}

/// Single see-saw run from the given observables.
pub fn seesaw_from(ineq: &Inequality, observables: Vec<Vec<CMatrix>>, opts: &SeesawOptions) -> Result<SeesawResult> {
    let coefficients = check_correlation_inequality(ineq)?;
    let local_dims: Vec<usize> = observables.iter().map(|o| o.first().map_or(0, |a| a.nrows())).collect();
    check_dims(ineq, &local_dims)?;
    let r = run(ineq, &coefficients, &local_dims, observables, opts)?;
    Ok(finish(ineq, vec![r]))
}

/// Observable-only sweeps for a fixed (possibly mixed) state: a lower bound
/// on the best value that state can reach.
pub fn optimize_observables(ineq: &Inequality, model: QuantumModel, opts: &SeesawOptions) -> Result<BellValue> {
    let coefficients = check_correlation_inequality(ineq)?;
    let mut model = model;
    model.validate()?;
    let mut value = bell_value(ineq, &model)?.value;
    for _ in 0..opts.max_sweeps {
        let start = value;
        for party in 0..model.n_parties() {
            for setting in 0..model.n_settings() {
                let y = model.effective_operator(&coefficients, party, setting);
                model.observables[party][setting] = hermitian_sign(&y);
                let next = bell_value(ineq, &model)?.value;
                if next < value - MONOTONE_SLACK * value.abs().max(1.0) {
                    return Err(Error::Invariant(format!("observable step decreased {value} to {next}")));
                }
                value = next;
            }
        }
        if (value - start).abs() <= opts.tolerance * value.abs().max(1.0) {
            break;
        }
    }
    Ok(make_value(value, model, ineq))
}
