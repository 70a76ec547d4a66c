//! Parallel ensembles with per-trajectory random streams.
//!
//! Trajectory `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`,
//! so results depend only on `(seed, k)`. Outputs are collected in index
//! order and every reduction runs sequentially over that order, which makes
//! the worker count irrelevant to the bits produced.

use crate::config::{FeedbackConfig, SimConfig};
use crate::error::{Error, Result};
use crate::qubit::BlochState;
use crate::stats::{mean_and_stderr, TransitionLedger};
use crate::trajectory::{simulate_trajectory, LedgerTotals, TrajectoryRecord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleOptions {
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl EnsembleOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers }
    }
}

/// Random stream of trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `n_traj` trajectories and maps each record through `f` before it is
/// dropped. `f` also receives the trajectory's stream, positioned after the
/// simulation, for any extra draws.
pub fn run_ensemble_map<T, F>(
    cfg: &SimConfig,
    feedback: &FeedbackConfig,
    n_traj: usize,
    opts: &EnsembleOptions,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, TrajectoryRecord, &mut ChaCha8Rng) -> T + Sync,
{
    cfg.validate()?;
    let job = || {
        (0..n_traj)
            .into_par_iter()
            .map(|k| {
                let mut rng = trajectory_rng(cfg.seed, k as u64);
                let rec = simulate_trajectory(cfg, feedback, &mut rng)?;
                Ok(f(k, rec, &mut rng))
            })
            .collect::<Result<Vec<T>>>()
    };
    if opts.workers == 0 {
        job()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?
            .install(job)
    }
}

/// Full records; memory grows with `n_traj × steps`.
pub fn run_ensemble_records(
    cfg: &SimConfig,
    feedback: &FeedbackConfig,
    n_traj: usize,
    opts: &EnsembleOptions,
) -> Result<Vec<TrajectoryRecord>> {
    run_ensemble_map(cfg, feedback, n_traj, opts, |_, rec, _| rec)
}

/// What an ensemble keeps of each trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub initial_label: u8,
    /// `P_e` on the grid `0, dt, …, τ`.
    pub excited_population: Vec<f64>,
    pub final_state: BlochState,
    pub totals: LedgerTotals,
    pub final_outcome: Option<u8>,
    /// `|ΔU_states − Σ(dW + dWF + dQ)|`.
    pub first_law_residual: f64,
}

impl TrajectorySummary {
    pub fn from_record(rec: &TrajectoryRecord) -> Self {
        let totals = rec.totals();
        Self {
            initial_label: rec.initial_label,
            excited_population: rec.excited_population_series(),
            final_state: rec.final_state(),
            totals,
            final_outcome: rec.final_outcome,
            first_law_residual: crate::stats::first_law_residual(rec),
        }
    }

    pub fn transition_ledger(&self, m: u8) -> TransitionLedger {
        TransitionLedger::from_totals(&self.totals, &self.final_state, self.initial_label, m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ensemble {
    pub config: SimConfig,
    pub feedback: FeedbackConfig,
    pub trajectories: Vec<TrajectorySummary>,
}

pub fn run_ensemble(
    cfg: &SimConfig,
    feedback: &FeedbackConfig,
    n_traj: usize,
    opts: &EnsembleOptions,
) -> Result<Ensemble> {
    let trajectories = run_ensemble_map(cfg, feedback, n_traj, opts, |_, rec, _| {
        TrajectorySummary::from_record(&rec)
    })?;
    Ok(Ensemble {
        config: cfg.clone(),
        feedback: *feedback,
        trajectories,
    })
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.config.time_grid()
    }

    /// Mean and standard error of `tr[Π_m ρ̃(t)]` at every grid time.
    pub fn mean_population_series(&self, m: u8) -> (Vec<f64>, Vec<f64>) {
        let steps = self.config.steps() + 1;
        let mut mean = Vec::with_capacity(steps);
        let mut err = Vec::with_capacity(steps);
        for i in 0..steps {
            let vals: Vec<f64> = self
                .trajectories
                .iter()
                .map(|t| {
                    let pe = t.excited_population[i];
                    if m == 0 {
                        1.0 - pe
                    } else {
                        pe
                    }
                })
                .collect();
            let (mu, se) = mean_and_stderr(&vals);
            mean.push(mu);
            err.push(se);
        }
        (mean, err)
    }

    pub fn transition_ledgers(&self, m: u8) -> Vec<TransitionLedger> {
        self.trajectories.iter().map(|t| t.transition_ledger(m)).collect()
    }

    pub fn max_first_law_residual(&self) -> f64 {
        self.trajectories
            .iter()
            .map(|t| t.first_law_residual)
            .fold(0.0, f64::max)
    }
}
