//! Single conditional trajectories.

use crate::config::{FeedbackConfig, InitialState, SimConfig};
use crate::error::{Error, Result};
use crate::feedback::Controller;
use crate::qubit::{gibbs_weights, BlochState};
use crate::sme::{sample_homodyne, split_step, HomodyneSample, StepLedger};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Time series of one run. `times[i]`, `states[i]` and `ledgers[i]` refer to
/// the end of step `i`; the state at `t = 0` is `initial`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub initial_label: u8,
    pub initial: BlochState,
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
    pub samples: Vec<HomodyneSample>,
    pub ledgers: Vec<StepLedger>,
    pub final_outcome: Option<u8>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> BlochState {
        self.states.last().copied().unwrap_or(self.initial)
    }

    /// `P_e` on the full grid `0, dt, …, τ`.
    pub fn excited_population_series(&self) -> Vec<f64> {
        std::iter::once(self.initial)
            .chain(self.states.iter().copied())
            .map(|s| s.excited_population())
            .collect()
    }

    /// Summed ledger over the whole trajectory.
    pub fn totals(&self) -> LedgerTotals {
        self.ledgers.iter().fold(LedgerTotals::default(), |acc, l| acc.with_step(l))
    }
}

/// Time-integrated work, feedback work, heat and energy change.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LedgerTotals {
    pub work: f64,
    pub feedback_work: f64,
    pub heat: f64,
    pub energy: f64,
}

impl LedgerTotals {
    pub fn with_step(self, l: &StepLedger) -> Self {
        Self {
            work: self.work + l.dw,
            feedback_work: self.feedback_work + l.dwf,
            heat: self.heat + l.dq,
            energy: self.energy + l.du,
        }
    }
}

/// Draws the prepared eigenstate label.
pub fn prepare_label<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> u8 {
    let intended = match cfg.initial_state {
        InitialState::Ground => 0,
        InitialState::Excited => 1,
        InitialState::Thermal { beta } => {
            let (_, p_e) = gibbs_weights(beta);
            u8::from(rng.random::<f64>() < p_e)
        }
    };
    if cfg.prep_error > 0.0 && rng.random::<f64>() < cfg.prep_error {
        1 - intended
    } else {
        intended
    }
}

/// Draws an ideal projective outcome from `s`.
pub fn projective_outcome<R: Rng + ?Sized>(s: &BlochState, rng: &mut R) -> u8 {
    u8::from(rng.random::<f64>() < s.excited_population())
}

/// Runs one trajectory: prepare, then `sample → control → split step` for
/// every step, then optionally a projective readout.
pub fn simulate_trajectory<R: Rng + ?Sized>(
    cfg: &SimConfig,
    feedback: &FeedbackConfig,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let n = prepare_label(cfg, rng);
    let initial = BlochState::eigenstate(n);
    let mut controller = Controller::new(feedback, n);
    let steps = cfg.steps();

    let mut rec = TrajectoryRecord {
        initial_label: n,
        initial,
        times: Vec::with_capacity(steps),
        states: Vec::with_capacity(steps),
        samples: Vec::with_capacity(steps),
        ledgers: Vec::with_capacity(steps),
        final_outcome: None,
    };

    let mut s = initial;
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        let smp = sample_homodyne(&s, cfg, rng);
        let (next, ledger) = split_step(&s, &smp, cfg.omega_r, cfg, |k| controller.omega(t, &smp, k, cfg))
            .map_err(|e| match e {
                Error::NumericalBlowup { x, z, .. } => Error::NumericalBlowup { step: i, x, z },
                other => other,
            })?;
        s = next;
        rec.times.push((i + 1) as f64 * cfg.dt);
        rec.states.push(s);
        rec.samples.push(smp);
        rec.ledgers.push(ledger);
    }
    if cfg.sample_outcome {
        rec.final_outcome = Some(projective_outcome(&s, rng));
    }
    Ok(rec)
}
