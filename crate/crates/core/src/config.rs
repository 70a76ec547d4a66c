//! Simulation parameters.
//!
//! Internal units: time in μs, rates and angular frequencies in rad/μs,
//! energies in ħω_q. The file format (see [`crate::app::ConfigFile`]) carries
//! explicit unit suffixes and is converted into these types.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How the qubit is prepared at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialState {
    Ground,
    Excited,
    /// Eigenstate drawn from the Gibbs weights at inverse temperature `beta`.
    Thermal { beta: f64 },
}

impl InitialState {
    pub fn eigenstate(n: u8) -> Self {
        if n == 0 {
            Self::Ground
        } else {
            Self::Excited
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Radiative decay rate γ (1/μs).
    pub gamma: f64,
    /// Bloch-vector rotation rate of the Rabi drive (rad/μs).
    pub omega_r: f64,
    /// Homodyne quantum efficiency η.
    pub eta: f64,
    /// Integration step (μs).
    pub dt: f64,
    /// Protocol duration (μs).
    pub tau: f64,
    pub seed: u64,
    pub initial_state: InitialState,
    /// Probability that the intended eigenstate is flipped at preparation.
    #[serde(default)]
    pub prep_error: f64,
    /// Draw an ideal projective outcome at `tau`.
    #[serde(default)]
    pub sample_outcome: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            gamma: 1.7,
            omega_r: 2.0 * PI,
            eta: 0.35,
            dt: 0.02,
            tau: 8.0,
            seed: 1,
            initial_state: InitialState::Ground,
            prep_error: 0.0,
            sample_outcome: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !self.omega_r.is_finite() {
            return bad("omega_r must be finite".into());
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad(format!("eta must lie in [0, 1], got {}", self.eta));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be >= 0, got {}", self.tau));
        }
        let ratio = self.tau / self.dt;
        if (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
            return bad(format!(
                "tau/dt must be an integer step count, got {}",
                ratio
            ));
        }
        if !(0.0..=1.0).contains(&self.prep_error) {
            return bad(format!("prep_error must lie in [0, 1], got {}", self.prep_error));
        }
        if let InitialState::Thermal { beta } = self.initial_state {
            if !(beta >= 0.0) {
                return bad(format!("beta must be >= 0, got {beta}"));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.tau / self.dt).round() as usize
    }

    /// Timestamps `0, dt, …, steps·dt` (one more than the step count).
    pub fn time_grid(&self) -> Vec<f64> {
        (0..=self.steps()).map(|i| i as f64 * self.dt).collect()
    }

    pub fn with_initial(&self, initial_state: InitialState) -> Self {
        Self {
            initial_state,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    #[default]
    None,
    /// Homodyne signal times a reference oscillator, `A[cos(Ωt+φ) + B]`.
    #[serde(alias = "pll")]
    PhaseLocked,
    /// Rotation that restores the closed-evolution phase.
    Optimal,
}

impl std::str::FromStr for FeedbackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "off" => Ok(Self::None),
            "pll" | "phase_locked" | "phase-locked" => Ok(Self::PhaseLocked),
            "optimal" => Ok(Self::Optimal),
            other => Err(Error::InvalidConfig(format!("unknown feedback mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConfig {
    pub mode: FeedbackMode,
    /// Gain `A` (1/μs). `Ω_F = A[cos(Ωt+φ) + B]·dV`; the cancellation
    /// argument puts the optimum near `√η / dt`.
    pub gain: f64,
    /// Offset `B`.
    pub offset: f64,
    /// Reference phase; `None` picks 0 for a ground start and π for an
    /// excited start.
    pub phase: Option<f64>,
    pub delay_steps: usize,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self {
            mode: FeedbackMode::None,
            gain: 34.0,
            offset: -1.0,
            phase: None,
            delay_steps: 5,
        }
    }
}

impl FeedbackConfig {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn phase_locked(gain: f64, offset: f64, delay_steps: usize) -> Self {
        Self {
            mode: FeedbackMode::PhaseLocked,
            gain,
            offset,
            phase: None,
            delay_steps,
        }
    }

    pub fn optimal(delay_steps: usize) -> Self {
        Self {
            mode: FeedbackMode::Optimal,
            delay_steps,
            ..Self::default()
        }
    }

    /// Reference phase for a trajectory prepared in eigenstate `n`.
    pub fn reference_phase(&self, n: u8) -> f64 {
        self.phase.unwrap_or(if n == 0 { 0.0 } else { PI })
    }
}

/// Converts a delay in μs into whole steps of `dt`.
pub fn delay_to_steps(delay: f64, dt: f64) -> Result<usize> {
    let steps = delay / dt;
    if delay < 0.0 || (steps - steps.round()).abs() > 1e-6 {
        return Err(Error::InvalidConfig(format!(
            "loop delay {delay} us is not a non-negative multiple of dt = {dt} us"
        )));
    }
    Ok(steps.round() as usize)
}
