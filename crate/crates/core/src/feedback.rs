//! Feedback laws: the phase-locked loop and the optimal phase-restoring
//! rotation, each behind an optional loop delay.

use crate::config::{FeedbackConfig, FeedbackMode, SimConfig};
use crate::ensemble::{run_ensemble, EnsembleOptions};
use crate::error::{Error, Result};
use crate::qubit::{rotate_y, BlochState};
use crate::sme::{HomodyneSample, KickedState};
use crate::stats::{rabi_contrast, ContrastWindow};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Fixed-length FIFO: the value pushed at step `i` comes out at step
/// `i + delay_steps`; zeros come out before that.
#[derive(Debug, Clone)]
pub struct DelayLine {
    buffer: VecDeque<f64>,
}

impl DelayLine {
    pub fn new(delay_steps: usize) -> Self {
        Self {
            buffer: std::iter::repeat_n(0.0, delay_steps).collect(),
        }
    }

    pub fn delay_steps(&self) -> usize {
        self.buffer.len()
    }

    pub fn apply(&mut self, now: f64) -> f64 {
        if self.buffer.is_empty() {
            return now;
        }
        self.buffer.push_back(now);
        self.buffer.pop_front().unwrap_or(0.0)
    }

    /// Sum of the values still in flight.
    pub fn pending(&self) -> f64 {
        self.buffer.iter().sum()
    }
}

/// Free-function form of [`DelayLine::apply`].
pub fn apply_delay(line: &mut DelayLine, omega_f_now: f64) -> f64 {
    line.apply(omega_f_now)
}

/// `Ω_F = A [cos(Ω t + φ) + B] dV`.
///
/// Replacing `z` by its closed-evolution target `cos(Ωt + φ)` in the
/// z-cancelling drive `−√η (1 − z) dV / dt` gives this form with
/// `A = √η / dt` and `B = −1`.
pub fn phase_locked_control(smp: &HomodyneSample, t: f64, fb: &FeedbackConfig, sim: &SimConfig, phase: f64) -> f64 {
    fb.gain * ((sim.omega_r * t + phase).cos() + fb.offset) * smp.dv
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Rotation angle that moves `s_actual` onto `target_phase`.
///
/// Phase is measured as in [`BlochState::phase`], so
/// `rotate_y(s, optimal_control(s, φ))` has phase `φ` and the same purity.
pub fn optimal_control(s_actual: &BlochState, target_phase: f64) -> f64 {
    wrap_angle(target_phase - s_actual.phase())
}

/// Per-trajectory controller state.
#[derive(Debug, Clone)]
pub struct Controller {
    cfg: FeedbackConfig,
    phase: f64,
    line: DelayLine,
}

impl Controller {
    /// Controller for a trajectory prepared in eigenstate `n`.
    pub fn new(cfg: &FeedbackConfig, n: u8) -> Self {
        Self {
            cfg: *cfg,
            phase: cfg.reference_phase(n),
            line: DelayLine::new(cfg.delay_steps),
        }
    }

    pub fn mode(&self) -> FeedbackMode {
        self.cfg.mode
    }

    /// Feedback angular frequency for the step starting at `t`.
    pub fn omega(&mut self, t: f64, smp: &HomodyneSample, kicked: &KickedState, sim: &SimConfig) -> f64 {
        let now = match self.cfg.mode {
            FeedbackMode::None => return 0.0,
            // reference evaluated where the back-action acted, mid-step
            FeedbackMode::PhaseLocked => {
                phase_locked_control(smp, t + 0.5 * sim.dt, &self.cfg, sim, self.phase)
            }
            FeedbackMode::Optimal => {
                // phase the state will have once the drive finishes the step
                let drifted = rotate_y(&kicked.state, kicked.remaining_drive_angle);
                let target = sim.omega_r * (t + sim.dt) + self.phase;
                // corrections still in the loop will land later
                let theta = wrap_angle(optimal_control(&drifted, target) - self.line.pending() * sim.dt);
                theta / sim.dt
            }
        };
        self.line.apply(now)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gain: f64,
    pub offset: f64,
    pub contrast: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub argmax: SweepPoint,
}

/// Rabi contrast of phase-locked feedback on an `(A, B)` grid.
///
/// Points are stored offset-major, gain varying fastest. Every grid point
/// reuses the same seed, so differences between points are not masked by
/// independent noise.
pub fn sweep_gain_offset(
    gains: &[f64],
    offsets: &[f64],
    sim: &SimConfig,
    template: &FeedbackConfig,
    n_traj: usize,
    opts: &EnsembleOptions,
    window: &ContrastWindow,
) -> Result<SweepResult> {
    if gains.is_empty() || offsets.is_empty() {
        return Err(Error::InvalidConfig("sweep ranges must be non-empty".into()));
    }
    let mut points = Vec::with_capacity(gains.len() * offsets.len());
    for &offset in offsets {
        for &gain in gains {
            let fb = FeedbackConfig {
                mode: FeedbackMode::PhaseLocked,
                gain,
                offset,
                ..*template
            };
            let ens = run_ensemble(sim, &fb, n_traj, opts)?;
            let p00 = ens.mean_population_series(0).0;
            let contrast = rabi_contrast(&p00, sim.dt, sim.omega_r, window)?;
            points.push(SweepPoint { gain, offset, contrast });
        }
    }
    let argmax = points
        .iter()
        .max_by(|a, b| a.contrast.total_cmp(&b.contrast))
        .cloned()
        .expect("non-empty grid");
    Ok(SweepResult { points, argmax })
}
