//! Homodyne sampling and the conditional state update.
//!
//! One step of length `dt` is split into sub-steps whose energy changes are
//! booked separately:
//!
//! 1. half of the drive rotation (work),
//! 2. decay plus measurement back-action (heat),
//! 3. the other half of the drive rotation together with the feedback
//!    rotation (work and feedback work, shared in proportion to their angles).
//!
//! Putting the drive symmetrically around the dissipative sub-step removes
//! the O(dt) splitting bias of the ensemble mean. The feedback rotation acts
//! after the back-action it responds to, which is the causal Itô ordering
//! for a controller driven by the current record increment.
//!
//! Noise normalization: `dV` has variance `γ dt`, the innovation is
//! `dV − γ√η x dt = √γ dX`, so the stochastic terms carry `√(ηγ) dX`.

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::qubit::{excited_population_slope, rotate_y, BlochState};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Values beyond this in |x| or |z| before renormalization mean `dt` is too
/// coarse.
pub const BLOWUP_LIMIT: f64 = 1.5;

/// Pre-step states this close to the unit circle count as pure.
const PURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneSample {
    /// Record increment, variance `γ dt`.
    pub dv: f64,
    /// Underlying Wiener increment, variance `dt`.
    pub dx: f64,
}

/// Energy bookkeeping for one step, in units of ħω_q.
///
/// With ħω_q = 1 these are also the increments of the transition probability
/// into the excited state, `tr[Π₁ δ·]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepLedger {
    /// Work done by the Rabi drive.
    pub dw: f64,
    /// Work done by the feedback drive.
    pub dwf: f64,
    /// Heat exchanged with the monitored environment.
    pub dq: f64,
    /// Change of internal energy.
    pub du: f64,
    /// Feedback angular frequency that was applied (rad/μs).
    pub omega_fb: f64,
}

impl StepLedger {
    /// Increments `(δP^W, δP^F, δP^Q)` of the transition probability into
    /// level `m`. `Π₀ = 1 − Π₁` flips the sign for `m = 0`.
    pub fn transition_increments(&self, m: u8) -> (f64, f64, f64) {
        let sign = if m == 0 { -1.0 } else { 1.0 };
        (sign * self.dw, sign * self.dwf, sign * self.dq)
    }

    pub fn first_law_gap(&self) -> f64 {
        self.du - (self.dw + self.dwf + self.dq)
    }
}

pub fn sample_homodyne<R: Rng + ?Sized>(s: &BlochState, cfg: &SimConfig, rng: &mut R) -> HomodyneSample {
    let z: f64 = rng.sample(StandardNormal);
    let dx = z * cfg.dt.sqrt();
    HomodyneSample {
        dv: cfg.eta.sqrt() * cfg.gamma * s.x * cfg.dt + cfg.gamma.sqrt() * dx,
        dx,
    }
}

/// Pulls an Itô–Euler overshoot back onto the unit circle; interior points
/// are returned unchanged.
pub fn renormalize(s: &BlochState) -> BlochState {
    let r2 = s.norm_sqr();
    if r2 > 1.0 {
        let k = r2.sqrt().recip();
        BlochState::new(s.x * k, s.z * k)
    } else {
        *s
    }
}

fn check_blowup(s: &BlochState) -> Result<()> {
    if !(s.x.abs() <= BLOWUP_LIMIT && s.z.abs() <= BLOWUP_LIMIT) {
        return Err(Error::NumericalBlowup {
            step: 0,
            x: s.x,
            z: s.z,
        });
    }
    Ok(())
}

fn innovation(s: &BlochState, smp: &HomodyneSample, cfg: &SimConfig) -> f64 {
    smp.dv - cfg.gamma * cfg.eta.sqrt() * s.x * cfg.dt
}

/// One full Itô–Euler step of the Bloch-form SME with total drive
/// `omega_total = Ω_R + Ω_F`, followed by [`renormalize`].
pub fn ito_step(s: &BlochState, smp: &HomodyneSample, omega_total: f64, cfg: &SimConfig) -> Result<BlochState> {
    let (x, z, dt, g) = (s.x, s.z, cfg.dt, cfg.gamma);
    let sq = cfg.eta.sqrt();
    let innov = innovation(s, smp, cfg);
    let next = BlochState::new(
        x - omega_total * z * dt - 0.5 * g * x * dt + sq * (1.0 - z - x * x) * innov,
        z + omega_total * x * dt + g * (1.0 - z) * dt + sq * x * (1.0 - z) * innov,
    );
    check_blowup(&next)?;
    Ok(renormalize(&next))
}

/// The nonunitary sub-step: amplitude damping integrated exactly over `dt`
/// plus the Itô back-action term evaluated at the pre-step state.
///
/// At `η = 1` a pure input is mapped back onto the unit circle, since the
/// exact dynamics keep it pure.
pub fn dissipate(s: &BlochState, smp: &HomodyneSample, cfg: &SimConfig) -> Result<BlochState> {
    if cfg.gamma == 0.0 {
        return Ok(*s);
    }
    let (x, z) = (s.x, s.z);
    let sq = cfg.eta.sqrt();
    let innov = innovation(s, smp, cfg);
    let decay = (-cfg.gamma * cfg.dt).exp();
    let next = BlochState::new(
        x * decay.sqrt() + sq * (1.0 - z - x * x) * innov,
        1.0 - (1.0 - z) * decay + sq * x * (1.0 - z) * innov,
    );
    check_blowup(&next)?;
    if cfg.eta == 1.0 && s.norm_sqr() >= 1.0 - PURE_TOLERANCE {
        let k = next.norm_sqr().sqrt().recip();
        return Ok(BlochState::new(next.x * k, next.z * k));
    }
    Ok(renormalize(&next))
}

/// Everything the feedback law may look at when it is evaluated inside a
/// step: the state right after the back-action and the part of the drive
/// rotation still to come.
#[derive(Debug, Clone, Copy)]
pub struct KickedState {
    pub state: BlochState,
    pub remaining_drive_angle: f64,
}

/// One split step. `feedback` returns the feedback angular frequency to
/// apply during this step, given the post-back-action state.
pub fn split_step<F>(
    s: &BlochState,
    smp: &HomodyneSample,
    omega_drive: f64,
    cfg: &SimConfig,
    feedback: F,
) -> Result<(BlochState, StepLedger)>
where
    F: FnOnce(&KickedState) -> f64,
{
    let half = 0.5 * omega_drive * cfg.dt;
    let pe0 = s.excited_population();

    let s1 = rotate_y(s, half);
    let pe1 = s1.excited_population();

    let s2 = dissipate(&s1, smp, cfg)?;
    let pe2 = s2.excited_population();

    let omega_fb = feedback(&KickedState {
        state: s2,
        remaining_drive_angle: half,
    });
    let theta_fb = omega_fb * cfg.dt;
    let theta = half + theta_fb;
    let s3 = rotate_y(&s2, theta);
    let pe3 = s3.excited_population();

    let second = pe3 - pe2;
    let dwf = excited_population_slope(&s2, theta) * theta_fb;
    let ledger = StepLedger {
        dw: (pe1 - pe0) + (second - dwf),
        dwf,
        dq: pe2 - pe1,
        du: pe3 - pe0,
        omega_fb,
    };
    Ok((s3, ledger))
}

/// [`split_step`] with a feedback drive fixed before the step.
pub fn split_step_open_loop(
    s: &BlochState,
    smp: &HomodyneSample,
    omega_drive: f64,
    omega_fb: f64,
    cfg: &SimConfig,
) -> Result<(BlochState, StepLedger)> {
    split_step(s, smp, omega_drive, cfg, |_| omega_fb)
}
