//! Heat and work along quantum trajectories of a driven qubit under
//! continuous homodyne monitoring.
//!
//! The crate simulates the conditional (x, z) Bloch state of a resonantly
//! driven qubit whose fluorescence is measured by homodyne detection, books
//! every step's energy change as drive work, feedback work or heat, and turns
//! ensembles of such trajectories into transition probabilities, work
//! distributions, Jarzynski averages and the feedback efficacy.
//!
//! Modules:
//!
//! - [`qubit`]: Bloch-state algebra and closed-system references.
//! - [`sme`]: homodyne sampling and the split Itô step with its ledger.
//! - [`feedback`]: phase-locked and optimal feedback, loop delay, gain sweep.
//! - [`trajectory`], [`ensemble`]: single runs and seeded parallel ensembles.
//! - [`stats`]: transition ledgers, work distributions, efficacy, contrast.
//! - [`oracle`]: unconditional Lindblad evolution and two-point sampling.
//! - [`app`]: configuration files and the experiments behind the `qthermo`
//!   binary.
//!
//! Units: μs, rad/μs, and ħω_q for energies. `z = +1` is the ground state.

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod feedback;
pub mod io;
pub mod oracle;
pub mod qubit;
pub mod sme;
pub mod stats;
pub mod trajectory;

pub use config::{FeedbackConfig, FeedbackMode, InitialState, SimConfig};
pub use ensemble::{run_ensemble, run_ensemble_records, Ensemble, EnsembleOptions, TrajectorySummary};
pub use error::{Error, Result};
pub use qubit::{BlochState, EnergyScale, TransitionMatrix};
pub use sme::{HomodyneSample, StepLedger};
pub use trajectory::{simulate_trajectory, TrajectoryRecord};
