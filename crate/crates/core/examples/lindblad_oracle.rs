//! Averaging many measured trajectories must recover the unconditional
//! (Lindblad) evolution, whatever the detector efficiency.

use qubit_thermo::oracle::{ensemble_vs_oracle, lindblad_evolve};
use qubit_thermo::{run_ensemble, BlochState, EnsembleOptions, FeedbackConfig, SimConfig};

fn main() -> qubit_thermo::Result<()> {
    for eta in [0.0, 0.35, 0.8] {
        let sim = SimConfig {
            eta,
            // strong measurement kicks need a finer step to stay inside the Bloch ball
            dt: if eta > 0.5 { 0.01 } else { 0.02 },
            ..SimConfig::default()
        };
        let ens = run_ensemble(&sim, &FeedbackConfig::none(), 4_000, &EnsembleOptions::default())?;
        let (mean, se) = ens.mean_population_series(1);
        let oracle = lindblad_evolve(&BlochState::GROUND, sim.gamma, sim.omega_r, &ens.times()).excited_population();
        if eta == 0.0 {
            // nothing is learned, so every trajectory is the same deterministic path
            let err = mean.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            println!("eta = 0.00: max |P_e - master equation| = {err:.1e} (time-step error only)");
        } else {
            let z = ensemble_vs_oracle(&mean, &se, &oracle)?;
            println!("eta = {eta:.2}: max z-score vs master equation = {z:.2}");
        }
    }
    Ok(())
}
