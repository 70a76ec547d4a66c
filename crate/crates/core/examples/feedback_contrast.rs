//! Measurement back-action dephases the Rabi oscillation; feedback driven by
//! the homodyne record can keep it going. Compares the ensemble contrast with
//! no feedback, phase-locked feedback and state-based optimal feedback, with
//! and without loop delay.

use qubit_thermo::stats::{rabi_contrast, ContrastWindow};
use qubit_thermo::{run_ensemble, EnsembleOptions, FeedbackConfig, SimConfig};

fn main() -> qubit_thermo::Result<()> {
    let sim = SimConfig::default();
    let cases = [
        ("none", FeedbackConfig::none()),
        ("phase-locked", FeedbackConfig::phase_locked(34.0, -1.0, 0)),
        ("phase-locked, 100 ns", FeedbackConfig::phase_locked(34.0, -1.0, 5)),
        ("optimal", FeedbackConfig::optimal(0)),
        ("optimal, 500 ns", FeedbackConfig::optimal(25)),
    ];
    for (label, fb) in cases {
        let ens = run_ensemble(&sim, &fb, 3_000, &EnsembleOptions::default())?;
        let (p00, _) = ens.mean_population_series(0);
        let c = rabi_contrast(&p00, sim.dt, sim.omega_r, &ContrastWindow::default())?;
        println!("{label:>22}: contrast {c:.3}, P00(8 us) = {:.3}", p00.last().unwrap());
    }
    Ok(())
}
