//! Energy bookkeeping along trajectories. Every step splits the change of
//! excited population into drive work, feedback work and measurement heat;
//! the pieces must add up to the change of energy, trajectory by trajectory.
//! The path-dependent prediction for P00 is then checked against projective
//! readouts taken at random stopping times.

use qubit_thermo::app::first_law_binning;
use qubit_thermo::{run_ensemble, EnsembleOptions, FeedbackConfig, SimConfig};

fn main() -> qubit_thermo::Result<()> {
    let sim = SimConfig::default();
    let fb = FeedbackConfig::phase_locked(34.0, -1.0, 0);
    let opts = EnsembleOptions::default();

    let ens = run_ensemble(&sim, &fb, 2_000, &opts)?;
    println!("max |dU - (W + W_F + Q)| over {} trajectories: {:.2e}", ens.len(), ens.max_first_law_residual());

    let first = ens.transition_ledgers(0)[0];
    println!(
        "first trajectory: P00 = 1 + {:.4} (W) + {:.4} (Q) + {:.4} (F) = {:.4}",
        first.p_w, first.p_q, first.p_f, first.p_total
    );

    let binned = first_law_binning(&sim, &fb, 10_000, 10, &opts)?;
    println!("\n predicted  observed  count");
    for b in &binned.bins {
        println!("{:10.3} {:9.3} {:6}", b.predicted, b.observed, b.count);
    }
    println!("reduced chi2 = {:.3} ({} bins)", binned.reduced_chi2, binned.dof);
    Ok(())
}
