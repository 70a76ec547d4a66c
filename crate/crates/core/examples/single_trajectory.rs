//! One monitored trajectory under free Rabi drive: the state, the homodyne
//! record and the per-step heat/work ledger.

use qubit_thermo::ensemble::trajectory_rng;
use qubit_thermo::{simulate_trajectory, FeedbackConfig, SimConfig};

fn main() -> qubit_thermo::Result<()> {
    let cfg = SimConfig {
        tau: 2.0,
        ..SimConfig::default()
    };
    let rec = simulate_trajectory(&cfg, &FeedbackConfig::none(), &mut trajectory_rng(cfg.seed, 0))?;

    println!("{:>6} {:>8} {:>8} {:>9} {:>9} {:>9}", "t/us", "x", "z", "dV", "dW", "dQ");
    for k in (0..rec.len()).step_by(10) {
        let (s, l) = (rec.states[k], rec.ledgers[k]);
        println!(
            "{:6.2} {:8.4} {:8.4} {:9.5} {:9.5} {:9.5}",
            rec.times[k], s.x, s.z, rec.samples[k].dv, l.dw, l.dq
        );
    }
    let totals = rec.totals();
    println!(
        "\nW = {:.4}, Q = {:.4}, dU = {:.4} (hbar*omega_q); readout at tau: {:?}",
        totals.work, totals.heat, totals.energy, rec.final_outcome
    );
    Ok(())
}
