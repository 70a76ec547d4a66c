//! Efficacy of optimal feedback from two independent routes: the averaged
//! trajectories of ground and excited preparations, and the work
//! distribution of sampled projective readouts. It approaches one as the
//! detector efficiency improves.

use qubit_thermo::app::efficacy_comparison;
use qubit_thermo::stats::BootstrapOptions;
use qubit_thermo::{EnsembleOptions, FeedbackConfig, SimConfig};

fn main() -> qubit_thermo::Result<()> {
    let beta = 3.5;
    let boot = BootstrapOptions { resamples: 300, seed: 1 };
    for eta in [0.35, 0.6, 0.8, 1.0] {
        let sim = SimConfig {
            eta,
            tau: 1.0,
            dt: 0.01,
            ..SimConfig::default()
        };
        let cmp = efficacy_comparison(&sim, &FeedbackConfig::optimal(0), 500, beta, &EnsembleOptions::default(), &boot)?;
        let tr = &cmp.trajectory_route;
        let mid = tr.times.len() / 2;
        println!(
            "eta = {eta:.2}: <(gamma_q - 1)^2> = {:.2e}; at t = {:.2} us gamma_q = {:.3} +/- {:.3} (trajectories), {:.3} +/- {:.3} (work)",
            tr.mean_squared_deviation(0.0, 1.0),
            tr.times[mid],
            tr.gamma_q[mid],
            tr.stderr[mid],
            cmp.work_route[mid].mean,
            cmp.work_route[mid].stderr,
        );
    }
    Ok(())
}
