//! Feedback work undoes the heat deposited by the measurement kick, so the two
//! are anti-correlated step by step. A loop delay destroys the correlation at
//! zero lag; shifting the feedback series by the delay partly restores it.

use qubit_thermo::ensemble::run_ensemble_map;
use qubit_thermo::stats::feedback_heat_correlation;
use qubit_thermo::{EnsembleOptions, FeedbackConfig, SimConfig};

fn main() -> qubit_thermo::Result<()> {
    let sim = SimConfig::default();
    let opts = EnsembleOptions::default();
    for (label, fb) in [
        ("optimal", FeedbackConfig::optimal(0)),
        ("phase-locked", FeedbackConfig::phase_locked(34.0, -1.0, 0)),
        ("phase-locked, 100 ns", FeedbackConfig::phase_locked(34.0, -1.0, 5)),
    ] {
        let records = run_ensemble_map(&sim, &fb, 200, &opts, |_, rec, _| rec)?;
        let r: Vec<String> = (0..=6)
            .map(|lag| feedback_heat_correlation(&records, lag).map(|r| format!("{r:+.2}")))
            .collect::<qubit_thermo::Result<_>>()?;
        println!("{label:>20}: r(lag 0..6) = {}", r.join(" "));
    }
    Ok(())
}
