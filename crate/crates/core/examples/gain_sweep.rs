//! Contrast of the phase-locked loop over its gain and offset.

use qubit_thermo::app::linspace;
use qubit_thermo::feedback::sweep_gain_offset;
use qubit_thermo::stats::ContrastWindow;
use qubit_thermo::{EnsembleOptions, FeedbackConfig, SimConfig};

fn main() -> qubit_thermo::Result<()> {
    let sim = SimConfig::default();
    let gains = linspace(0.0, 80.0, 9);
    let offsets = linspace(-2.0, 0.0, 5);
    let sweep = sweep_gain_offset(
        &gains,
        &offsets,
        &sim,
        &FeedbackConfig::phase_locked(0.0, 0.0, 0),
        300,
        &EnsembleOptions::default(),
        &ContrastWindow::default(),
    )?;

    print!("  A\\B ");
    for b in &offsets {
        print!("{b:7.2}");
    }
    println!();
    for (i, a) in gains.iter().enumerate() {
        print!("{a:5.0} ");
        for j in 0..offsets.len() {
            print!("{:7.3}", sweep.points[j * gains.len() + i].contrast);
        }
        println!();
    }
    let best = sweep.argmax;
    println!("best: A = {}, B = {} -> {:.3}", best.gain, best.offset, best.contrast);
    Ok(())
}
