//! Jarzynski equality for an isolated, Rabi-driven qubit measured at the
//! start and end of the drive: the exact work distribution and a brute-force
//! sample give <exp(-beta W)> = 1 for every pulse length.

use qubit_thermo::oracle::closed_two_point_sample;
use qubit_thermo::qubit::closed_rabi_probabilities;
use qubit_thermo::stats::{jarzynski_average, two_point_work_distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qubit_thermo::Result<()> {
    let beta = 3.5;
    let omega = std::f64::consts::PI;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    println!("{:>5} {:>8} {:>10} {:>10}", "tau", "<W>", "exact", "sampled");
    for k in 1..=10 {
        let tau = 0.1 * k as f64;
        let wd = two_point_work_distribution(beta, &closed_rabi_probabilities(omega, tau))?;
        let n = 200_000;
        let sampled = (0..n)
            .map(|_| (-beta * closed_two_point_sample(beta, omega, tau, &mut rng)).exp())
            .sum::<f64>()
            / n as f64;
        println!("{tau:5.1} {:8.4} {:10.6} {sampled:10.4}", wd.mean_work(), jarzynski_average(&wd));
    }
    Ok(())
}
