//! Deterministic references for the Monte Carlo engine.

use crate::error::{Error, Result};
use crate::qubit::{closed_rabi_probabilities, gibbs_weights, BlochState};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Unconditional Bloch components on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LindbladSolution {
    pub times: Vec<f64>,
    pub x_mean: Vec<f64>,
    pub z_mean: Vec<f64>,
}

impl LindbladSolution {
    pub fn excited_population(&self) -> Vec<f64> {
        self.z_mean.iter().map(|z| 0.5 * (1.0 - z)).collect()
    }

    pub fn ground_population(&self) -> Vec<f64> {
        self.z_mean.iter().map(|z| 0.5 * (1.0 + z)).collect()
    }
}

fn rhs(gamma: f64, omega: f64, x: f64, z: f64) -> (f64, f64) {
    (-omega * z - 0.5 * gamma * x, omega * x + gamma * (1.0 - z))
}

fn rk4(gamma: f64, omega: f64, (x, z): (f64, f64), h: f64) -> (f64, f64) {
    let k1 = rhs(gamma, omega, x, z);
    let k2 = rhs(gamma, omega, x + 0.5 * h * k1.0, z + 0.5 * h * k1.1);
    let k3 = rhs(gamma, omega, x + 0.5 * h * k2.0, z + 0.5 * h * k2.1);
    let k4 = rhs(gamma, omega, x + h * k3.0, z + h * k3.1);
    (
        x + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        z + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

/// Sub-steps per grid interval.
pub const RK4_SUBSTEPS: usize = 10;

/// Integrates `dx/dt = −Ωz − γx/2`, `dz/dt = Ωx + γ(1 − z)` with fixed-step
/// RK4, `RK4_SUBSTEPS` sub-steps between consecutive grid points. The grid
/// must be non-decreasing.
pub fn lindblad_evolve(initial: &BlochState, gamma: f64, omega: f64, t_grid: &[f64]) -> LindbladSolution {
    let mut times = Vec::with_capacity(t_grid.len());
    let mut x_mean = Vec::with_capacity(t_grid.len());
    let mut z_mean = Vec::with_capacity(t_grid.len());
    let mut state = (initial.x, initial.z);
    let mut t_prev = 0.0;
    for &t in t_grid {
        let h = (t - t_prev) / RK4_SUBSTEPS as f64;
        if h > 0.0 {
            for _ in 0..RK4_SUBSTEPS {
                state = rk4(gamma, omega, state, h);
            }
        }
        t_prev = t;
        times.push(t);
        x_mean.push(state.0);
        z_mean.push(state.1);
    }
    LindbladSolution { times, x_mean, z_mean }
}

/// One two-point-measurement work sample for a closed qubit.
///
/// `omega` uses the population convention of
/// [`closed_rabi_probabilities`].
pub fn closed_two_point_sample<R: Rng + ?Sized>(beta: f64, omega: f64, tau: f64, rng: &mut R) -> f64 {
    let (_, p_e) = gibbs_weights(beta);
    let n = u8::from(rng.random::<f64>() < p_e);
    let p = closed_rabi_probabilities(omega, tau);
    let flip = rng.random::<f64>() < if n == 0 { p.p10 } else { p.p01 };
    match (n, flip) {
        (0, true) => 1.0,
        (1, true) => -1.0,
        _ => 0.0,
    }
}

/// `max_t |mean − oracle| / stderr`.
///
/// Points with zero standard error count only if mean and oracle differ by
/// more than `1e-12`, in which case the score is infinite.
pub fn ensemble_vs_oracle(mean: &[f64], stderr: &[f64], oracle: &[f64]) -> Result<f64> {
    if mean.len() != oracle.len() || stderr.len() != oracle.len() {
        return Err(Error::LengthMismatch {
            left: mean.len(),
            right: oracle.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for ((m, s), o) in mean.iter().zip(stderr).zip(oracle) {
        let diff = (m - o).abs();
        let z = if *s > 0.0 {
            diff / s
        } else if diff > 1e-12 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(z);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..=n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn closed_rabi_solution() {
        let omega = 2.0 * PI;
        let g = grid(400, 0.02);
        let sol = lindblad_evolve(&BlochState::GROUND, 0.0, omega, &g);
        for (i, t) in g.iter().enumerate() {
            assert!((sol.z_mean[i] - (omega * t).cos()).abs() < 1e-7);
            assert!((sol.x_mean[i] + (omega * t).sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn pure_decay_solution() {
        let g = grid(400, 0.02);
        let sol = lindblad_evolve(&BlochState::EXCITED, 1.7, 0.0, &g);
        for (i, t) in g.iter().enumerate() {
            assert!((sol.z_mean[i] - (1.0 - 2.0 * (-1.7 * t).exp())).abs() < 1e-10);
        }
    }

    #[test]
    fn damped_oscillation_settles_near_half() {
        let g = grid(2000, 0.02);
        let sol = lindblad_evolve(&BlochState::GROUND, 1.7, 2.0 * PI, &g);
        let p00 = sol.ground_population();
        // steady state z = γ² / (γ² + 2Ω²)
        let zs = 1.7f64.powi(2) / (1.7f64.powi(2) + 2.0 * (2.0 * PI).powi(2));
        assert!((p00.last().unwrap() - 0.5 * (1.0 + zs)).abs() < 1e-9);
        assert!((p00.last().unwrap() - 0.5).abs() < 0.02);
        assert!(p00.iter().skip(10).any(|p| *p < 0.3));
    }

    #[test]
    fn two_point_sampler_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(closed_two_point_sample(3.5, 1.0, 0.0, &mut rng), 0.0);
        }
        // β → ∞ always starts in the ground state, so W ≥ 0
        for _ in 0..1000 {
            assert!(closed_two_point_sample(1e6, 1.0, 0.7, &mut rng) >= 0.0);
        }
    }

    #[test]
    fn two_point_sampler_mass_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (beta, omega, tau) = (1.0, 1.0, 0.6);
        let n = 200_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let w = closed_two_point_sample(beta, omega, tau, &mut rng);
            counts[(w + 1.0) as usize] += 1;
        }
        let (p_g, p_e) = gibbs_weights(beta);
        let s = (omega * tau).sin().powi(2);
        let expected = [p_e * s, 1.0 - s, p_g * s];
        for k in 0..3 {
            let f = counts[k] as f64 / n as f64;
            let se = (expected[k] * (1.0 - expected[k]) / n as f64).sqrt();
            assert!((f - expected[k]).abs() < 5.0 * se, "bin {k}: {f} vs {}", expected[k]);
        }
    }

    #[test]
    fn oracle_against_itself() {
        let g = grid(100, 0.02);
        let p = lindblad_evolve(&BlochState::GROUND, 1.7, 2.0 * PI, &g).excited_population();
        let se = vec![0.01; p.len()];
        assert_eq!(ensemble_vs_oracle(&p, &se, &p).unwrap(), 0.0);
        assert!(ensemble_vs_oracle(&p[..50], &se, &p).is_err());
    }
}
