//! Qubit state algebra in the x–z plane of the Bloch sphere.
//!
//! The σ_y drive and the σ_x homodyne quadrature never generate a σ_y
//! component, so a state is fully described by `(x, z)`.
//!
//! **Convention:** `z = +1` is the *ground* state. With `H_q = -ħω_q σ_z / 2`
//! the σ_z = +1 eigenstate has the lower energy, and spontaneous decay drives
//! `z → +1`. Energies are measured in units of ħω_q, so `E₀ = -1/2` and
//! `E₁ = +1/2`, and the internal energy of a state is `P_e - 1/2`.

use serde::{Deserialize, Serialize};

/// Slack allowed on `x² + z² ≤ 1` after renormalization.
pub const BLOCH_TOLERANCE: f64 = 1e-9;

/// Conditional qubit state `(⟨σ_x⟩, ⟨σ_z⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub x: f64,
    pub z: f64,
}

impl BlochState {
    pub const GROUND: BlochState = BlochState { x: 0.0, z: 1.0 };
    pub const EXCITED: BlochState = BlochState { x: 0.0, z: -1.0 };

    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    /// Energy eigenstate with label `n` (0 = ground, 1 = excited).
    pub fn eigenstate(n: u8) -> Self {
        if n == 0 {
            Self::GROUND
        } else {
            Self::EXCITED
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.z * self.z
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite() && self.z.is_finite() && self.norm_sqr() <= 1.0 + BLOCH_TOLERANCE
    }

    /// `ρ₀₀ = (1 + z)/2`.
    pub fn ground_population(&self) -> f64 {
        0.5 * (1.0 + self.z)
    }

    /// `ρ₁₁ = (1 - z)/2`, the expectation of the projector onto `|1⟩`.
    pub fn excited_population(&self) -> f64 {
        0.5 * (1.0 - self.z)
    }

    /// `tr[Π_m ρ]`.
    pub fn population(&self, m: u8) -> f64 {
        if m == 0 {
            self.ground_population()
        } else {
            self.excited_population()
        }
    }

    /// `ρ₀₁ = x/2`; real because the dynamics never leave the x–z plane.
    pub fn coherence(&self) -> f64 {
        0.5 * self.x
    }

    /// `tr ρ² = (1 + x² + z²)/2`.
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.norm_sqr())
    }

    /// Internal energy `tr[H_q ρ]` in units of ħω_q.
    pub fn energy(&self) -> f64 {
        -0.5 * self.z
    }

    /// Oscillation phase, `atan2(-x, z)`.
    ///
    /// Chosen so that [`rotate_y`] by `θ` advances the phase by `θ`, and closed
    /// evolution from the ground state has phase `Ωt`.
    pub fn phase(&self) -> f64 {
        (-self.x).atan2(self.z)
    }
}

/// Free-function form of [`BlochState::excited_population`].
pub fn excited_population(s: &BlochState) -> f64 {
    s.excited_population()
}

/// Free-function form of [`BlochState::purity`].
pub fn purity(s: &BlochState) -> f64 {
    s.purity()
}

/// Exact rotation about y in the x–z plane.
///
/// `z' = z cos θ + x sin θ`, `x' = x cos θ − z sin θ`; for `θ = Ω dt` the
/// first-order terms are `dz = Ω x dt`, `dx = −Ω z dt`. Flipping the sign of
/// `x` everywhere is an equivalent gauge.
pub fn rotate_y(s: &BlochState, theta: f64) -> BlochState {
    let (sin, cos) = theta.sin_cos();
    BlochState {
        x: s.x * cos - s.z * sin,
        z: s.z * cos + s.x * sin,
    }
}

/// Change of `P_e` per radian for a rotation by `theta`, i.e.
/// `[P_e(rotate_y(s, θ)) − P_e(s)] / θ`, finite as `θ → 0`.
pub(crate) fn excited_population_slope(s: &BlochState, theta: f64) -> f64 {
    if theta.abs() < 1e-8 {
        // series: dz/dθ = x − zθ/2 + O(θ²)
        -0.5 * (s.x - 0.5 * s.z * theta)
    } else {
        let (sin, cos) = theta.sin_cos();
        let dz = s.z * (cos - 1.0) + s.x * sin;
        -0.5 * dz / theta
    }
}

/// Energy scale of the qubit. All energies are reported in units of ħω_q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScale {
    pub hbar_omega_q: f64,
    /// Inverse temperature in units of 1/(ħω_q).
    pub beta: f64,
}

impl EnergyScale {
    pub fn new(beta: f64) -> Self {
        Self {
            hbar_omega_q: 1.0,
            beta,
        }
    }

    /// Energy eigenvalue of level `n`: `E₀ = -1/2`, `E₁ = +1/2`.
    pub fn level(&self, n: u8) -> f64 {
        if n == 0 {
            -0.5 * self.hbar_omega_q
        } else {
            0.5 * self.hbar_omega_q
        }
    }

    /// Gibbs weights `(p_g, p_e)`.
    pub fn gibbs_weights(&self) -> (f64, f64) {
        gibbs_weights(self.beta)
    }
}

/// Gibbs weights `(p_g, p_e) = (e^{β/2}, e^{−β/2}) / 2cosh(β/2)`.
///
/// Evaluated through the logistic form so that large β does not overflow.
pub fn gibbs_weights(beta: f64) -> (f64, f64) {
    let p_e = 1.0 / (1.0 + beta.exp());
    (1.0 - p_e, p_e)
}

/// Closed-system transition probabilities `(P₀₀, P₁₁, P₁₀, P₀₁)`.
///
/// `omega` is the *population* Rabi angular frequency: `P₀₀ = cos²(Ωt)`.
/// The Bloch vector itself turns at `2Ω`, so a simulation with Bloch rotation
/// rate `ω` compares against `closed_rabi_probabilities(ω / 2, t)`.
pub fn closed_rabi_probabilities(omega: f64, t: f64) -> TransitionMatrix {
    let c2 = (omega * t).cos().powi(2);
    let s2 = (omega * t).sin().powi(2);
    TransitionMatrix {
        p00: c2,
        p11: c2,
        p10: s2,
        p01: s2,
    }
}

/// Transition probabilities `P_{m,n}` (final `m`, initial `n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub p00: f64,
    pub p11: f64,
    /// ground → excited
    pub p10: f64,
    /// excited → ground
    pub p01: f64,
}

impl TransitionMatrix {
    pub fn identity() -> Self {
        Self {
            p00: 1.0,
            p11: 1.0,
            p10: 0.0,
            p01: 0.0,
        }
    }

    pub fn get(&self, m: u8, n: u8) -> f64 {
        match (m, n) {
            (0, 0) => self.p00,
            (1, 1) => self.p11,
            (1, 0) => self.p10,
            _ => self.p01,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn populations() {
        assert_eq!(excited_population(&BlochState::new(0.0, 1.0)), 0.0);
        assert_eq!(excited_population(&BlochState::new(0.0, -1.0)), 1.0);
        assert_eq!(excited_population(&BlochState::new(1.0, 0.0)), 0.5);
    }

    #[test]
    fn purity_examples() {
        assert_eq!(purity(&BlochState::new(0.0, 1.0)), 1.0);
        assert_eq!(purity(&BlochState::new(0.0, 0.0)), 0.5);
        assert!(close(purity(&BlochState::new(0.6, 0.8)), 1.0));
    }

    #[test]
    fn rotation_examples() {
        let g = BlochState::GROUND;
        let r = rotate_y(&g, PI);
        assert!(close(r.x, 0.0) && close(r.z, -1.0));
        assert_eq!(rotate_y(&g, 0.0), g);
        let r = rotate_y(&g, FRAC_PI_2);
        assert!(close(r.x, -1.0) && close(r.z, 0.0));
    }

    #[test]
    fn rotation_advances_phase() {
        let s = BlochState::new(0.3, -0.4);
        let r = rotate_y(&s, 0.25);
        assert!(close(r.phase() - s.phase(), 0.25));
    }

    #[test]
    fn closed_rabi_examples() {
        let p = closed_rabi_probabilities(3.0, 0.0);
        assert_eq!((p.p00, p.p11, p.p10, p.p01), (1.0, 1.0, 0.0, 0.0));
        let p = closed_rabi_probabilities(2.0, FRAC_PI_2 / 2.0);
        assert!(close(p.p00, 0.0) && close(p.p11, 0.0) && close(p.p10, 1.0) && close(p.p01, 1.0));
        let p = closed_rabi_probabilities(1.0, FRAC_PI_4);
        for v in [p.p00, p.p11, p.p10, p.p01] {
            assert!(close(v, 0.5));
        }
    }

    #[test]
    fn stepwise_rotation_tracks_closed_rabi() {
        // Bloch rate ω turns populations as cos²(ωt/2).
        let omega = 2.0 * PI;
        let dt = 0.02;
        let mut s = BlochState::GROUND;
        for i in 1..=400 {
            s = rotate_y(&s, omega * dt);
            let p = closed_rabi_probabilities(omega / 2.0, i as f64 * dt);
            assert!((s.excited_population() - p.p10).abs() < 1e-10);
        }
    }

    #[test]
    fn gibbs_weights_limits() {
        assert_eq!(gibbs_weights(0.0), (0.5, 0.5));
        let (g, e) = gibbs_weights(3.5);
        assert!(close(g, (1.75f64).exp() / (2.0 * (1.75f64).cosh())));
        assert!(close(g + e, 1.0));
        assert_eq!(gibbs_weights(1e6).1, 0.0);
    }

    #[test]
    fn slope_matches_finite_rotation() {
        let s = BlochState::new(0.4, 0.7);
        for theta in [1e-10, 1e-6, 0.1, -0.7] {
            let d = rotate_y(&s, theta).excited_population() - s.excited_population();
            assert!((excited_population_slope(&s, theta) * theta - d).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn rotation_preserves_norm_and_composes(
            x in -0.7f64..0.7, z in -0.7f64..0.7, a in -10.0f64..10.0, b in -10.0f64..10.0
        ) {
            let s = BlochState::new(x, z);
            let r = rotate_y(&s, a);
            prop_assert!((r.norm_sqr() - s.norm_sqr()).abs() < 1e-14);
            let ab = rotate_y(&rotate_y(&s, a), b);
            let sum = rotate_y(&s, a + b);
            prop_assert!((ab.x - sum.x).abs() < 1e-12 && (ab.z - sum.z).abs() < 1e-12);
        }

        #[test]
        fn purity_bounds(r in 0.0f64..=1.0, phi in -PI..PI) {
            let s = BlochState::new(r * phi.sin(), r * phi.cos());
            let p = s.purity();
            prop_assert!((0.5..=1.0 + 1e-15).contains(&p));
            prop_assert_eq!((p - 1.0).abs() < 1e-14, (r - 1.0).abs() < 1e-14);
        }
    }
}
