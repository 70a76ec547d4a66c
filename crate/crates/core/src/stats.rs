//! Thermodynamic observables built from trajectory ledgers.

use crate::ensemble::{Ensemble, TrajectorySummary};
use crate::error::{Error, Result};
use crate::qubit::{gibbs_weights, BlochState, TransitionMatrix};
use crate::trajectory::{LedgerTotals, TrajectoryRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Sample mean and standard error (`s / √n`, `s` with Bessel's correction).
/// A single value has zero error.
pub fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Path-dependent decomposition of `P̃_{m,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionLedger {
    pub p_w: f64,
    pub p_q: f64,
    pub p_f: f64,
    /// `tr[Π_m ρ̃_τ]`
    pub p_total: f64,
    pub n: u8,
    pub m: u8,
}

impl TransitionLedger {
    pub fn from_totals(totals: &LedgerTotals, final_state: &BlochState, n: u8, m: u8) -> Self {
        let sign = if m == 0 { -1.0 } else { 1.0 };
        Self {
            p_w: sign * totals.work,
            p_q: sign * totals.heat,
            p_f: sign * totals.feedback_work,
            p_total: final_state.population(m),
            n,
            m,
        }
    }

    /// `P⁰_{m,n}` for an eigenstate preparation.
    pub fn initial_probability(&self) -> f64 {
        if self.m == self.n {
            1.0
        } else {
            0.0
        }
    }

    /// `P⁰ + P̃^W + P̃^Q + P̃^F`.
    pub fn path_sum(&self) -> f64 {
        self.initial_probability() + self.p_w + self.p_q + self.p_f
    }

    pub fn decomposition_gap(&self) -> f64 {
        (self.p_total - self.path_sum()).abs()
    }
}

pub fn accumulate(record: &TrajectoryRecord, m: u8) -> TransitionLedger {
    TransitionLedger::from_totals(&record.totals(), &record.final_state(), record.initial_label, m)
}

/// `|ΔŨ − Σ(dW + dWF + dQ)|` with `ΔŨ` read off the initial and final states.
pub fn first_law_residual(record: &TrajectoryRecord) -> f64 {
    let du = record.final_state().energy() - record.initial.energy();
    let sum: f64 = record.ledgers.iter().map(|l| l.dw + l.dwf + l.dq).sum();
    (du - sum).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilitySource {
    /// Mean of `tr[Π_m ρ̃_τ]` over trajectories.
    Expectation,
    /// Frequency of sampled projective outcomes.
    Projective,
}

/// `P_{m,n}` at `τ` from the trajectories prepared in `n`.
pub fn transition_probabilities(
    trajectories: &[TrajectorySummary],
    m: u8,
    n: u8,
    source: ProbabilitySource,
) -> Result<Estimate> {
    let vals = trajectories
        .iter()
        .filter(|t| t.initial_label == n)
        .map(|t| match source {
            ProbabilitySource::Expectation => Ok(t.final_state.population(m)),
            ProbabilitySource::Projective => t
                .final_outcome
                .map(|o| if o == m { 1.0 } else { 0.0 })
                .ok_or_else(|| Error::InvalidConfig("projective outcomes were not sampled".into())),
        })
        .collect::<Result<Vec<f64>>>()?;
    if vals.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let (mean, stderr) = mean_and_stderr(&vals);
    Ok(Estimate { mean, stderr })
}

/// Distribution of `W = E_m − E_n` on the support `{−1, 0, +1}` (ħω_q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkDistribution {
    pub support: [f64; 3],
    pub probabilities: [f64; 3],
    pub beta: f64,
}

impl WorkDistribution {
    pub fn mean_work(&self) -> f64 {
        self.support.iter().zip(&self.probabilities).map(|(w, p)| w * p).sum()
    }
}

/// Two-point-measurement work distribution for a Gibbs initial state.
pub fn two_point_work_distribution(beta: f64, t: &TransitionMatrix) -> Result<WorkDistribution> {
    for (name, p) in [("P00", t.p00), ("P11", t.p11), ("P10", t.p10), ("P01", t.p01)] {
        if !(-1e-12..=1.0 + 1e-12).contains(&p) {
            return Err(Error::InvalidProbability(format!("{name} = {p}")));
        }
    }
    if (t.p00 + t.p10 - 1.0).abs() > 1e-9 || (t.p11 + t.p01 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbability("transition rows do not sum to one".into()));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidProbability(format!("beta = {beta}")));
    }
    let (p_g, p_e) = gibbs_weights(beta);
    Ok(WorkDistribution {
        support: [-1.0, 0.0, 1.0],
        probabilities: [p_e * t.p01, p_g * t.p00 + p_e * t.p11, p_g * t.p10],
        beta,
    })
}

/// `⟨e^{−βW}⟩`; with ΔF = 0 this is the efficacy γ_q.
pub fn jarzynski_average(wd: &WorkDistribution) -> f64 {
    wd.support
        .iter()
        .zip(&wd.probabilities)
        .filter(|(_, p)| **p > 0.0)
        .map(|(w, p)| p * (-wd.beta * w).exp())
        .sum()
}

/// Efficacy from measured `P₀₀(t)` (ground preparations) and `P₀₁(t)`
/// (excited preparations), via the work distribution.
pub fn work_route_efficacy(p00: &[Estimate], p01: &[Estimate], beta: f64) -> Result<Vec<Estimate>> {
    if p00.len() != p01.len() {
        return Err(Error::LengthMismatch {
            left: p00.len(),
            right: p01.len(),
        });
    }
    // ∂γ/∂P₀₀ = ∂γ/∂P₀₁ = tanh(β/2)
    let slope = (0.5 * beta).tanh();
    p00.iter()
        .zip(p01)
        .map(|(a, b)| {
            let t = TransitionMatrix {
                p00: a.mean,
                p10: 1.0 - a.mean,
                p01: b.mean,
                p11: 1.0 - b.mean,
            };
            let wd = two_point_work_distribution(beta, &t)?;
            Ok(Estimate {
                mean: jarzynski_average(&wd),
                stderr: slope * a.stderr.hypot(b.stderr),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficacyResult {
    pub times: Vec<f64>,
    pub gamma_q: Vec<f64>,
    pub stderr: Vec<f64>,
    pub c00: Vec<f64>,
    pub c11: Vec<f64>,
}

impl EfficacyResult {
    /// `⟨(γ_q − 1)²⟩` over `start ≤ t ≤ end`.
    pub fn mean_squared_deviation(&self, start: f64, end: f64) -> f64 {
        let v: Vec<f64> = self
            .times
            .iter()
            .zip(&self.gamma_q)
            .filter(|(t, _)| **t >= start - 1e-12 && **t <= end + 1e-12)
            .map(|(_, g)| (g - 1.0).powi(2))
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            resamples: 1000,
            seed: 0x5eed,
        }
    }
}

fn mean_ground_population(pe: &[&[f64]], idx: Option<&[usize]>, t: usize) -> f64 {
    match idx {
        None => pe.iter().map(|s| 1.0 - s[t]).sum::<f64>() / pe.len() as f64,
        Some(ix) => ix.iter().map(|&k| 1.0 - pe[k][t]).sum::<f64>() / ix.len() as f64,
    }
}

/// Efficacy γ_q(t) from equally weighted ground- and excited-start ensembles.
///
/// With `A^i = A^f = βH(0)` and `M^i(ρ₀) = ρ₀`, the map acts on the
/// normalized identity, giving `C₀₀ = ⟨ρ₀₀⟩_g + ⟨ρ₀₀⟩_e`,
/// `C₁₁ = ⟨ρ₁₁⟩_g + ⟨ρ₁₁⟩_e` and `γ_q = p_g C₀₀ + p_e C₁₁`.
/// Standard errors come from a bootstrap over trajectories.
pub fn efficacy_from_trajectories(
    ground: &Ensemble,
    excited: &Ensemble,
    beta: f64,
    bootstrap: &BootstrapOptions,
) -> Result<EfficacyResult> {
    if ground.is_empty() || excited.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let (a, b) = (&ground.config, &excited.config);
    if a.gamma != b.gamma || a.omega_r != b.omega_r || a.eta != b.eta || a.dt != b.dt || a.tau != b.tau {
        return Err(Error::MismatchedConfig("physical parameters differ".into()));
    }
    if ground.feedback != excited.feedback {
        return Err(Error::MismatchedConfig("feedback settings differ".into()));
    }
    if ground.trajectories.iter().any(|t| t.initial_label != 0)
        || excited.trajectories.iter().any(|t| t.initial_label != 1)
    {
        return Err(Error::MismatchedConfig("ensembles must start in the ground and excited states".into()));
    }
    let (p_g, p_e) = gibbs_weights(beta);
    let g: Vec<&[f64]> = ground.trajectories.iter().map(|t| t.excited_population.as_slice()).collect();
    let e: Vec<&[f64]> = excited.trajectories.iter().map(|t| t.excited_population.as_slice()).collect();
    let times = ground.times();
    let steps = times.len();

    let efficacy = |c00: f64| p_g * c00 + p_e * (2.0 - c00);

    let mut c00 = Vec::with_capacity(steps);
    let mut c11 = Vec::with_capacity(steps);
    let mut gamma_q = Vec::with_capacity(steps);
    for t in 0..steps {
        let c = mean_ground_population(&g, None, t) + mean_ground_population(&e, None, t);
        c00.push(c);
        c11.push(2.0 - c);
        gamma_q.push(efficacy(c));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(bootstrap.seed);
    let mut sum = vec![0.0; steps];
    let mut sum_sq = vec![0.0; steps];
    let mut gi = vec![0usize; g.len()];
    let mut ei = vec![0usize; e.len()];
    for _ in 0..bootstrap.resamples {
        gi.iter_mut().for_each(|k| *k = rng.random_range(0..g.len()));
        ei.iter_mut().for_each(|k| *k = rng.random_range(0..e.len()));
        for t in 0..steps {
            let v = efficacy(mean_ground_population(&g, Some(&gi), t) + mean_ground_population(&e, Some(&ei), t));
            sum[t] += v;
            sum_sq[t] += v * v;
        }
    }
    let r = bootstrap.resamples as f64;
    let stderr = if bootstrap.resamples < 2 {
        vec![0.0; steps]
    } else {
        sum.iter()
            .zip(&sum_sq)
            .map(|(s, s2)| ((s2 - s * s / r) / (r - 1.0)).max(0.0).sqrt())
            .collect()
    };
    Ok(EfficacyResult {
        times,
        gamma_q,
        stderr,
        c00,
        c11,
    })
}

/// Fit window for [`rabi_contrast`], in μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastWindow {
    pub start: f64,
    pub end: f64,
}

impl Default for ContrastWindow {
    fn default() -> Self {
        Self { start: 2.0, end: 8.0 }
    }
}

fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = v[r];
        }
        *o = det(mc) / d;
    }
    Some(out)
}

/// Steady oscillation amplitude of `P₀₀(t)` relative to the closed-system
/// amplitude 1/2.
///
/// Least-squares fit of `c + a cos(ωt) + b sin(ωt)` over the window, with `ω`
/// the Bloch rotation rate of the drive. The window must hold at least three
/// periods.
pub fn rabi_contrast(p00: &[f64], dt: f64, omega: f64, window: &ContrastWindow) -> Result<f64> {
    let t_last = (p00.len().saturating_sub(1)) as f64 * dt;
    let span = window.end.min(t_last) - window.start;
    let needed = 3.0 * 2.0 * std::f64::consts::PI / omega.abs();
    if !(span >= needed - 1e-9) {
        return Err(Error::InsufficientSpan { span, needed });
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (i, p) in p00.iter().enumerate() {
        let t = i as f64 * dt;
        if t < window.start - 1e-9 || t > window.end + 1e-9 {
            continue;
        }
        let row = [1.0, (omega * t).cos(), (omega * t).sin()];
        for r in 0..3 {
            atb[r] += row[r] * p;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let coef = solve3(ata, atb).ok_or(Error::InsufficientSpan { span, needed })?;
    Ok(2.0 * coef[1].hypot(coef[2]))
}

/// Pearson coefficient of `a[i + lag]` against `b[i]`.
pub fn pearson_r(a: &[f64], b: &[f64], lag: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len().saturating_sub(lag);
    pearson_pairs((0..n).map(|i| (a[i + lag], b[i])))
}

fn pearson_pairs(pairs: impl Iterator<Item = (f64, f64)> + Clone) -> Result<f64> {
    let (mut n, mut sa, mut sb) = (0usize, 0.0, 0.0);
    for (x, y) in pairs.clone() {
        n += 1;
        sa += x;
        sb += y;
    }
    if n < 2 {
        return Err(Error::ZeroVariance("pearson_r: fewer than two pairs"));
    }
    let (ma, mb) = (sa / n as f64, sb / n as f64);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::ZeroVariance("pearson_r"));
    }
    Ok(cov / (va * vb).sqrt())
}

/// Pearson r of per-step feedback work against heat, pooled over records.
/// `lag` aligns `δW̃_F` at step `i + lag` with `δQ̃` at step `i` inside each
/// trajectory.
pub fn feedback_heat_correlation(records: &[TrajectoryRecord], lag: usize) -> Result<f64> {
    let pairs = records.iter().flat_map(|r| {
        let n = r.ledgers.len().saturating_sub(lag);
        (0..n).map(move |i| (r.ledgers[i + lag].dwf, r.ledgers[i].dq))
    });
    pearson_pairs(pairs)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub predicted: f64,
    pub observed: f64,
    pub observed_stderr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinnedComparison {
    pub bins: Vec<Bin>,
    pub chi2: f64,
    pub dof: usize,
    pub reduced_chi2: f64,
}

/// Bins `(predicted probability, outcome hit)` pairs by the prediction and
/// compares the hit frequency with the mean prediction in each bin.
///
/// The χ² uses the binomial variance of the mean prediction; bins with fewer
/// than `min_count` entries or a degenerate prediction are left out of it.
pub fn binned_identity_check(points: &[(f64, bool)], n_bins: usize, min_count: usize) -> Result<BinnedComparison> {
    if points.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n_bins = n_bins.max(1);
    let width = 1.0 / n_bins as f64;
    let mut acc = vec![(0usize, 0.0f64, 0usize); n_bins];
    for &(p, hit) in points {
        let k = ((p / width).floor().max(0.0) as usize).min(n_bins - 1);
        acc[k].0 += 1;
        acc[k].1 += p;
        acc[k].2 += usize::from(hit);
    }
    let mut bins = Vec::new();
    let (mut chi2, mut dof) = (0.0, 0usize);
    for (k, (count, psum, hits)) in acc.into_iter().enumerate() {
        if count == 0 {
            continue;
        }
        let predicted = psum / count as f64;
        let observed = hits as f64 / count as f64;
        let var = predicted * (1.0 - predicted) / count as f64;
        if count >= min_count && var > 1e-12 {
            chi2 += (observed - predicted).powi(2) / var;
            dof += 1;
        }
        bins.push(Bin {
            lower: k as f64 * width,
            upper: (k + 1) as f64 * width,
            count,
            predicted,
            observed,
            observed_stderr: (observed * (1.0 - observed) / count as f64).sqrt(),
        });
    }
    let reduced_chi2 = if dof > 0 { chi2 / dof as f64 } else { f64::NAN };
    Ok(BinnedComparison {
        bins,
        chi2,
        dof,
        reduced_chi2,
    })
}
