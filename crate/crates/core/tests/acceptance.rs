//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits nonzero if any check fails.

use qubit_thermo::app::{self, efficacy_comparison, first_law_binning, ConfigFile};
use qubit_thermo::ensemble::{run_ensemble_map, trajectory_rng};
use qubit_thermo::feedback::sweep_gain_offset;
use qubit_thermo::oracle::{closed_two_point_sample, ensemble_vs_oracle, lindblad_evolve};
use qubit_thermo::stats::{feedback_heat_correlation, rabi_contrast, BootstrapOptions, ContrastWindow};
use qubit_thermo::{
    run_ensemble, simulate_trajectory, BlochState, EnsembleOptions, FeedbackConfig, SimConfig,
    TrajectoryRecord,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

type Suite = fn() -> Vec<Outcome>;

fn check(name: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { name, passed, detail }
}

fn opts() -> EnsembleOptions {
    EnsembleOptions::default()
}

/// Closed-form solution of the unconditional Bloch equations
/// `ẋ = −Ωz − γx/2`, `ż = Ωx + γ(1 − z)` via the 2×2 matrix exponential.
fn bloch_closed_form(x0: f64, z0: f64, gamma: f64, omega: f64, t: f64) -> (f64, f64) {
    let (a, b, c, d) = (-0.5 * gamma, -omega, omega, -gamma);
    // fixed point of M·u + (0, γ) = 0
    let det = a * d - b * c;
    let xs = b * gamma / det;
    let zs = -a * gamma / det;
    let s = 0.5 * (a + d);
    let disc = s * s - det;
    let (ch, sh_over_q) = if disc < 0.0 {
        let w = (-disc).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else if disc > 0.0 {
        let q = disc.sqrt();
        ((q * t).cosh(), (q * t).sinh() / q)
    } else {
        (1.0, t)
    };
    let e = (s * t).exp();
    let (u, v) = (x0 - xs, z0 - zs);
    let x = e * (ch * u + sh_over_q * ((a - s) * u + b * v));
    let z = e * (ch * v + sh_over_q * (c * u + (d - s) * v));
    (xs + x, zs + z)
}

fn first_law() -> Vec<Outcome> {
    let sim = SimConfig::default();
    let started = Instant::now();
    let ens = run_ensemble(&sim, &FeedbackConfig::none(), 10_000, &opts()).unwrap();
    let residual = ens.max_first_law_residual();
    let fb_ens = run_ensemble(&sim, &FeedbackConfig::phase_locked(34.0, -1.0, 5), 2_000, &opts()).unwrap();
    let fb_residual = fb_ens.max_first_law_residual();
    let binned = first_law_binning(&sim, &FeedbackConfig::none(), 10_000, 10, &opts()).unwrap();
    let secs = started.elapsed().as_secs_f64();
    vec![
        check(
            "first law per trajectory",
            residual < 1e-8 && fb_residual < 1e-8,
            format!("max residual {residual:.2e} (no feedback, 1e4), {fb_residual:.2e} (phase-locked, 2e3); limit 1e-8"),
        ),
        check(
            "path-dependent vs state-derived P00",
            binned.reduced_chi2 < 2.0 && secs < 60.0,
            format!(
                "reduced chi2 {:.3} over {} bins; limit 2; runtime {secs:.1} s",
                binned.reduced_chi2, binned.dof
            ),
        ),
    ]
}

fn bounded_decomposition() -> Vec<Outcome> {
    let sim = SimConfig {
        tau: 2.0,
        ..SimConfig::default()
    };
    let ens = run_ensemble(&sim, &FeedbackConfig::none(), 10_000, &opts()).unwrap();
    let sums: Vec<f64> = ens.transition_ledgers(0).iter().map(|l| l.p_w + l.p_q).collect();
    let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    vec![check(
        "P00^W + P00^Q bounded",
        lo >= -1.0 && hi <= 0.0,
        format!("range [{lo:.6}, {hi:.6}] over {} trajectories; required within [-1, 0]", sums.len()),
    )]
}

fn oracle_equivalence() -> Vec<Outcome> {
    let sim = SimConfig::default();
    let ens = run_ensemble(&sim, &FeedbackConfig::none(), 10_000, &opts()).unwrap();
    let times = ens.times();
    let (mean, se) = ens.mean_population_series(0);
    let exact: Vec<f64> = times
        .iter()
        .map(|&t| 0.5 * (1.0 + bloch_closed_form(0.0, 1.0, sim.gamma, sim.omega_r, t).1))
        .collect();
    let z = ensemble_vs_oracle(&mean, &se, &exact).unwrap();
    let rk4 = lindblad_evolve(&BlochState::GROUND, sim.gamma, sim.omega_r, &times).ground_population();
    let rk4_err = rk4.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let blind = SimConfig {
        eta: 0.0,
        seed: sim.seed + 1,
        ..sim.clone()
    };
    let ens0 = run_ensemble(&blind, &FeedbackConfig::none(), 10_000, &opts()).unwrap();
    let (mean0, se0) = ens0.mean_population_series(0);
    let z_eta = mean
        .iter()
        .zip(&se)
        .zip(mean0.iter().zip(&se0))
        .map(|((a, sa), (b, sb))| {
            let s = sa.hypot(*sb);
            if s > 0.0 {
                (a - b).abs() / s
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    vec![
        check(
            "ensemble mean vs Lindblad",
            z < 4.0 && rk4_err < 1e-6,
            format!("max z {z:.2} over {} points (limit 4); RK4 vs closed form {rk4_err:.1e}", times.len()),
        ),
        check(
            "measurement leaves the unconditional mean unchanged",
            z_eta < 3.0,
            format!("max |mean(eta=0) - mean(eta=0.35)| / sigma = {z_eta:.2}; limit 3"),
        ),
    ]
}

fn unitary_limit() -> Vec<Outcome> {
    let sim = SimConfig {
        gamma: 0.0,
        ..SimConfig::default()
    };
    let rec = simulate_trajectory(&sim, &FeedbackConfig::none(), &mut trajectory_rng(7, 0)).unwrap();
    // half-angle of the Bloch rotation
    let dev = rec
        .times
        .iter()
        .zip(&rec.states)
        .map(|(&t, s)| {
            let c2 = (0.5 * sim.omega_r * t).cos().powi(2);
            (s.ground_population() - c2).abs().max((s.excited_population() - (1.0 - c2)).abs())
        })
        .fold(0.0, f64::max);
    let heat_free = rec.ledgers.iter().all(|l| l.dq == 0.0);
    vec![check(
        "unitary limit",
        dev < 1e-6 && heat_free && rec.len() == 400,
        format!("max |P - cos^2/sin^2| = {dev:.2e} over {} steps; Q identically zero: {heat_free}", rec.len()),
    )]
}

fn contrast_of(sim: &SimConfig, fb: &FeedbackConfig, n: usize) -> f64 {
    let ens = run_ensemble(sim, fb, n, &opts()).unwrap();
    let (p00, _) = ens.mean_population_series(0);
    rabi_contrast(&p00, sim.dt, sim.omega_r, &ContrastWindow::default()).unwrap()
}

fn damping_vs_persistence() -> Vec<Outcome> {
    let sim = SimConfig::default();
    let ens = run_ensemble(&sim, &FeedbackConfig::none(), 10_000, &opts()).unwrap();
    let (p00, _) = ens.mean_population_series(0);
    let times = ens.times();
    let late = times
        .iter()
        .zip(&p00)
        .filter(|(t, _)| **t > 4.0)
        .map(|(_, p)| (p - 0.5).abs())
        .fold(0.0, f64::max);
    let exact_late = times
        .iter()
        .filter(|t| **t > 4.0)
        .map(|&t| (0.5 * bloch_closed_form(0.0, 1.0, sim.gamma, sim.omega_r, t).1).abs())
        .fold(0.0, f64::max);
    let pll = contrast_of(&sim, &FeedbackConfig::phase_locked(34.0, -1.0, 0), 5_000);
    let pll_delayed = contrast_of(&sim, &FeedbackConfig::phase_locked(34.0, -1.0, 5), 5_000);
    vec![
        check(
            "free decay settles at 1/2",
            late < 0.02,
            format!("max |P00 - 1/2| for t > 4 us = {late:.4} (exact Bloch solution: {exact_late:.4}); limit 0.02"),
        ),
        check(
            "phase-locked feedback sustains oscillation",
            (0.4..=0.85).contains(&pll),
            format!("contrast {pll:.3} (zero delay), {pll_delayed:.3} (100 ns delay); required [0.4, 0.85]"),
        ),
    ]
}

fn optimal_contrast() -> Vec<Outcome> {
    let sim = SimConfig::default();
    let c0 = contrast_of(&sim, &FeedbackConfig::optimal(0), 5_000);
    let c_late = contrast_of(&sim, &FeedbackConfig::optimal(25), 5_000);
    vec![
        check(
            "optimal feedback contrast",
            (c0 - 0.70).abs() <= 0.10,
            format!("contrast {c0:.3}; required 0.70 +/- 0.10"),
        ),
        check(
            "delay lowers optimal contrast",
            c_late < c0,
            format!("contrast {c_late:.3} at 500 ns vs {c0:.3} at zero delay"),
        ),
    ]
}

fn records(sim: &SimConfig, fb: &FeedbackConfig, n: usize) -> Vec<TrajectoryRecord> {
    run_ensemble_map(sim, fb, n, &opts(), |_, rec, _| rec).unwrap()
}

fn anti_correlations() -> Vec<Outcome> {
    let sim = SimConfig::default();
    let n = 200;
    let r_opt = feedback_heat_correlation(&records(&sim, &FeedbackConfig::optimal(0), n), 0).unwrap();
    let r_pll = feedback_heat_correlation(&records(&sim, &FeedbackConfig::phase_locked(34.0, -1.0, 0), n), 0).unwrap();
    let delayed = records(&sim, &FeedbackConfig::phase_locked(34.0, -1.0, 5), n);
    let r_del = feedback_heat_correlation(&delayed, 1).unwrap();
    let r_del_full = feedback_heat_correlation(&delayed, 5).unwrap();
    vec![
        check(
            "optimal feedback anti-correlation",
            (r_opt + 0.9).abs() <= 0.1,
            format!("r = {r_opt:.3}; required -0.9 +/- 0.1"),
        ),
        check(
            "phase-locked anti-correlation",
            (r_pll + 0.81).abs() <= 0.15,
            format!("r = {r_pll:.3}; required -0.81 +/- 0.15"),
        ),
        check(
            "delayed phase-locked anti-correlation, 1-step lag",
            (r_del + 0.68).abs() <= 0.15,
            format!("r = {r_del:.3} (lag 5 steps: {r_del_full:.3}); required -0.68 +/- 0.15"),
        ),
    ]
}

fn gain_sweep() -> Vec<Outcome> {
    let sim = SimConfig::default();
    let gains = app::linspace(0.0, 80.0, 9);
    let offsets = app::linspace(-2.0, 0.0, 9);
    let sweep = sweep_gain_offset(
        &gains,
        &offsets,
        &sim,
        &FeedbackConfig::phase_locked(34.0, -1.0, 0),
        500,
        &opts(),
        &ContrastWindow::default(),
    )
    .unwrap();
    let best = sweep.argmax;
    let (dg, db) = (gains[1] - gains[0], offsets[1] - offsets[0]);
    let gain_ok = best.gain >= 30.0 - dg - 1e-9 && best.gain <= 35.0 + dg + 1e-9;
    let offset_ok = (best.offset + 1.0).abs() <= db + 1e-9;
    vec![check(
        "gain sweep optimum",
        gain_ok && offset_ok,
        format!(
            "argmax (A, B) = ({:.0}, {:.2}) with contrast {:.3}; cell {dg} x {db}; required near (30-35, -1)",
            best.gain, best.offset, best.contrast
        ),
    )]
}

fn generalized_jarzynski() -> Vec<Outcome> {
    let base = SimConfig {
        tau: 1.0,
        dt: 0.01,
        seed: 11,
        ..SimConfig::default()
    };
    let fb = FeedbackConfig::optimal(0);
    let boot = BootstrapOptions { resamples: 1000, seed: 3 };
    let mut msd = Vec::new();
    let mut msd_se = Vec::new();
    let mut unit = None;
    let mut gamma0_exact = true;
    let mut agree = 0.0f64;
    for eta in [0.35, 0.6, 0.8, 1.0] {
        let sim = SimConfig { eta, ..base.clone() };
        let cmp = efficacy_comparison(&sim, &fb, 500, 3.5, &opts(), &boot).unwrap();
        let tr = &cmp.trajectory_route;
        gamma0_exact &= tr.gamma_q[0] == 1.0;
        let dev: Vec<f64> = tr.gamma_q.iter().map(|g| (g - 1.0).powi(2)).collect();
        msd.push(tr.mean_squared_deviation(0.0, 1.0));
        // crude error on the mean square from the per-point bootstrap errors
        let se = (tr.gamma_q.iter().zip(&tr.stderr).map(|(g, s)| (2.0 * (g - 1.0) * s).powi(2)).sum::<f64>()).sqrt()
            / dev.len() as f64;
        msd_se.push(se);
        agree = agree.max(cmp.max_discrepancy());
        if eta == 1.0 {
            let worst = tr
                .gamma_q
                .iter()
                .zip(&tr.stderr)
                .map(|(g, s)| (g - 1.0).abs() - (3.0 * s).max(1e-12))
                .fold(f64::NEG_INFINITY, f64::max);
            unit = Some(worst);
        }
    }
    let monotone = msd
        .windows(2)
        .zip(msd_se.windows(2))
        .all(|(m, s)| m[1] <= m[0] + 2.0 * s[0].hypot(s[1]));
    let unit = unit.unwrap();
    vec![
        check("efficacy starts at one", gamma0_exact, format!("gamma_q(0) == 1 exactly: {gamma0_exact}")),
        check(
            "efficacy deviation shrinks with efficiency",
            monotone,
            format!(
                "<(gamma_q - 1)^2> = {} for eta = 0.35, 0.6, 0.8, 1.0",
                msd.iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>().join(", ")
            ),
        ),
        check(
            "efficacy is one at unit efficiency",
            unit <= 0.0,
            format!("max(|gamma_q - 1| - 3 stderr) = {unit:.2e} over [0, 1] us (roundoff floor 1e-12)"),
        ),
        check(
            "trajectory and work-distribution efficacies agree",
            agree < 4.0,
            format!("max |difference| / combined stderr = {agree:.2} over all times and efficiencies"),
        ),
    ]
}

fn closed_jarzynski() -> Vec<Outcome> {
    let started = Instant::now();
    let beta = 3.5;
    let omega = PI;
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 1..=10 {
        let tau = 0.1 * k as f64;
        let mut acc = 0.0;
        let n = 1_000_000;
        for _ in 0..n {
            acc += (-beta * closed_two_point_sample(beta, omega, tau, &mut rng)).exp();
        }
        worst = worst.max((acc / n as f64 - 1.0).abs());
    }
    let secs = started.elapsed().as_secs_f64();
    vec![check(
        "closed-system Jarzynski identity",
        worst <= 0.01 && secs < 10.0,
        format!("max |<exp(-beta W)> - 1| = {worst:.4} over 10 durations, 1e6 samples each; runtime {secs:.1} s"),
    )]
}

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Vec<Outcome> {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ConfigFile::default();
    cfg.run.n_traj = 300;
    cfg.feedback.mode = "pll".into();
    cfg.sweep.n_traj = 40;
    cfg.sweep.gain_steps = 3;
    cfg.sweep.offset_steps = 3;
    cfg.jarzynski.n_traj = 60;
    cfg.jarzynski.bootstrap = 50;
    cfg.jarzynski.eta_list = vec![0.35, 1.0];
    let mut identical = true;
    let mut compared = 0;
    for (name, cmd) in [
        ("trajectory", app::cmd_trajectory as fn(&ConfigFile) -> qubit_thermo::Result<_>),
        ("ensemble", app::cmd_ensemble),
        ("sweep", app::cmd_sweep),
        ("jarzynski", app::cmd_jarzynski),
    ] {
        let mut outputs = Vec::new();
        for workers in [1, 3, 8] {
            let mut c = cfg.clone();
            c.run.workers = workers;
            c.run.out_dir = tmp.path().join(format!("{name}-{workers}"));
            cmd(&c).unwrap();
            outputs.push(data_files(&c.run.out_dir));
        }
        compared += outputs[0].len();
        identical &= outputs.windows(2).all(|w| w[0] == w[1]);
    }
    vec![check(
        "byte-identical outputs across worker counts",
        identical,
        format!("{compared} data files from 4 commands compared at 1, 3 and 8 workers"),
    )]
}

fn main() {
    let suites: [(&str, Suite); 11] = [
        ("first law", first_law),
        ("bounded decomposition", bounded_decomposition),
        ("oracle", oracle_equivalence),
        ("unitary limit", unitary_limit),
        ("damping", damping_vs_persistence),
        ("optimal feedback", optimal_contrast),
        ("correlations", anti_correlations),
        ("gain sweep", gain_sweep),
        ("generalized Jarzynski", generalized_jarzynski),
        ("closed Jarzynski", closed_jarzynski),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    let mut total = 0;
    for (i, (_, suite)) in suites.iter().enumerate() {
        let started = Instant::now();
        let outcomes = suite();
        let secs = started.elapsed().as_secs_f64();
        for o in outcomes {
            total += 1;
            if !o.passed {
                failed += 1;
            }
            println!(
                "{} [{:>2}] {}: {} ({secs:.1} s)",
                if o.passed { "PASS" } else { "FAIL" },
                i + 1,
                o.name,
                o.detail
            );
        }
    }
    println!("acceptance: {} passed, {failed} failed", total - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
