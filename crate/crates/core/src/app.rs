//! Configuration files and the experiments behind the command-line tool.
//!
//! Every command writes its data files plus a `manifest.json` describing the
//! run. Data files depend only on the configuration; the manifest also
//! records wall-clock time.

use crate::config::{delay_to_steps, FeedbackConfig, FeedbackMode, InitialState, SimConfig};
use crate::ensemble::{run_ensemble_map, Ensemble, EnsembleOptions, TrajectorySummary};
use crate::error::{Error, Result};
use crate::feedback::{sweep_gain_offset, SweepResult};
use crate::io;
use crate::oracle::{ensemble_vs_oracle, lindblad_evolve};
use crate::qubit::{closed_rabi_probabilities, BlochState};
use crate::stats::{
    binned_identity_check, efficacy_from_trajectories, feedback_heat_correlation, mean_and_stderr, rabi_contrast,
    work_route_efficacy, BinnedComparison, BootstrapOptions, ContrastWindow, EfficacyResult, Estimate,
};
use crate::trajectory::{projective_outcome, simulate_trajectory, TrajectoryRecord};
use crate::ensemble::trajectory_rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub gamma_per_us: f64,
    /// Rabi frequency Ω/2π.
    pub rabi_mhz: f64,
    pub eta: f64,
    pub dt_ns: f64,
    pub tau_us: f64,
    pub seed: u64,
    /// `ground`, `excited` or `thermal`.
    pub initial_state: String,
    /// Inverse temperature (1/ħω_q) for thermal preparation.
    pub beta: f64,
    pub prep_error: f64,
    pub sample_outcome: bool,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            gamma_per_us: 1.7,
            rabi_mhz: 1.0,
            eta: 0.35,
            dt_ns: 20.0,
            tau_us: 8.0,
            seed: 1,
            initial_state: "ground".into(),
            beta: 3.5,
            prep_error: 0.0,
            sample_outcome: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedbackSection {
    /// `none`, `pll` or `optimal`.
    pub mode: String,
    pub gain_per_us: f64,
    pub offset: f64,
    pub phase_rad: Option<f64>,
    pub delay_ns: f64,
}

impl Default for FeedbackSection {
    fn default() -> Self {
        Self {
            mode: "none".into(),
            gain_per_us: 34.0,
            offset: -1.0,
            phase_rad: None,
            delay_ns: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub n_traj: usize,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n_traj: 10_000,
            workers: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JarzynskiSection {
    pub beta: f64,
    pub eta_list: Vec<f64>,
    /// Trajectories per preparation.
    pub n_traj: usize,
    pub t_max_us: f64,
    /// Step used for the efficacy runs. At unit efficiency 20 ns lets the
    /// back-action kick overshoot the Bloch ball within a few hundred
    /// trajectories.
    pub dt_ns: f64,
    /// Feedback law for the efficacy runs; gain and offset come from `[feedback]`.
    pub feedback: String,
    pub delay_ns: f64,
    pub bootstrap: usize,
}

impl Default for JarzynskiSection {
    fn default() -> Self {
        Self {
            beta: 3.5,
            eta_list: vec![0.35, 0.6, 0.8, 1.0],
            n_traj: 500,
            t_max_us: 1.0,
            dt_ns: 10.0,
            feedback: "optimal".into(),
            delay_ns: 0.0,
            bootstrap: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub gain_min: f64,
    pub gain_max: f64,
    pub gain_steps: usize,
    pub offset_min: f64,
    pub offset_max: f64,
    pub offset_steps: usize,
    pub n_traj: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            gain_min: 0.0,
            gain_max: 80.0,
            gain_steps: 9,
            offset_min: -2.0,
            offset_max: 0.0,
            offset_steps: 9,
            n_traj: 500,
        }
    }
}

/// The on-disk configuration. Keys carry their units.
///
/// ```toml
/// [simulation]
/// gamma_per_us = 1.7
/// rabi_mhz = 1.0
/// eta = 0.35
/// dt_ns = 20
/// tau_us = 8
///
/// [feedback]
/// mode = "pll"
/// gain_per_us = 34
/// offset = -1
/// delay_ns = 100
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub simulation: SimulationSection,
    pub feedback: FeedbackSection,
    pub run: RunSection,
    pub jarzynski: JarzynskiSection,
    pub sweep: SweepSection,
}

/// Command-line overrides; `None` keeps the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_traj: Option<usize>,
    pub eta: Option<f64>,
    pub gamma_per_us: Option<f64>,
    pub omega_mhz: Option<f64>,
    pub dt_ns: Option<f64>,
    pub tau_us: Option<f64>,
    pub feedback: Option<String>,
    pub delay_ns: Option<f64>,
    pub gain: Option<f64>,
    pub offset: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.simulation;
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        set!(s.seed, o.seed);
        set!(s.eta, o.eta);
        set!(s.gamma_per_us, o.gamma_per_us);
        set!(s.rabi_mhz, o.omega_mhz);
        set!(s.dt_ns, o.dt_ns);
        set!(s.tau_us, o.tau_us);
        set!(self.feedback.mode, o.feedback);
        set!(self.feedback.delay_ns, o.delay_ns);
        set!(self.feedback.gain_per_us, o.gain);
        set!(self.feedback.offset, o.offset);
        set!(self.run.n_traj, o.n_traj);
        set!(self.run.out_dir, o.out_dir);
        set!(self.run.workers, o.workers);
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let s = &self.simulation;
        let initial_state = match s.initial_state.as_str() {
            "ground" => InitialState::Ground,
            "excited" => InitialState::Excited,
            "thermal" => InitialState::Thermal { beta: s.beta },
            other => {
                return Err(Error::InvalidConfig(format!(
                    "simulation.initial_state: expected ground, excited or thermal, got '{other}'"
                )))
            }
        };
        let cfg = SimConfig {
            gamma: s.gamma_per_us,
            omega_r: 2.0 * PI * s.rabi_mhz,
            eta: s.eta,
            dt: s.dt_ns * 1e-3,
            tau: s.tau_us,
            seed: s.seed,
            initial_state,
            prep_error: s.prep_error,
            sample_outcome: s.sample_outcome,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn feedback_config(&self) -> Result<FeedbackConfig> {
        let f = &self.feedback;
        Ok(FeedbackConfig {
            mode: f.mode.parse::<FeedbackMode>()?,
            gain: f.gain_per_us,
            offset: f.offset,
            phase: f.phase_rad,
            delay_steps: delay_to_steps(f.delay_ns * 1e-3, self.simulation.dt_ns * 1e-3)?,
        })
    }

    pub fn ensemble_options(&self) -> EnsembleOptions {
        EnsembleOptions::with_workers(self.run.workers)
    }
}

/// Describes one command invocation and the files it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: ConfigFile,
    pub outputs: Vec<String>,
    pub trajectories: usize,
    pub steps_per_trajectory: usize,
    pub total_steps: usize,
    pub wall_clock_ms: u128,
}

pub fn version_string() -> String {
    match option_env!("QTHERMO_GIT_DESCRIBE") {
        Some(d) => format!("{} ({d})", env!("CARGO_PKG_VERSION")),
        None => env!("CARGO_PKG_VERSION").to_string(),
    }
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn finish(
        self,
        command: &str,
        cfg: &ConfigFile,
        trajectories: usize,
        steps: usize,
        started: Instant,
    ) -> Result<Vec<PathBuf>> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: version_string(),
            seed: cfg.simulation.seed,
            config: cfg.clone(),
            outputs: self.files.clone(),
            trajectories,
            steps_per_trajectory: steps,
            total_steps: trajectories * steps,
            wall_clock_ms: started.elapsed().as_millis(),
        };
        io::write_json(&manifest, &self.dir.join("manifest.json"))?;
        let mut all: Vec<PathBuf> = self.files.iter().map(|f| self.dir.join(f)).collect();
        all.push(self.dir.join("manifest.json"));
        Ok(all)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrajectorySidecar {
    config: SimConfig,
    feedback: FeedbackConfig,
    initial_label: u8,
    final_outcome: Option<u8>,
    manifest: String,
}

/// Writes one trajectory as `trajectory.csv` with a `trajectory.json` sidecar.
pub fn cmd_trajectory(cfg: &ConfigFile) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let sim = cfg.sim_config()?;
    let fb = cfg.feedback_config()?;
    let rec = simulate_trajectory(&sim, &fb, &mut trajectory_rng(sim.seed, 0))?;
    let mut out = Outputs::new(&cfg.run.out_dir)?;
    io::write_trajectory_csv(&rec, io::create(&out.path("trajectory.csv"))?)?;
    let sidecar = TrajectorySidecar {
        config: sim.clone(),
        feedback: fb,
        initial_label: rec.initial_label,
        final_outcome: rec.final_outcome,
        manifest: "manifest.json".into(),
    };
    io::write_json(&sidecar, &out.path("trajectory.json"))?;
    out.finish("trajectory", cfg, 1, sim.steps(), started)
}

/// Ensemble observables written by [`cmd_ensemble`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub trajectories: usize,
    pub feedback: FeedbackConfig,
    pub contrast: Option<f64>,
    /// Pooled r(δW̃_F, δQ̃) at lags 0 and 1 over the first records.
    pub correlation_lag0: Option<f64>,
    pub correlation_lag1: Option<f64>,
    pub correlation_records: usize,
    pub max_first_law_residual: f64,
    pub max_decomposition_gap: f64,
    pub mean_p00_w: Estimate,
    pub mean_p00_q: Estimate,
    pub mean_p00_f: Estimate,
    pub final_p00: Estimate,
    pub oracle_max_z: Option<f64>,
    pub manifest: String,
}

/// Trajectory summaries plus full records for the first `keep` indices.
pub fn run_ensemble_keeping(
    sim: &SimConfig,
    fb: &FeedbackConfig,
    n_traj: usize,
    keep: usize,
    opts: &EnsembleOptions,
) -> Result<(Ensemble, Vec<TrajectoryRecord>)> {
    let pairs = run_ensemble_map(sim, fb, n_traj, opts, |k, rec, _| {
        let summary = TrajectorySummary::from_record(&rec);
        (summary, (k < keep).then_some(rec))
    })?;
    let mut records = Vec::new();
    let mut trajectories = Vec::with_capacity(pairs.len());
    for (s, r) in pairs {
        trajectories.push(s);
        records.extend(r);
    }
    Ok((
        Ensemble {
            config: sim.clone(),
            feedback: *fb,
            trajectories,
        },
        records,
    ))
}

/// Mean `P̃₀₀` contributions of an ensemble.
fn mean_components(ens: &Ensemble) -> (Estimate, Estimate, Estimate) {
    let ledgers = ens.transition_ledgers(0);
    let est = |f: &dyn Fn(&crate::stats::TransitionLedger) -> f64| {
        let v: Vec<f64> = ledgers.iter().map(f).collect();
        let (mean, stderr) = mean_and_stderr(&v);
        Estimate { mean, stderr }
    };
    (est(&|l| l.p_w), est(&|l| l.p_q), est(&|l| l.p_f))
}

pub fn cmd_ensemble(cfg: &ConfigFile) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let sim = cfg.sim_config()?;
    let fb = cfg.feedback_config()?;
    let n = cfg.run.n_traj;
    if n == 0 {
        return Err(Error::InvalidConfig("n_traj must be >= 1".into()));
    }
    let (ens, records) = run_ensemble_keeping(&sim, &fb, n, 100, &cfg.ensemble_options())?;
    let mut out = Outputs::new(&cfg.run.out_dir)?;

    let times = ens.times();
    let (p00, p00_se) = ens.mean_population_series(0);
    let oracle_start = match sim.initial_state {
        InitialState::Excited => BlochState::EXCITED,
        _ => BlochState::GROUND,
    };
    let oracle = lindblad_evolve(&oracle_start, sim.gamma, sim.omega_r, &times).ground_population();
    let closed: Vec<f64> = times
        .iter()
        .map(|t| closed_rabi_probabilities(sim.omega_r / 2.0, *t).p00)
        .collect();
    io::write_columns_csv(
        &["t", "P00", "P00_stderr", "P00_lindblad", "P00_closed"],
        &[&times, &p00, &p00_se, &oracle, &closed],
        io::create(&out.path("p00.csv"))?,
    )?;

    let ledgers = ens.transition_ledgers(0);
    {
        let mut w = csv::Writer::from_writer(io::create(&out.path("scatter.csv"))?);
        w.write_record(["n", "P00_W", "P00_Q", "P00_F", "P00_total", "outcome"])?;
        for (l, t) in ledgers.iter().zip(&ens.trajectories) {
            w.write_record([
                l.n.to_string(),
                l.p_w.to_string(),
                l.p_q.to_string(),
                l.p_f.to_string(),
                l.p_total.to_string(),
                t.final_outcome.map(|o| o.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }

    let contrast = rabi_contrast(&p00, sim.dt, sim.omega_r, &ContrastWindow::default()).ok();
    let (r0, r1) = if fb.mode == FeedbackMode::None {
        (None, None)
    } else {
        (
            feedback_heat_correlation(&records, 0).ok(),
            feedback_heat_correlation(&records, 1).ok(),
        )
    };
    let oracle_max_z = (fb.mode == FeedbackMode::None && matches!(sim.initial_state, InitialState::Ground | InitialState::Excited))
        .then(|| ensemble_vs_oracle(&p00, &p00_se, &oracle).ok())
        .flatten();
    let (w, q, f) = mean_components(&ens);
    let final_p00 = Estimate {
        mean: *p00.last().unwrap_or(&1.0),
        stderr: *p00_se.last().unwrap_or(&0.0),
    };
    let report = EnsembleReport {
        trajectories: ens.len(),
        feedback: fb,
        contrast,
        correlation_lag0: r0,
        correlation_lag1: r1,
        correlation_records: records.len(),
        max_first_law_residual: ens.max_first_law_residual(),
        max_decomposition_gap: ledgers.iter().map(|l| l.decomposition_gap()).fold(0.0, f64::max),
        mean_p00_w: w,
        mean_p00_q: q,
        mean_p00_f: f,
        final_p00,
        oracle_max_z,
        manifest: "manifest.json".into(),
    };
    io::write_json(&report, &out.path("report.json"))?;
    out.finish("ensemble", cfg, n, sim.steps(), started)
}

/// Both efficacy estimators for one configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficacyComparison {
    pub eta: f64,
    pub trajectory_route: EfficacyResult,
    /// `⟨e^{−βW}⟩` from sampled projective outcomes.
    pub work_route: Vec<Estimate>,
}

impl EfficacyComparison {
    /// Largest `|γ_traj − γ_work| / √(se_traj² + se_work²)`.
    pub fn max_discrepancy(&self) -> f64 {
        self.trajectory_route
            .gamma_q
            .iter()
            .zip(&self.trajectory_route.stderr)
            .zip(&self.work_route)
            .map(|((g, s), w)| {
                let se = s.hypot(w.stderr);
                let d = (g - w.mean).abs();
                if se > 0.0 {
                    d / se
                } else if d > 1e-12 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Runs ground- and excited-start ensembles of `n_traj` each up to `sim.tau`
/// and evaluates γ_q(t) both from the averaged trajectories and from the work
/// distribution of projectively sampled outcomes.
pub fn efficacy_comparison(
    sim: &SimConfig,
    fb: &FeedbackConfig,
    n_traj: usize,
    beta: f64,
    opts: &EnsembleOptions,
    bootstrap: &BootstrapOptions,
) -> Result<EfficacyComparison> {
    let run = |n: u8, seed: u64| -> Result<(Ensemble, Vec<Vec<u8>>)> {
        let cfg = SimConfig {
            seed,
            ..sim.with_initial(InitialState::eigenstate(n))
        };
        let pairs = run_ensemble_map(&cfg, fb, n_traj, opts, |_, rec, rng| {
            // one projective readout per time, as in separate experiments
            let outcomes: Vec<u8> = std::iter::once(rec.initial)
                .chain(rec.states.iter().copied())
                .map(|s| projective_outcome(&s, rng))
                .collect();
            (TrajectorySummary::from_record(&rec), outcomes)
        })?;
        let (trajectories, outcomes) = pairs.into_iter().unzip();
        Ok((
            Ensemble {
                config: cfg,
                feedback: *fb,
                trajectories,
            },
            outcomes,
        ))
    };
    let (ground, g_out) = run(0, sim.seed)?;
    let (excited, e_out) = run(1, sim.seed.wrapping_add(0x9e37_79b9_7f4a_7c15))?;
    let trajectory_route = efficacy_from_trajectories(&ground, &excited, beta, bootstrap)?;

    let freq = |outs: &[Vec<u8>], t: usize| {
        let v: Vec<f64> = outs.iter().map(|o| if o[t] == 0 { 1.0 } else { 0.0 }).collect();
        let (mean, stderr) = mean_and_stderr(&v);
        Estimate { mean, stderr }
    };
    let steps = sim.steps() + 1;
    let p00: Vec<Estimate> = (0..steps).map(|t| freq(&g_out, t)).collect();
    let p01: Vec<Estimate> = (0..steps).map(|t| freq(&e_out, t)).collect();
    let work_route = work_route_efficacy(&p00, &p01, beta)?;
    Ok(EfficacyComparison {
        eta: sim.eta,
        trajectory_route,
        work_route,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JarzynskiReport {
    pub beta: f64,
    pub feedback: FeedbackConfig,
    pub trajectories_per_preparation: usize,
    pub per_eta: Vec<JarzynskiEntry>,
    pub manifest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JarzynskiEntry {
    pub eta: f64,
    pub file: String,
    /// `⟨(γ_q − 1)²⟩` over the whole window, trajectory route.
    pub mean_squared_deviation: f64,
    pub max_estimator_discrepancy: f64,
}

pub fn cmd_jarzynski(cfg: &ConfigFile) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let j = &cfg.jarzynski;
    if !(j.beta > 0.0) {
        return Err(Error::InvalidConfig(format!("jarzynski.beta must be > 0, got {}", j.beta)));
    }
    let base = SimConfig {
        tau: j.t_max_us,
        dt: j.dt_ns * 1e-3,
        ..cfg.sim_config()?
    };
    base.validate()?;
    let fb = FeedbackConfig {
        mode: j.feedback.parse()?,
        delay_steps: delay_to_steps(j.delay_ns * 1e-3, base.dt)?,
        ..cfg.feedback_config()?
    };
    let bootstrap = BootstrapOptions {
        resamples: j.bootstrap,
        seed: base.seed,
    };
    let mut out = Outputs::new(&cfg.run.out_dir)?;
    let mut per_eta = Vec::new();
    for &eta in &j.eta_list {
        let sim = SimConfig { eta, ..base.clone() };
        let cmp = efficacy_comparison(&sim, &fb, j.n_traj, j.beta, &cfg.ensemble_options(), &bootstrap)?;
        let file = format!("efficacy_eta{eta:.2}.csv");
        let tr = &cmp.trajectory_route;
        let wm: Vec<f64> = cmp.work_route.iter().map(|e| e.mean).collect();
        let ws: Vec<f64> = cmp.work_route.iter().map(|e| e.stderr).collect();
        io::write_columns_csv(
            &["t", "gamma_q_trajectory", "stderr_trajectory", "gamma_q_work", "stderr_work", "C00", "C11"],
            &[&tr.times, &tr.gamma_q, &tr.stderr, &wm, &ws, &tr.c00, &tr.c11],
            io::create(&out.path(&file))?,
        )?;
        per_eta.push(JarzynskiEntry {
            eta,
            file,
            mean_squared_deviation: tr.mean_squared_deviation(0.0, j.t_max_us),
            max_estimator_discrepancy: cmp.max_discrepancy(),
        });
    }
    let report = JarzynskiReport {
        beta: j.beta,
        feedback: fb,
        trajectories_per_preparation: j.n_traj,
        per_eta,
        manifest: "manifest.json".into(),
    };
    io::write_json(&report, &out.path("report.json"))?;
    out.finish(
        "jarzynski",
        cfg,
        2 * j.n_traj * j.eta_list.len(),
        base.steps(),
        started,
    )
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn cmd_sweep(cfg: &ConfigFile) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let sim = cfg.sim_config()?;
    let fb = cfg.feedback_config()?;
    let s = &cfg.sweep;
    let gains = linspace(s.gain_min, s.gain_max, s.gain_steps);
    let offsets = linspace(s.offset_min, s.offset_max, s.offset_steps);
    let result = sweep_gain_offset(
        &gains,
        &offsets,
        &sim,
        &fb,
        s.n_traj,
        &cfg.ensemble_options(),
        &ContrastWindow::default(),
    )?;
    let mut out = Outputs::new(&cfg.run.out_dir)?;
    io::write_sweep_csv(&result, io::create(&out.path("sweep.csv"))?)?;
    io::write_json(&SweepReport::from(&result), &out.path("report.json"))?;
    out.finish(
        "sweep",
        cfg,
        s.n_traj * gains.len() * offsets.len(),
        sim.steps(),
        started,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepReport {
    argmax_gain: f64,
    argmax_offset: f64,
    max_contrast: f64,
    grid_points: usize,
    manifest: String,
}

impl From<&SweepResult> for SweepReport {
    fn from(r: &SweepResult) -> Self {
        Self {
            argmax_gain: r.argmax.gain,
            argmax_offset: r.argmax.offset,
            max_contrast: r.argmax.contrast,
            grid_points: r.points.len(),
            manifest: "manifest.json".into(),
        }
    }
}

/// Compares `P̃₀₀^W + P̃₀₀^Q + P̃₀₀^F + 1` against projective outcomes for
/// protocols stopped at a random step of each trajectory.
pub fn first_law_binning(
    sim: &SimConfig,
    fb: &FeedbackConfig,
    n_traj: usize,
    n_bins: usize,
    opts: &EnsembleOptions,
) -> Result<BinnedComparison> {
    use rand::Rng;
    let steps = sim.steps();
    let points = run_ensemble_map(sim, fb, n_traj, opts, |_, rec, rng| {
        let stop = rng.random_range(0..=steps);
        let sign = if rec.initial_label == 0 { -1.0 } else { 1.0 };
        let path: f64 = rec.ledgers[..stop].iter().map(|l| l.dw + l.dwf + l.dq).sum();
        let predicted = if rec.initial_label == 0 { 1.0 } else { 0.0 } + sign * path;
        let state = if stop == 0 { rec.initial } else { rec.states[stop - 1] };
        (predicted, projective_outcome(&state, rng) == 0)
    })?;
    binned_identity_check(&points, n_bins, 20)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(
            f,
            "{} of {} checks passed",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        )
    }
}

/// Invariant suite: first law, decomposition identity, oracle agreement,
/// unitary limit and purity at unit efficiency.
pub fn verify(cfg: &ConfigFile) -> Result<VerifyReport> {
    let sim = cfg.sim_config()?;
    let fb = cfg.feedback_config()?;
    let opts = cfg.ensemble_options();
    let n = cfg.run.n_traj.max(1);
    let mut checks = Vec::new();

    let ens = crate::ensemble::run_ensemble(&sim, &fb, n, &opts)?;
    let residual = ens.max_first_law_residual();
    checks.push(Check {
        name: "first law".into(),
        passed: residual < 1e-9,
        detail: format!("max |dU - (W + W_F + Q)| = {residual:.3e} over {n} trajectories"),
    });
    let gap = [0u8, 1]
        .iter()
        .flat_map(|&m| ens.transition_ledgers(m))
        .map(|l| l.decomposition_gap())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "transition decomposition".into(),
        passed: gap < 1e-9,
        detail: format!("max |P_total - (P0 + P_W + P_Q + P_F)| = {gap:.3e}"),
    });

    let open = SimConfig {
        initial_state: InitialState::Ground,
        ..sim.clone()
    };
    let free = crate::ensemble::run_ensemble(&open, &FeedbackConfig::none(), n, &opts)?;
    let (mean, se) = free.mean_population_series(1);
    let oracle = lindblad_evolve(&BlochState::GROUND, sim.gamma, sim.omega_r, &free.times()).excited_population();
    let z = ensemble_vs_oracle(&mean, &se, &oracle)?;
    checks.push(Check {
        name: "Lindblad oracle".into(),
        passed: z < 4.0,
        detail: format!("max z-score {z:.2} over {} time points", mean.len()),
    });

    let closed = SimConfig { gamma: 0.0, ..open.clone() };
    let rec = simulate_trajectory(&closed, &FeedbackConfig::none(), &mut trajectory_rng(sim.seed, 0))?;
    let dev = rec
        .times
        .iter()
        .zip(&rec.states)
        .map(|(t, s)| (s.ground_population() - closed_rabi_probabilities(closed.omega_r / 2.0, *t).p00).abs())
        .fold(0.0, f64::max);
    let heat = rec.ledgers.iter().map(|l| l.dq.abs()).fold(0.0, f64::max);
    checks.push(Check {
        name: "unitary limit".into(),
        passed: dev < 1e-6 && heat == 0.0,
        detail: format!("max |P00 - cos^2| = {dev:.3e}, max |dQ| = {heat:.1e}"),
    });

    let pure = SimConfig {
        eta: 1.0,
        tau: 1000.0 * sim.dt,
        ..open
    };
    let rec = simulate_trajectory(&pure, &FeedbackConfig::none(), &mut trajectory_rng(sim.seed, 1))?;
    let loss = rec.states.iter().map(|s| (1.0 - s.purity()).abs()).fold(0.0, f64::max);
    checks.push(Check {
        name: "purity at unit efficiency".into(),
        passed: loss < 1e-6,
        detail: format!("max |1 - purity| = {loss:.3e} over {} steps", rec.len()),
    });

    Ok(VerifyReport { checks })
}

pub fn cmd_verify(cfg: &ConfigFile) -> Result<(VerifyReport, Vec<PathBuf>)> {
    let started = Instant::now();
    let report = verify(cfg)?;
    let mut out = Outputs::new(&cfg.run.out_dir)?;
    io::write_json(&report, &out.path("verify.json"))?;
    let sim = cfg.sim_config()?;
    let files = out.finish("verify", cfg, 2 * cfg.run.n_traj.max(1) + 2, sim.steps(), started)?;
    Ok((report, files))
}
