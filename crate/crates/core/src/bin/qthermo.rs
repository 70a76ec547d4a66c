use clap::{Args, Parser, Subcommand};
use qubit_thermo::app::{self, ConfigFile, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

/// Homodyne-monitored qubit: trajectories, ensembles, feedback and fluctuation theorems.
#[derive(Parser)]
#[command(name = "qthermo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one trajectory and write its ledger as CSV.
    Trajectory(Common),
    /// Run an ensemble: P00(t), ledger scatter, contrast and correlations.
    Ensemble(Common),
    /// Feedback efficacy by the trajectory and two-point-work routes.
    Jarzynski(Common),
    /// Rabi contrast over a (gain, offset) grid.
    Sweep(Common),
    /// Run the invariant checks; exits nonzero on failure.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_traj: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    gamma_per_us: Option<f64>,
    /// Rabi frequency Ω/2π in MHz.
    #[arg(long)]
    omega_mhz: Option<f64>,
    #[arg(long)]
    dt_ns: Option<f64>,
    #[arg(long)]
    tau_us: Option<f64>,
    #[arg(long, value_parser = ["none", "pll", "optimal"])]
    feedback: Option<String>,
    #[arg(long)]
    delay_ns: Option<f64>,
    /// Phase-locked gain A in 1/μs.
    #[arg(long)]
    gain: Option<f64>,
    /// Phase-locked offset B.
    #[arg(long, allow_hyphen_values = true)]
    offset: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn load(self) -> qubit_thermo::Result<ConfigFile> {
        let mut cfg = match &self.config {
            Some(p) => ConfigFile::from_path(p)?,
            None => ConfigFile::default(),
        };
        cfg.apply(&Overrides {
            seed: self.seed,
            n_traj: self.n_traj,
            eta: self.eta,
            gamma_per_us: self.gamma_per_us,
            omega_mhz: self.omega_mhz,
            dt_ns: self.dt_ns,
            tau_us: self.tau_us,
            feedback: self.feedback,
            delay_ns: self.delay_ns,
            gain: self.gain,
            offset: self.offset,
            out_dir: self.out_dir,
            workers: self.workers,
        });
        Ok(cfg)
    }
}

fn run(cli: Cli) -> qubit_thermo::Result<bool> {
    let files = match cli.command {
        Command::Trajectory(c) => app::cmd_trajectory(&c.load()?)?,
        Command::Ensemble(c) => app::cmd_ensemble(&c.load()?)?,
        Command::Jarzynski(c) => app::cmd_jarzynski(&c.load()?)?,
        Command::Sweep(c) => app::cmd_sweep(&c.load()?)?,
        Command::Verify(c) => {
            let (report, files) = app::cmd_verify(&c.load()?)?;
            println!("{report}");
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            return Ok(report.passed());
        }
    };
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let cli = Cli::try_parse_from([
            "qthermo", "ensemble", "--feedback", "pll", "--offset", "-0.5", "--delay-ns", "0", "--n-traj", "12",
        ])
        .unwrap();
        let Command::Ensemble(c) = cli.command else { panic!("wrong subcommand") };
        let cfg = c.load().unwrap();
        assert_eq!(cfg.run.n_traj, 12);
        let fb = cfg.feedback_config().unwrap();
        assert_eq!(fb.offset, -0.5);
        assert_eq!(fb.delay_steps, 0);
    }

    #[test]
    fn unknown_feedback_mode_is_rejected() {
        assert!(Cli::try_parse_from(["qthermo", "trajectory", "--feedback", "bang-bang"]).is_err());
    }

    #[test]
    fn verify_reports_and_exits_cleanly() {
        let dir = std::env::temp_dir().join(format!("qthermo-verify-{}", std::process::id()));
        let cli = Cli::try_parse_from([
            "qthermo",
            "verify",
            "--n-traj",
            "400",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .unwrap();
        assert!(run(cli).unwrap());
        assert!(dir.join("verify.json").exists());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
