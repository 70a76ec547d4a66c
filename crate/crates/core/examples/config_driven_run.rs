//! Drives the same experiments as the `qthermo` tool from a TOML document and
//! writes CSV/JSON outputs plus a run manifest.

use qubit_thermo::app::{cmd_ensemble, cmd_verify, ConfigFile};

const CONFIG: &str = r#"
[simulation]
eta = 0.35
tau_us = 8
seed = 42

[feedback]
mode = "optimal"
delay_ns = 0

[run]
n_traj = 1000
"#;

fn main() -> qubit_thermo::Result<()> {
    let mut cfg = ConfigFile::parse(CONFIG, "inline")?;
    cfg.run.out_dir = std::env::temp_dir().join("qthermo-example");

    for path in cmd_ensemble(&cfg)? {
        println!("wrote {}", path.display());
    }
    let (report, _) = cmd_verify(&cfg)?;
    println!("{report}");

    // a typo in a key is an error, not a silent default
    if let Err(e) = ConfigFile::parse("[simulation]\ngama_per_us = 1.7\n", "typo.toml") {
        println!("\n{e}");
    }
    Ok(())
}
