use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use plastdam_cli::scenario::{load_scenario, Mode, Overrides};
use plastdam_cli::sweep::{run_loaded, run_sweep};

#[derive(Parser)]
#[command(name = "plastdam", version, about = "Cyclic plasticity-damage scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory receiving the output tables (created if missing).
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Override the material solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Cap the cycle count of every scenario.
    #[arg(long)]
    max_cycles: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides { tol: self.tol, max_cycles: self.max_cycles }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a uniaxial material-point scenario.
    Matpoint {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a finite-element scenario.
    Fem {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every *.toml scenario in a directory, one thread per file.
    Sweep {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Matpoint => "matpoint",
        Mode::Fem => "fem",
    }
}

fn run_single(path: &Path, expect: Mode, common: &Common) -> anyhow::Result<()> {
    let mut scenario = load_scenario(path)?;
    if scenario.mode != expect {
        anyhow::bail!(
            "scenario `{}` declares mode {}, but the {} subcommand was invoked",
            path.display(),
            mode_name(scenario.mode),
            mode_name(expect)
        );
    }
    scenario.apply(&common.overrides());
    run_loaded(&scenario, &common.output_dir)?;
    println!(
        "wrote {} and {}",
        common.output_dir.join(&scenario.output.history).display(),
        common.output_dir.join(&scenario.output.cycles).display()
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Matpoint { scenario, common } => run_single(&scenario, Mode::Matpoint, &common),
        Command::Fem { scenario, common } => run_single(&scenario, Mode::Fem, &common),
        Command::Sweep { dir, common } => {
            let results = run_sweep(&dir, &common.output_dir, &common.overrides())?;
            let mut failed = 0;
            for r in &results {
                match &r.outcome {
                    Ok(()) => println!("ok   {}", r.scenario.display()),
                    Err(e) => {
                        failed += 1;
                        eprintln!("FAIL {}: {e}", r.scenario.display());
                    }
                }
            }
            if failed > 0 {
                anyhow::bail!("{failed} of {} scenarios failed", results.len());
            }
            Ok(())
        }
    }
}
