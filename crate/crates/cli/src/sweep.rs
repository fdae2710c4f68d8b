//! One-shot scenario execution and directory sweeps.
//!
//! `run_scenario` is the single entry point behind every subcommand: load,
//! apply overrides, run, write tables. A sweep discovers every `*.toml` in a
//! directory (sorted by name for reproducible ordering), runs each scenario
//! on its own thread, and writes its outputs under a subdirectory named
//! after the file stem. Failures are collected per scenario, never aborting
//! sibling runs.

use std::fs;
use std::path::{Path, PathBuf};

use plastdam_fem::mesh::Mesh;
use plastdam_fem::solver::FemModel;

use crate::femrun::{run_fem, GripDrive};
use crate::matpoint::run_matpoint;
use crate::scenario::{load_scenario, Mode, Overrides, Scenario};
use crate::CliError;

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.to_path_buf(), source }
}

/// Runs an already-loaded scenario, writing its tables under `out_dir`.
pub fn run_loaded(scenario: &Scenario, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let (history, cycles) = match scenario.mode {
        Mode::Matpoint => {
            let run = run_matpoint(&scenario.material, &scenario.protocol, &scenario.solver)?;
            (run.history, run.cycles)
        }
        Mode::Fem => {
            let fem = scenario.fem.as_ref().expect("validated fem section");
            let text = fs::read_to_string(&fem.mesh).map_err(|e| io_err(&fem.mesh, e))?;
            let mesh = Mesh::parse(&text)?;
            let grip = GripDrive::from_mesh(&mesh, fem.control_nodes)?;
            let model = FemModel::new(mesh, vec![scenario.material.clone()])?;
            let prefix = scenario.output.snapshots.as_ref().map(|p| out_dir.join(p));
            let run = run_fem(&model, &grip, &scenario.protocol, prefix.as_deref())?;
            (run.history, run.cycles)
        }
    };
    history.write_csv(&out_dir.join(&scenario.output.history))?;
    cycles.write_csv(&out_dir.join(&scenario.output.cycles))?;
    Ok(())
}

pub fn run_scenario(path: &Path, out_dir: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let mut scenario = load_scenario(path)?;
    scenario.apply(overrides);
    run_loaded(&scenario, out_dir)
}

#[derive(Debug)]
pub struct SweepResult {
    pub scenario: PathBuf,
    pub outcome: Result<(), String>,
}

pub fn run_sweep(
    dir: &Path,
    out_root: &Path,
    overrides: &Overrides,
) -> Result<Vec<SweepResult>, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml") && p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Scenario(format!(
            "no scenario files (*.toml) in {}",
            dir.display()
        )));
    }

    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .map(|path| {
                scope.spawn(move || {
                    let stem = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "scenario".into());
                    run_scenario(path, &out_root.join(stem), overrides)
                        .map_err(|e| e.to_string())
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(&paths)
            .map(|(h, path)| SweepResult {
                scenario: path.clone(),
                outcome: h
                    .join()
                    .unwrap_or_else(|_| Err("runner thread panicked".into())),
            })
            .collect::<Vec<_>>()
    });
    Ok(results)
}
