//! Cyclic finite-element runs driven by a prescribed grip displacement.
//!
//! The mesh face at minimum x is clamped; the face at maximum x moves rigidly
//! in x by the drive value with its transverse motion blocked. The reported
//! force is the axial internal force summed over the driven nodes, and the
//! opening displacement is the axial separation change of a chosen node pair.
//! Per-cycle summaries mirror the material-point runner: peak force and the
//! unloading secant over the first tenth of the descent from the drive peak.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use plastdam_fem::equilibrium::{dof, Loads};
use plastdam_fem::mesh::Mesh;
use plastdam_fem::snapshot::{write_gauss_table, write_nodal_table};
use plastdam_fem::solver::{staggered_step_adaptive, FemModel, SystemState};

use crate::protocol::{unloading_secant_window, CycleProtocol};
use crate::table::Table;
use crate::CliError;

pub const FEM_HISTORY_COLUMNS: [&str; 8] = [
    "step",
    "cycle",
    "drive",
    "force",
    "cod",
    "kbar_max",
    "d_i_max",
    "d_u_max",
];

pub const FEM_CYCLE_COLUMNS: [&str; 3] = ["cycle", "peak_force", "unloading_slope"];

#[derive(Debug, Clone)]
pub struct FemRun {
    pub history: Table,
    pub cycles: Table,
}

/// Grip boundary conditions derived from the mesh extent in x.
#[derive(Debug, Clone)]
pub struct GripDrive {
    pub fixed_nodes: Vec<usize>,
    pub driven_nodes: Vec<usize>,
    pub control: [usize; 2],
}

impl GripDrive {
    pub fn from_mesh(mesh: &Mesh, control: [usize; 2]) -> Result<Self, CliError> {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &mesh.nodes {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
        }
        let tol = 1e-9 * (xmax - xmin).max(1.0);
        let fixed_nodes = mesh.nodes_where(|p| (p[0] - xmin).abs() <= tol);
        let driven_nodes = mesh.nodes_where(|p| (p[0] - xmax).abs() <= tol);
        if fixed_nodes.is_empty() || driven_nodes.is_empty() || xmax <= xmin {
            return Err(CliError::Scenario("mesh has no grip faces in x".into()));
        }
        for &c in &control {
            if c >= mesh.nodes.len() {
                return Err(CliError::Scenario(format!(
                    "control node {c} outside the mesh ({} nodes)",
                    mesh.nodes.len()
                )));
            }
        }
        Ok(Self { fixed_nodes, driven_nodes, control })
    }

    pub fn loads(&self, drive: f64) -> Loads {
        let mut loads = Loads::default();
        loads.fix_nodes(&self.fixed_nodes, &[0, 1, 2]);
        loads.prescribe_nodes(&self.driven_nodes, 0, drive);
        loads.fix_nodes(&self.driven_nodes, &[1, 2]);
        loads
    }
}

fn axial_force(state: &SystemState, nodes: &[usize]) -> f64 {
    nodes.iter().map(|&n| state.f_int[dof(n, 0)]).sum()
}

fn write_snapshot(
    prefix: &Path,
    cycle: usize,
    model: &FemModel,
    state: &SystemState,
) -> Result<(), CliError> {
    let named = |suffix: &str| -> PathBuf {
        let mut name = prefix
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        name.push_str(&format!("_cycle{cycle:04}_{suffix}.txt"));
        prefix.with_file_name(name)
    };
    let io_err = |path: &Path, source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let nodal_path = named("nodal");
    let mut w = BufWriter::new(File::create(&nodal_path).map_err(|e| io_err(&nodal_path, e))?);
    write_nodal_table(&mut w, &model.mesh, &state.u, &state.kbar.values)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&nodal_path, e))?;
    let gauss_path = named("gauss");
    let mut w = BufWriter::new(File::create(&gauss_path).map_err(|e| io_err(&gauss_path, e))?);
    write_gauss_table(&mut w, &state.records)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&gauss_path, e))?;
    Ok(())
}

/// Bound on the recursive halving of one drive increment.
const DRIVE_MAX_BISECTIONS: u32 = 8;

pub fn run_fem(
    model: &FemModel,
    grip: &GripDrive,
    protocol: &CycleProtocol,
    snapshot_prefix: Option<&Path>,
) -> Result<FemRun, CliError> {
    let mut history = Table::new(&FEM_HISTORY_COLUMNS);
    let mut cycles = Table::new(&FEM_CYCLE_COLUMNS);
    let mut state = SystemState::new(model);

    let drives = protocol.cycle_samples();
    let window = unloading_secant_window(&drives);
    let [ca, cb] = grip.control;

    let mut slope_estimate = 0.0;
    let mut step = 0usize;
    let mut drive_prev = 0.0;
    for cycle in 1..=protocol.cycles {
        let mut trace: Vec<(f64, f64)> = Vec::with_capacity(drives.len());
        let mut peak_force = f64::NEG_INFINITY;
        for (j, &drive) in drives.iter().enumerate() {
            staggered_step_adaptive(
                model,
                &mut state,
                &grip.loads(drive_prev),
                &grip.loads(drive),
                DRIVE_MAX_BISECTIONS,
            )
            .map_err(|source| CliError::FemStep { cycle, step: j + 1, source })?;
            drive_prev = drive;
            let force = axial_force(&state, &grip.driven_nodes);
            let cod = state.u[dof(cb, 0)] - state.u[dof(ca, 0)];
            trace.push((cod, force));
            peak_force = peak_force.max(force);
            if let Some((a, b)) = window {
                if j == b && trace[b].0 != trace[a].0 {
                    slope_estimate = (trace[b].1 - trace[a].1) / (trace[b].0 - trace[a].0);
                }
            }
            let mut kbar_max = 0.0_f64;
            for &v in &state.kbar.values {
                kbar_max = kbar_max.max(v);
            }
            let mut d_i_max = 0.0_f64;
            let mut d_u_max = 0.0_f64;
            for gps in &state.records {
                for rec in gps {
                    d_i_max = d_i_max.max(rec.damage.d_i);
                    d_u_max = d_u_max.max(rec.damage.d_u);
                }
            }
            step += 1;
            history.push_row([
                step as f64,
                cycle as f64,
                drive,
                force,
                cod,
                kbar_max,
                d_i_max,
                d_u_max,
            ]);
        }
        cycles.push_row([cycle as f64, peak_force, slope_estimate]);
        if let Some(prefix) = snapshot_prefix {
            write_snapshot(prefix, cycle, model, &state)?;
        }
    }
    Ok(FemRun { history, cycles })
}
