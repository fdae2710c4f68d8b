//! Cyclic material-point runs under uniaxial nominal stress.
//!
//! Each cycle walks the triangular load path at uniform increments. The
//! per-step history records strain, nominal and effective axial stress, the
//! accumulated plastic strain and both damage indices; the per-cycle table
//! summarizes the peak nominal stress and the unloading secant stiffness,
//! measured over the first tenth of the descent from the peak.

use plastdam::material::MaterialParams;
use plastdam::plasticity::SolverConfig;
use plastdam::uniaxial::MaterialPoint;

use crate::protocol::{unloading_secant_window, CycleProtocol};
use crate::table::Table;
use crate::CliError;

pub const HISTORY_COLUMNS: [&str; 9] = [
    "step",
    "cycle",
    "strain",
    "stress_nominal",
    "stress_effective",
    "k",
    "d_i",
    "d_u",
    "slope_estimate",
];

pub const CYCLE_COLUMNS: [&str; 3] = ["cycle", "peak_stress", "unloading_slope"];

#[derive(Debug, Clone)]
pub struct MatpointRun {
    pub history: Table,
    pub cycles: Table,
}

pub fn run_matpoint(
    mat: &MaterialParams,
    protocol: &CycleProtocol,
    cfg: &SolverConfig,
) -> Result<MatpointRun, CliError> {
    let mut history = Table::new(&HISTORY_COLUMNS);
    let mut cycles = Table::new(&CYCLE_COLUMNS);
    let mut point = MaterialPoint::new(mat);

    // The strain samples repeat every cycle, so the secant window is fixed.
    let strains = protocol.cycle_samples();
    let window = unloading_secant_window(&strains);

    let mut slope_estimate = 0.0;
    let mut step = 0usize;
    for cycle in 1..=protocol.cycles {
        let mut stresses = Vec::with_capacity(strains.len());
        let mut peak_stress = f64::NEG_INFINITY;
        for (j, &eps) in strains.iter().enumerate() {
            let out = point
                .step(mat, eps, cfg)
                .map_err(|source| CliError::MatpointStep { cycle, step: j + 1, source })?;
            stresses.push(out.sigma_nominal.xx);
            peak_stress = peak_stress.max(out.sigma_nominal.xx);
            if let Some((a, b)) = window {
                if j == b {
                    slope_estimate = (stresses[b] - stresses[a]) / (strains[b] - strains[a]);
                }
            }
            step += 1;
            history.push_row([
                step as f64,
                cycle as f64,
                eps,
                out.sigma_nominal.xx,
                out.sigma_eff.xx,
                out.k,
                out.d_i,
                out.d_u,
                slope_estimate,
            ]);
        }
        cycles.push_row([cycle as f64, peak_stress, slope_estimate]);
    }
    Ok(MatpointRun { history, cycles })
}
