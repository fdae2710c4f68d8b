//! Staggered solution of coupled equilibrium, nonlocal smoothing, and damage.
//!
//! One load step runs outer iterations of three frozen-field passes:
//!
//! 1. Newton on momentum balance with the nonlocal field and damage frozen,
//!    re-integrating every Gauss point from its committed record.
//! 2. A Helmholtz solve sourced by the updated Gauss-point plastic variable.
//! 3. A damage update driven by the smoothed field (or the local variable
//!    when the length scale is zero).
//!
//! The outer loop stops when the nonlocal field and damage are stationary and
//! the incremental work between consecutive outer iterates is a negligible
//! fraction of the step work. Gauss-point history, displacements, and the
//! nonlocal field commit only on convergence, so a failed step leaves the
//! state untouched. A previously converged prescribed dof can be released by
//! swapping the constraint for its reaction force and ramping that force to
//! zero over a chosen number of steps.

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::CscMatrix;
use plastdam::damage::DamageState;
use plastdam::material::MaterialParams;
use plastdam::plasticity::SolverConfig;

use crate::equilibrium::{
    assemble, dof, external_force, Dirichlet, DofPartition, FaceTraction, GaussPointRecord, Loads,
    PointLoad,
};
use crate::helmholtz::{interpolate_at_gauss, HelmholtzOperator, NonlocalField};
use crate::mesh::Mesh;
use crate::shape::NGAUSS;
use crate::FemError;

#[derive(Debug, Clone, Copy)]
pub struct StaggerConfig {
    /// Relative force tolerance of the equilibrium Newton loop.
    pub newton_tol: f64,
    /// Absolute force floor, in force units, for steps with vanishing loads.
    pub newton_abs: f64,
    pub newton_max: usize,
    /// Relative bound on the work increment between outer iterates.
    pub tol_energy: f64,
    /// Absolute bound on the nonlocal field increment between outer iterates.
    pub tol_field: f64,
    pub max_outer: usize,
}

impl Default for StaggerConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            newton_abs: 1e-8,
            newton_max: 40,
            tol_energy: 1e-6,
            tol_field: 1e-8,
            max_outer: 50,
        }
    }
}

/// Mesh, materials, and solver settings of one analysis.
///
/// The nonlocal length scale is read from the materials at construction and
/// baked into the smoothing operator; every material slot must agree on it.
pub struct FemModel {
    pub mesh: Mesh,
    pub materials: Vec<MaterialParams>,
    pub stagger: StaggerConfig,
    /// Settings of the Gauss-point stress update.
    pub local_cfg: SolverConfig,
    helm: HelmholtzOperator,
    ell: f64,
}

impl FemModel {
    pub fn new(mesh: Mesh, materials: Vec<MaterialParams>) -> Result<Self, FemError> {
        if materials.is_empty() {
            return Err(FemError::Mesh("a model needs at least one material".into()));
        }
        for (e, &slot) in mesh.materials.iter().enumerate() {
            if slot >= materials.len() {
                return Err(FemError::Mesh(format!(
                    "element {e} uses material slot {slot} but only {} are defined",
                    materials.len()
                )));
            }
        }
        let ell = materials[0].ell;
        if materials.iter().any(|m| m.ell != ell) {
            return Err(FemError::Mesh(
                "all material slots must share one nonlocal length scale".into(),
            ));
        }
        let helm = HelmholtzOperator::new(&mesh, ell)?;
        Ok(Self {
            mesh,
            materials,
            stagger: StaggerConfig::default(),
            local_cfg: SolverConfig::default(),
            helm,
            ell,
        })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn helmholtz(&self) -> &HelmholtzOperator {
        &self.helm
    }
}

/// Committed fields of the coupled problem.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub u: Vec<f64>,
    pub records: Vec<Vec<GaussPointRecord>>,
    pub kbar: NonlocalField,
    /// Internal force at the last committed state; reactions live at the
    /// constrained dofs.
    pub f_int: Vec<f64>,
}

impl SystemState {
    pub fn new(model: &FemModel) -> Self {
        let records = (0..model.mesh.elements.len())
            .map(|e| {
                let nb = model.materials[model.mesh.materials[e]].plasticity.kin.len();
                (0..NGAUSS).map(|_| GaussPointRecord::virgin(nb)).collect()
            })
            .collect();
        let n = model.mesh.nodes.len();
        Self {
            u: vec![0.0; 3 * n],
            records,
            kbar: NonlocalField::zero(n, model.ell),
            f_int: vec![0.0; 3 * n],
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct StepReport {
    pub outer_iterations: usize,
    /// Total equilibrium iterations across all outer passes.
    pub newton_iterations: usize,
    /// Final equilibrium residual of each outer pass.
    pub force_residuals: Vec<f64>,
    /// Nonlocal field increment after each outer pass.
    pub field_increments: Vec<f64>,
    /// Relative work increment after each outer pass.
    pub energy_increments: Vec<f64>,
    pub final_residual: f64,
    pub f_ext_norm: f64,
}

fn l2(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

/// Smallest fraction of a Newton correction the line search falls back to.
const MIN_STEP_FRACTION: f64 = 1.0 / 64.0;

/// Factors an SPD matrix, rejecting numerically singular systems that slip
/// past the library's nonpositive-pivot check with round-off sized pivots.
fn factor_spd(csc: &CscMatrix<f64>) -> Result<CscCholesky<f64>, FemError> {
    let chol = CscCholesky::factor(csc)
        .map_err(|e| FemError::LinearSolve(format!("stiffness not positive definite: {e:?}")))?;
    let l = chol.l();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0_f64;
    for k in 0..l.nrows() {
        let d = match l.get_entry(k, k) {
            Some(nalgebra_sparse::SparseEntry::NonZero(&v)) => v,
            _ => 0.0,
        };
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    if !(dmin > 1e-7 * dmax) {
        return Err(FemError::LinearSolve(format!(
            "stiffness numerically singular (pivot ratio {:.3e})",
            dmin / dmax
        )));
    }
    Ok(chol)
}

/// Advances the coupled system by one load step, committing on convergence.
pub fn staggered_step(
    model: &FemModel,
    state: &mut SystemState,
    loads: &Loads,
) -> Result<StepReport, FemError> {
    let mesh = &model.mesh;
    let part = DofPartition::new(mesh.nodes.len(), &loads.dirichlet)?;
    let f_ext = external_force(mesh, loads)?;
    let f_ext_norm = l2(part.free.iter().map(|&g| f_ext[g]));

    let mut u = state.u.clone();
    part.impose(&mut u);
    let u_start = u.clone();
    let mut u_prev = u.clone();

    let mut kbar_frozen = state.kbar.values.clone();
    let mut dmg_frozen: Vec<Vec<DamageState>> = state
        .records
        .iter()
        .map(|e| e.iter().map(|g| g.damage).collect())
        .collect();

    let mut report = StepReport {
        f_ext_norm,
        ..Default::default()
    };

    for outer in 1..=model.stagger.max_outer {
        // Pass 1: equilibrium with frozen nonlocal field and damage.
        let mut converged_asm = None;
        let mut resid = f64::NAN;
        // Line-search state: last accepted iterate, its residual norm, and
        // the full Newton correction taken from it.
        let mut u_accept = u.clone();
        let mut resid_accept = f64::INFINITY;
        let mut du_full: Vec<f64> = Vec::new();
        let mut frac = 1.0;
        for _ in 0..model.stagger.newton_max {
            let mut asm = assemble(
                mesh,
                &model.materials,
                &model.local_cfg,
                &state.records,
                &dmg_frozen,
                &u,
                &part,
                true,
            )?;
            report.newton_iterations += 1;
            resid = l2(part.free.iter().map(|&g| asm.f_int[g] - f_ext[g]));
            let reaction_norm = l2(part.prescribed.iter().map(|&(g, _)| asm.f_int[g] - f_ext[g]));
            let scale = f_ext_norm.max(reaction_norm);
            if resid <= (model.stagger.newton_tol * scale).max(model.stagger.newton_abs) {
                converged_asm = Some(asm);
                break;
            }
            if resid > resid_accept && frac > MIN_STEP_FRACTION {
                // The correction overshot, typical at load reversals where
                // Gauss points flip between elastic and plastic branches.
                // Walk back along the same direction until the residual
                // drops again.
                frac *= 0.5;
                for (i, &g) in part.free.iter().enumerate() {
                    u[g] = u_accept[g] - frac * du_full[i];
                }
                continue;
            }
            let coo = asm.stiffness.take().expect("stiffness requested");
            let chol = factor_spd(&CscMatrix::from(&coo))?;
            let r = DMatrix::from_iterator(
                part.free.len(),
                1,
                part.free.iter().map(|&g| asm.f_int[g] - f_ext[g]),
            );
            let du = chol.solve(&r);
            u_accept.copy_from_slice(&u);
            resid_accept = resid;
            du_full = (0..part.free.len()).map(|i| du[(i, 0)]).collect();
            frac = 1.0;
            for (i, &g) in part.free.iter().enumerate() {
                u[g] -= du_full[i];
            }
        }
        let Some(asm) = converged_asm else {
            return Err(FemError::NewtonNonConvergence {
                iterations: model.stagger.newton_max,
                residual: resid,
            });
        };

        // Pass 2: smooth the updated plastic variable.
        let source: Vec<[f64; NGAUSS]> = asm
            .trial
            .iter()
            .map(|e| {
                let mut s = [0.0; NGAUSS];
                for (slot, gp) in s.iter_mut().zip(e) {
                    *slot = gp.update.state.k;
                }
                s
            })
            .collect();
        let kbar_new = model.helm.solve(mesh, &source)?;

        // Pass 3: damage from the smoothed (or local) driver.
        let driver: Vec<[f64; NGAUSS]> = if model.ell > 0.0 {
            interpolate_at_gauss(mesh, &kbar_new.values)
        } else {
            source
        };
        let dmg_new: Vec<Vec<DamageState>> = state
            .records
            .iter()
            .enumerate()
            .map(|(e, gps)| {
                let dm = &model.materials[mesh.materials[e]].damage;
                gps.iter()
                    .enumerate()
                    .map(|(g, rec)| dm.update(&rec.damage, driver[e][g]))
                    .collect()
            })
            .collect();

        let kbar_scale = kbar_new
            .values
            .iter()
            .fold(1.0_f64, |a, &v| a.max(v.abs()));
        let field_inc = kbar_new
            .values
            .iter()
            .zip(&kbar_frozen)
            .fold(0.0_f64, |a, (n, o)| a.max((n - o).abs()));
        let dmg_inc = dmg_new
            .iter()
            .flatten()
            .zip(dmg_frozen.iter().flatten())
            .fold(0.0_f64, |a, (n, o)| {
                a.max((n.d_i - o.d_i).abs()).max((n.d_u - o.d_u).abs())
            });
        let work_inc: f64 = u
            .iter()
            .zip(&u_prev)
            .zip(&asm.f_int)
            .map(|((a, b), f)| (a - b) * f)
            .sum::<f64>()
            .abs();
        let work_step: f64 = u
            .iter()
            .zip(&u_start)
            .zip(&asm.f_int)
            .map(|((a, b), f)| (a - b) * f)
            .sum::<f64>()
            .abs()
            .max(1e-30);

        report.force_residuals.push(resid);
        report.field_increments.push(field_inc);
        report.energy_increments.push(work_inc / work_step);

        let fields_ok = field_inc <= model.stagger.tol_field * kbar_scale && dmg_inc <= 1e-10;
        let energy_ok = outer == 1 || work_inc <= model.stagger.tol_energy * work_step;
        if fields_ok && energy_ok {
            for (rec_e, trial_e) in state.records.iter_mut().zip(&asm.trial) {
                for (rec, gp) in rec_e.iter_mut().zip(trial_e) {
                    rec.plastic = gp.update.state.clone();
                    rec.sigma_eff = gp.update.sigma_eff;
                }
            }
            for (rec_e, dmg_e) in state.records.iter_mut().zip(&dmg_new) {
                for (rec, d) in rec_e.iter_mut().zip(dmg_e) {
                    rec.damage = *d;
                }
            }
            state.u = u;
            state.kbar = kbar_new;
            state.f_int = asm.f_int;
            report.outer_iterations = outer;
            report.final_residual = resid;
            return Ok(report);
        }

        kbar_frozen = kbar_new.values;
        dmg_frozen = dmg_new;
        u_prev = u.clone();
    }

    Err(FemError::StaggerNonConvergence {
        outer: model.stagger.max_outer,
        force_residuals: report.force_residuals,
        field_increments: report.field_increments,
    })
}

/// Linear interpolation between two structurally identical load sets. The
/// convex form keeps both endpoints bit-exact.
fn lerp_loads(a: &Loads, b: &Loads, t: f64) -> Result<Loads, FemError> {
    let mismatch =
        || FemError::Mesh("load interpolation endpoints must constrain the same dofs".into());
    if a.dirichlet.len() != b.dirichlet.len()
        || a.point.len() != b.point.len()
        || a.tractions.len() != b.tractions.len()
    {
        return Err(mismatch());
    }
    let mut out = Loads::default();
    for (x, y) in a.dirichlet.iter().zip(&b.dirichlet) {
        if x.node != y.node || x.dir != y.dir {
            return Err(mismatch());
        }
        out.dirichlet.push(Dirichlet {
            node: x.node,
            dir: x.dir,
            value: (1.0 - t) * x.value + t * y.value,
        });
    }
    for (x, y) in a.point.iter().zip(&b.point) {
        if x.node != y.node || x.dir != y.dir {
            return Err(mismatch());
        }
        out.point.push(PointLoad {
            node: x.node,
            dir: x.dir,
            value: (1.0 - t) * x.value + t * y.value,
        });
    }
    for (x, y) in a.tractions.iter().zip(&b.tractions) {
        if x.element != y.element || x.face != y.face {
            return Err(mismatch());
        }
        let mut traction = [0.0; 3];
        for (i, c) in traction.iter_mut().enumerate() {
            *c = (1.0 - t) * x.traction[i] + t * y.traction[i];
        }
        out.tractions.push(FaceTraction {
            element: x.element,
            face: x.face,
            traction,
        });
    }
    Ok(out)
}

/// True when retrying the same increment in smaller pieces can help.
fn recoverable(err: &FemError) -> bool {
    !matches!(err, FemError::Mesh(_) | FemError::SingularJacobian { .. })
}

/// Advances from the loads of the committed state to `target`, recursively
/// halving the increment whenever a piece fails to converge.
///
/// `prev` must describe the loads the current state was committed under and
/// constrain the same dofs as `target`; only the values may differ. Returns
/// one report per converged substep, the last one at the full target level.
/// The smallest increment tried is `2^-max_bisections` of the full one; a
/// failure there, or any mesh-level error, aborts with the state still
/// committed at the last converged level.
pub fn staggered_step_adaptive(
    model: &FemModel,
    state: &mut SystemState,
    prev: &Loads,
    target: &Loads,
    max_bisections: u32,
) -> Result<Vec<StepReport>, FemError> {
    #[allow(clippy::too_many_arguments)]
    fn advance(
        model: &FemModel,
        state: &mut SystemState,
        prev: &Loads,
        target: &Loads,
        t0: f64,
        t1: f64,
        depth: u32,
        out: &mut Vec<StepReport>,
    ) -> Result<(), FemError> {
        let loads = lerp_loads(prev, target, t1)?;
        match staggered_step(model, state, &loads) {
            Ok(report) => {
                out.push(report);
                Ok(())
            }
            Err(err) if depth > 0 && recoverable(&err) => {
                // A failed step leaves the state committed at level t0.
                let tm = 0.5 * (t0 + t1);
                advance(model, state, prev, target, t0, tm, depth - 1, out)?;
                advance(model, state, prev, target, tm, t1, depth - 1, out)
            }
            Err(err) => Err(err),
        }
    }
    let mut out = Vec::new();
    advance(model, state, prev, target, 0.0, 1.0, max_bisections, &mut out)?;
    Ok(out)
}

/// Out-of-balance force per dof at the committed state. Constrained dofs
/// carry the support reactions, free dofs are zero up to solver tolerance.
pub fn reactions(
    model: &FemModel,
    state: &SystemState,
    loads: &Loads,
) -> Result<Vec<f64>, FemError> {
    let f_ext = external_force(&model.mesh, loads)?;
    Ok(state
        .f_int
        .iter()
        .zip(&f_ext)
        .map(|(a, b)| a - b)
        .collect())
}

/// Replaces prescribed dofs by their committed reaction forces and ramps
/// those forces to zero over `n_substeps` staggered steps.
///
/// `base_loads` must hold everything except the released constraints. If the
/// remaining constraints no longer restrain rigid-body motion the first
/// equilibrium solve reports a singular system.
pub fn release_dirichlet(
    model: &FemModel,
    state: &mut SystemState,
    targets: &[(usize, usize)],
    base_loads: &Loads,
    n_substeps: usize,
) -> Result<Vec<StepReport>, FemError> {
    if n_substeps == 0 {
        return Err(FemError::Mesh("release needs at least one substep".into()));
    }
    let f_ext_base = external_force(&model.mesh, base_loads)?;
    let r0: Vec<f64> = targets
        .iter()
        .map(|&(node, dir)| state.f_int[dof(node, dir)] - f_ext_base[dof(node, dir)])
        .collect();
    let mut reports = Vec::with_capacity(n_substeps);
    for j in 1..=n_substeps {
        let fac = 1.0 - j as f64 / n_substeps as f64;
        let mut loads = base_loads.clone();
        for (&(node, dir), &r) in targets.iter().zip(&r0) {
            loads.point.push(PointLoad {
                node,
                dir,
                value: fac * r,
            });
        }
        reports.push(staggered_step(model, state, &loads)?);
    }
    Ok(reports)
}
