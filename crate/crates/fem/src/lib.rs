//! Small-strain hexahedral finite elements coupling momentum balance with a
//! Helmholtz-regularized nonlocal plastic variable.
//!
//! The displacement and nonlocal fields share one mesh and trilinear
//! interpolation. Each load step runs a staggered loop: a Newton solve of
//! equilibrium with the nonlocal field and damage frozen, a Helmholtz solve
//! `kbar - ell^2 lap(kbar) = k` sourced from the updated Gauss-point plastic
//! variable, and a damage update from the interpolated field, repeated until
//! both fields are stationary. Gauss-point history commits only when the
//! stagger converges.
//!
//! Modules: [`mesh`] (geometry, plain-text IO, box generator), [`shape`]
//! (trilinear shape functions, 2x2x2 Gauss rule), [`helmholtz`] (nonlocal
//! assembly and solve), [`equilibrium`] (B-matrices, element operators,
//! loads), [`solver`] (Newton, stagger, Dirichlet release), [`snapshot`]
//! (plain-text field dumps).

pub mod equilibrium;
pub mod helmholtz;
pub mod mesh;
pub mod shape;
pub mod snapshot;
pub mod solver;

use plastdam::plasticity::PlasticityError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("singular Jacobian in element {element} (det J = {detj:.3e})")]
    SingularJacobian { element: usize, detj: f64 },
    #[error("material update failed at element {element}, Gauss point {gp}: {source}")]
    Material {
        element: usize,
        gp: usize,
        source: PlasticityError,
    },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("equilibrium Newton failed: residual {residual:.3e} after {iterations} iterations")]
    NewtonNonConvergence { iterations: usize, residual: f64 },
    #[error("staggered loop failed after {outer} outer iterations")]
    StaggerNonConvergence {
        outer: usize,
        force_residuals: Vec<f64>,
        field_increments: Vec<f64>,
    },
}
