//! Uniaxial-stress material point driver.
//!
//! Axial strain is prescribed; the lateral strain (equal in both transverse
//! directions by symmetry) is iterated so the nominal transverse stress
//! vanishes. Damage updates live inside the residual, so the committed state
//! is consistent with the nominal stress the caller sees; the scalar Newton
//! Jacobian freezes the damage indices, which only affects convergence rate.

use crate::damage::DamageState;
use crate::material::MaterialParams;
use crate::plasticity::{PlasticState, PlasticityError, SolverConfig, UpdateResult};
use crate::tensor::SymTensor3;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PointError {
    #[error(transparent)]
    Plasticity(#[from] PlasticityError),
    #[error("lateral iteration failed: transverse stress {residual:.3e} MPa after {iterations} iterations")]
    LateralNonConvergence { residual: f64, iterations: usize },
}

/// One integration point under a uniaxial nominal stress state.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialPoint {
    pub plastic: PlasticState,
    pub damage: DamageState,
    lateral: f64,
}

/// Committed outcome of one axial strain increment.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStep {
    pub eps_axial: f64,
    pub eps_lateral: f64,
    pub sigma_nominal: SymTensor3,
    pub sigma_eff: SymTensor3,
    pub dgamma: f64,
    pub k: f64,
    pub d_i: f64,
    pub d_u: f64,
}

impl MaterialPoint {
    pub fn new(mat: &MaterialParams) -> Self {
        Self {
            plastic: PlasticState::new(mat.plasticity.kin.len()),
            damage: DamageState::virgin(),
            lateral: 0.0,
        }
    }

    /// Drive the point to the given axial strain, iterating the lateral
    /// strain until |sigma_nominal_yy| falls below tol_rel * sigma0. State
    /// commits only on convergence.
    pub fn step(
        &mut self,
        mat: &MaterialParams,
        eps_axial: f64,
        cfg: &SolverConfig,
    ) -> Result<PointStep, PointError> {
        let tol = cfg.tol_rel.max(1e-10) * mat.plasticity.iso.sigma0;
        let max_iter = 100;

        let plastic0 = self.plastic.clone();
        let damage0 = self.damage;
        let evaluate = |lateral: f64| -> Result<(f64, UpdateResult, DamageState, SymTensor3), PlasticityError> {
            let eps = SymTensor3::diag(eps_axial, lateral, lateral);
            let res = mat.plasticity.integrate(&plastic0, &eps, cfg)?;
            let dmg = mat.damage.update(&damage0, res.state.k);
            let nominal = mat.damage.map(&res.sigma_eff, &dmg);
            Ok((nominal.yy, res, dmg, nominal))
        };

        // Warm start: previous lateral strain, shifted elastically.
        let mut lateral = if self.plastic.eps == SymTensor3::ZERO && self.lateral == 0.0 {
            -mat.plasticity.elastic.nu * eps_axial
        } else {
            self.lateral - mat.plasticity.elastic.nu * (eps_axial - self.plastic.eps.xx)
        };
        let (mut r, mut res, mut dmg, mut nominal) = evaluate(lateral)?;

        // Bracket endpoints with opposite residual signs, once seen.
        let mut neg: Option<f64> = None;
        let mut pos: Option<f64> = None;
        for it in 0..max_iter {
            if r.abs() <= tol {
                self.plastic = res.state;
                self.damage = dmg;
                self.lateral = lateral;
                return Ok(PointStep {
                    eps_axial,
                    eps_lateral: lateral,
                    sigma_nominal: nominal,
                    sigma_eff: res.sigma_eff,
                    dgamma: res.dgamma,
                    k: self.plastic.k,
                    d_i: self.damage.d_i,
                    d_u: self.damage.d_u,
                });
            }
            if r > 0.0 {
                pos = Some(lateral);
            } else {
                neg = Some(lateral);
            }

            // Transverse stiffness with frozen damage: perturbing both
            // lateral strains drives sigma_yy through rows yy and zz.
            let scaled = mat
                .damage
                .nominal_scaling(&dmg, res.sigma_eff.mean())
                .compose(&res.tangent);
            let j = scaled.m[1][1] + scaled.m[1][2];
            let mut next = if j.abs() > 1e-12 { lateral - r / j } else { f64::NAN };

            // Transverse stress grows with lateral strain, so a sign-change
            // bracket is reliable; bisect whenever Newton leaves it.
            if let (Some(n), Some(p)) = (neg, pos) {
                let (lo, hi) = (n.min(p), n.max(p));
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
            } else if !next.is_finite() {
                next = lateral - r.signum() * (1e-4 + 0.5 * eps_axial.abs());
            }
            // Cap the move; huge Jacobian mispredictions otherwise stall
            // the plastic solver with absurd trials.
            let cap = 0.05 + eps_axial.abs();
            if (next - lateral).abs() > cap {
                next = lateral + cap * (next - lateral).signum();
            }

            lateral = next;
            let out = evaluate(lateral)?;
            r = out.0;
            res = out.1;
            dmg = out.2;
            nominal = out.3;
            let _ = it;
        }
        Err(PointError::LateralNonConvergence { residual: r.abs(), iterations: max_iter })
    }
}
