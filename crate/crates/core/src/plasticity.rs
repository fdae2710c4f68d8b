//! Implicit return mapping for J2 plasticity with Voce isotropic hardening
//! and a sum of Armstrong-Frederick backstresses, formulated in the effective
//! (undamaged) configuration.
//!
//! Yield function and flow rule:
//!
//! ```text
//! Phi = sqrt(3 J2(sigma - beta)) - sigma_y(k)
//! deps_p = dgamma N,   N = (3/2) (s - beta) / q,   (2/3) N : N = 1
//! dbeta_k = (2/3) h_k deps_p - dgamma b_k beta_k
//! ```
//!
//! A backward-Euler discretization collapses to one scalar equation in the
//! plastic multiplier increment:
//!
//! ```text
//! R(dg) = q_hat(dg) - 3 mu dg - sum_k h_k dg / (1 + b_k dg) - sigma_y(k + dg) = 0
//! eta_hat(dg) = s_trial - sum_k beta_k / (1 + b_k dg)
//! q_hat = sqrt(3 J2(eta_hat))
//! ```
//!
//! solved by Newton iteration inside a maintained sign-change bracket, with
//! bisection whenever a Newton step leaves the bracket. The algorithmic
//! tangent is assembled in closed form from the same quantities, so it is
//! exact to the solver tolerance.

use crate::hardening::{ChabocheSet, IsotropicHardening};
use crate::material::ElasticConstants;
use crate::tensor::{SymTensor3, Tangent};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlasticityError {
    #[error("return mapping failed: residual {residual:.3e} MPa after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Tolerances and iteration limits for the return mapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Yield residual tolerance relative to sigma0: converged when
    /// |Phi| <= tol_rel * sigma0.
    pub tol_rel: f64,
    pub max_iter: usize,
    /// Recursion depth for halving the strain increment when a step fails.
    pub max_bisections: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol_rel: 1e-8, max_iter: 50, max_bisections: 10 }
    }
}

/// History carried from step to step. `eps` is the total strain at which the
/// state was last committed; it anchors sub-incrementation.
#[derive(Debug, Clone, PartialEq)]
pub struct PlasticState {
    pub eps: SymTensor3,
    pub eps_p: SymTensor3,
    pub k: f64,
    pub backstresses: Vec<SymTensor3>,
}

impl PlasticState {
    pub fn new(n_backstresses: usize) -> Self {
        Self {
            eps: SymTensor3::ZERO,
            eps_p: SymTensor3::ZERO,
            k: 0.0,
            backstresses: vec![SymTensor3::ZERO; n_backstresses],
        }
    }

    pub fn backstress_total(&self) -> SymTensor3 {
        self.backstresses
            .iter()
            .fold(SymTensor3::ZERO, |acc, b| acc + *b)
    }

    pub fn is_finite(&self) -> bool {
        self.eps.is_finite()
            && self.eps_p.is_finite()
            && self.k.is_finite()
            && self.backstresses.iter().all(|b| b.is_finite())
    }
}

/// Outcome of one strain-driven update.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateResult {
    pub state: PlasticState,
    pub sigma_eff: SymTensor3,
    pub dgamma: f64,
    pub tangent: Tangent,
}

/// Phi = sqrt(3 J2(sigma - beta)) - sigma_y(k). Negative inside the elastic
/// domain, zero on the yield surface.
pub fn yield_function(
    sigma_eff: &SymTensor3,
    beta_total: &SymTensor3,
    k: f64,
    iso: &IsotropicHardening,
) -> f64 {
    (*sigma_eff - *beta_total).von_mises() - iso.yield_stress(k)
}

/// Effective-configuration plasticity parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Plasticity {
    pub elastic: ElasticConstants,
    pub iso: IsotropicHardening,
    pub kin: ChabocheSet,
}

impl Plasticity {
    pub fn new(elastic: ElasticConstants, iso: IsotropicHardening, kin: ChabocheSet) -> Self {
        Self { elastic, iso, kin }
    }

    fn screen_inputs(&self, state: &PlasticState, eps_new: &SymTensor3) -> Result<(), PlasticityError> {
        if !eps_new.is_finite() {
            return Err(PlasticityError::InvalidInput("non-finite strain".into()));
        }
        if !state.is_finite() {
            return Err(PlasticityError::InvalidInput("non-finite state".into()));
        }
        if state.backstresses.len() != self.kin.len() {
            return Err(PlasticityError::InvalidInput(format!(
                "state carries {} backstresses, material defines {}",
                state.backstresses.len(),
                self.kin.len()
            )));
        }
        Ok(())
    }

    /// Implicit update to the total strain `eps_new`. Elastic steps return
    /// the unchanged state with the elastic operator; plastic steps solve the
    /// consistency equation and return the algorithmic tangent. On
    /// non-convergence the strain path from the committed state is halved
    /// recursively up to `max_bisections` times.
    pub fn integrate(
        &self,
        state: &PlasticState,
        eps_new: &SymTensor3,
        cfg: &SolverConfig,
    ) -> Result<UpdateResult, PlasticityError> {
        self.screen_inputs(state, eps_new)?;
        self.step(state, eps_new, cfg, cfg.max_bisections)
    }

    fn step(
        &self,
        state: &PlasticState,
        eps_new: &SymTensor3,
        cfg: &SolverConfig,
        depth: usize,
    ) -> Result<UpdateResult, PlasticityError> {
        match self.single_step(state, eps_new, cfg) {
            Ok(res) => Ok(res),
            Err(PlasticityError::NonConvergence { .. }) if depth > 0 => {
                let mid = (state.eps + *eps_new) * 0.5;
                let first = self.step(state, &mid, cfg, depth - 1)?;
                let second = self.step(&first.state, eps_new, cfg, depth - 1)?;
                Ok(UpdateResult { dgamma: first.dgamma + second.dgamma, ..second })
            }
            Err(e) => Err(e),
        }
    }

    fn single_step(
        &self,
        state: &PlasticState,
        eps_new: &SymTensor3,
        cfg: &SolverConfig,
    ) -> Result<UpdateResult, PlasticityError> {
        let tol = cfg.tol_rel * self.iso.sigma0;
        let mu = self.elastic.mu();

        let sigma_tr = self.elastic.stress(&(*eps_new - state.eps_p));
        let s_tr = sigma_tr.dev();
        let eta_tr = s_tr - state.backstress_total();
        let q_tr = (1.5 * eta_tr.ddot(&eta_tr)).sqrt();
        let phi_tr = q_tr - self.iso.yield_stress(state.k);

        if phi_tr <= tol {
            let mut new_state = state.clone();
            new_state.eps = *eps_new;
            return Ok(UpdateResult {
                state: new_state,
                sigma_eff: sigma_tr,
                dgamma: 0.0,
                tangent: self.elastic.tangent(),
            });
        }

        // Relative stress and residual as functions of the multiplier.
        let relative = |dg: f64| -> (SymTensor3, f64) {
            let mut eta = s_tr;
            for (bc, beta) in self.kin.components.iter().zip(&state.backstresses) {
                eta = eta - *beta * (1.0 / (1.0 + bc.b * dg));
            }
            let q = (1.5 * eta.ddot(&eta)).sqrt();
            (eta, q)
        };
        let residual = |dg: f64, q: f64| -> f64 {
            let mut kin_term = 0.0;
            for bc in &self.kin.components {
                kin_term += bc.h * dg / (1.0 + bc.b * dg);
            }
            q - 3.0 * mu * dg - kin_term - self.iso.yield_stress(state.k + dg)
        };

        // Bracket the root: R(0) = phi_trial > 0 and R decays at least
        // linearly with slope -3 mu, so doubling finds a sign change fast.
        let mut lo = 0.0;
        let mut hi = phi_tr / (3.0 * mu);
        {
            let mut guard = 0;
            loop {
                let (_, q) = relative(hi);
                if residual(hi, q) <= 0.0 {
                    break;
                }
                lo = hi;
                hi *= 2.0;
                guard += 1;
                assert!(guard < 200, "consistency residual never became negative");
            }
        }

        let sum_h: f64 = self.kin.components.iter().map(|c| c.h).sum();
        let mut dg = (phi_tr / (3.0 * mu + sum_h + self.iso.yield_stress_slope(state.k))).min(hi);
        let (mut eta, mut q) = relative(dg);
        let mut r = residual(dg, q);
        let mut converged = false;

        for _ in 0..cfg.max_iter {
            if r.abs() <= tol {
                converged = true;
                break;
            }
            if r > 0.0 {
                lo = dg;
            } else {
                hi = dg;
            }
            // dR/ddg pieces at the current iterate.
            let mut eta_prime = SymTensor3::ZERO;
            let mut hard = 0.0;
            for (bc, beta) in self.kin.components.iter().zip(&state.backstresses) {
                let f = 1.0 + bc.b * dg;
                eta_prime += *beta * (bc.b / (f * f));
                hard += bc.h / (f * f);
            }
            let q_prime = if q > 0.0 { 1.5 * eta.ddot(&eta_prime) / q } else { 0.0 };
            let r_prime = q_prime - 3.0 * mu - hard - self.iso.yield_stress_slope(state.k + dg);

            let newton = dg - r / r_prime;
            dg = if r_prime < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let (e, qq) = relative(dg);
            eta = e;
            q = qq;
            r = residual(dg, q);
        }
        if !converged {
            return Err(PlasticityError::NonConvergence {
                residual: r.abs(),
                iterations: cfg.max_iter,
            });
        }

        let normal = eta * (1.5 / q);
        let mut new_state = state.clone();
        new_state.eps = *eps_new;
        new_state.eps_p = state.eps_p + normal * dg;
        new_state.k = state.k + dg;
        for (dst, (bc, beta)) in new_state
            .backstresses
            .iter_mut()
            .zip(self.kin.components.iter().zip(&state.backstresses))
        {
            *dst = (*beta + normal * (2.0 / 3.0 * bc.h * dg)) * (1.0 / (1.0 + bc.b * dg));
        }
        let sigma_eff = sigma_tr - normal * (2.0 * mu * dg);
        debug_assert!(
            yield_function(&sigma_eff, &new_state.backstress_total(), new_state.k, &self.iso).abs()
                <= 50.0 * tol
        );

        // Closed-form algorithmic tangent. With A = -dR/ddg at the root:
        //   D = 3K P_vol + 2 mu (1 - 3 mu dg / q) P_dev
        //     + [-4 mu^2 / A + (4 mu^2 dg / q)(1 + q' / A)] N (x) N
        //     - (6 mu^2 dg / (q A)) eta' (x) N
        let mut eta_prime = SymTensor3::ZERO;
        let mut hard = 0.0;
        for (bc, beta) in self.kin.components.iter().zip(&state.backstresses) {
            let f = 1.0 + bc.b * dg;
            eta_prime += *beta * (bc.b / (f * f));
            hard += bc.h / (f * f);
        }
        let q_prime = 1.5 * eta.ddot(&eta_prime) / q;
        let a = 3.0 * mu + hard + self.iso.yield_stress_slope(new_state.k) - q_prime;
        let mu2 = mu * mu;
        let c_nn = -4.0 * mu2 / a + (4.0 * mu2 * dg / q) * (1.0 + q_prime / a);
        let c_en = -6.0 * mu2 * dg / (q * a);
        let tangent = Tangent::vol_projector() * (3.0 * self.elastic.bulk())
            + Tangent::dev_projector() * (2.0 * mu * (1.0 - 3.0 * mu * dg / q))
            + Tangent::outer(&normal, &normal) * c_nn
            + Tangent::outer(&eta_prime, &normal) * c_en;

        Ok(UpdateResult { state: new_state, sigma_eff, dgamma: dg, tangent })
    }

    /// Explicit forward-Euler oracle: the strain path from the committed
    /// state to `eps_new` is split into `n_sub` uniform sub-increments, each
    /// integrated with the trial-state flow normal and the continuum
    /// hardening modulus, followed by drift-projection rounds back onto the
    /// yield surface. Shares no algebra with the implicit solver beyond the
    /// model functions themselves; converges to the same answer as
    /// `n_sub` grows. The tangent field carries the elastic operator.
    pub fn substep_integrate(
        &self,
        state: &PlasticState,
        eps_new: &SymTensor3,
        n_sub: usize,
        cfg: &SolverConfig,
    ) -> Result<UpdateResult, PlasticityError> {
        if n_sub == 0 {
            return Err(PlasticityError::InvalidInput("n_sub must be at least 1".into()));
        }
        self.screen_inputs(state, eps_new)?;
        let tol = cfg.tol_rel * self.iso.sigma0;
        let mu = self.elastic.mu();

        let eps0 = state.eps;
        let deps = *eps_new - eps0;
        let mut st = state.clone();
        let mut dgamma = 0.0;

        for i in 1..=n_sub {
            let eps_i = eps0 + deps * (i as f64 / n_sub as f64);
            let mut phi = 0.0;
            for _round in 0..60 {
                let sigma = self.elastic.stress(&(eps_i - st.eps_p));
                let eta = sigma.dev() - st.backstress_total();
                let q = (1.5 * eta.ddot(&eta)).sqrt();
                phi = q - self.iso.yield_stress(st.k);
                if phi <= tol {
                    break;
                }
                let normal = eta * (1.5 / q);
                let mut kin_mod = 0.0;
                for (bc, beta) in self.kin.components.iter().zip(&st.backstresses) {
                    kin_mod += bc.h - bc.b * normal.ddot(beta);
                }
                let denom = 3.0 * mu + kin_mod + self.iso.yield_stress_slope(st.k);
                if !(denom > 0.0) {
                    return Err(PlasticityError::InvalidInput(
                        "explicit oracle hit a non-positive hardening modulus".into(),
                    ));
                }
                let dg = phi / denom;
                st.eps_p += normal * dg;
                st.k += dg;
                for (bc, beta) in self.kin.components.iter().zip(st.backstresses.iter_mut()) {
                    *beta = *beta + normal * (2.0 / 3.0 * bc.h * dg) - *beta * (bc.b * dg);
                }
                dgamma += dg;
            }
            if phi > 50.0 * tol {
                return Err(PlasticityError::NonConvergence { residual: phi, iterations: 60 });
            }
            st.eps = eps_i;
        }

        let sigma_eff = self.elastic.stress(&(*eps_new - st.eps_p));
        Ok(UpdateResult { state: st, sigma_eff, dgamma, tangent: self.elastic.tangent() })
    }
}
