//! Material parameter bundles: isotropic elasticity, the damage-model
//! selection, and calibrated parameter sets used by the test scenarios.
//!
//! Units are MPa for stresses and moduli, mm for lengths, dimensionless
//! strain.

use crate::damage::{
    legacy_map_single, legacy_map_split, map_stress, update_damage, ActivationParams, DamageState,
    SplitVariant, TrilinearLaw,
};
use crate::hardening::{BackstressComponent, ChabocheSet, IsotropicHardening};
use crate::plasticity::Plasticity;
use crate::tensor::{SymTensor3, Tangent};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("invalid material parameter: {0}")]
    InvalidParameter(String),
}

/// Isotropic linear elasticity, stored as Young's modulus and Poisson ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticConstants {
    pub e: f64,
    pub nu: f64,
}

impl ElasticConstants {
    pub fn new(e: f64, nu: f64) -> Result<Self, MaterialError> {
        if !(e > 0.0) {
            return Err(MaterialError::InvalidParameter(format!(
                "Young's modulus must be positive, got {e}"
            )));
        }
        if !(nu > -1.0 && nu < 0.5) {
            return Err(MaterialError::InvalidParameter(format!(
                "Poisson ratio must lie in (-1, 0.5), got {nu}"
            )));
        }
        Ok(Self { e, nu })
    }

    pub fn mu(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    pub fn lambda(&self) -> f64 {
        self.e * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
    }

    pub fn bulk(&self) -> f64 {
        self.e / (3.0 * (1.0 - 2.0 * self.nu))
    }

    /// Fourth-order elasticity operator 3K P_vol + 2mu P_dev in Mandel form.
    pub fn tangent(&self) -> Tangent {
        Tangent::vol_projector() * (3.0 * self.bulk()) + Tangent::dev_projector() * (2.0 * self.mu())
    }

    /// sigma = K tr(eps) I + 2 mu dev(eps).
    pub fn stress(&self, eps: &SymTensor3) -> SymTensor3 {
        eps.dev() * (2.0 * self.mu()) + SymTensor3::spherical(self.bulk() * eps.trace())
    }
}

/// How the effective stress is degraded to the nominal one.
#[derive(Debug, Clone, PartialEq)]
pub enum DamageModel {
    /// No degradation; the nominal stress equals the effective stress.
    None,
    /// Two indices: isotropic law on the deviator, unilateral law on the
    /// activation-weighted volumetric part.
    TwoIndex {
        isotropic: TrilinearLaw,
        unilateral: TrilinearLaw,
        activation: ActivationParams,
    },
    /// One index applied through one of the single-variable mappings.
    Legacy { law: TrilinearLaw, mapping: LegacyMapping },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegacyMapping {
    Single,
    Split(SplitVariant),
}

impl DamageModel {
    /// Grow the damage indices from the plastic driver (running max). Legacy
    /// models carry their index in d_i; d_u mirrors it.
    pub fn update(&self, state: &DamageState, k_driver: f64) -> DamageState {
        match self {
            DamageModel::None => *state,
            DamageModel::TwoIndex { isotropic, unilateral, .. } => {
                update_damage(state, k_driver, isotropic, unilateral)
            }
            DamageModel::Legacy { law, .. } => {
                let d = state.d_i.max(law.damage_index(k_driver));
                DamageState { d_i: d, d_u: d }
            }
        }
    }

    /// Nominal stress from the effective stress at the given damage state.
    pub fn map(&self, sigma_eff: &SymTensor3, state: &DamageState) -> SymTensor3 {
        match self {
            DamageModel::None => *sigma_eff,
            DamageModel::TwoIndex { activation, .. } => {
                map_stress(sigma_eff, state.d_i, state.d_u, activation)
            }
            DamageModel::Legacy { mapping, .. } => match mapping {
                LegacyMapping::Single => legacy_map_single(sigma_eff, state.d_i),
                LegacyMapping::Split(which) => legacy_map_split(sigma_eff, state.d_i, *which),
            },
        }
    }

    /// Frozen-damage, frozen-activation scaling that takes an effective
    /// tangent to a nominal one. For the eigenprojection splits the isotropic
    /// scaling (1 - d) I is used as an approximation; solvers relying on it
    /// iterate on exact residuals, so this only affects convergence rate.
    pub fn nominal_scaling(&self, state: &DamageState, p_eff: f64) -> Tangent {
        match self {
            DamageModel::None => Tangent::identity(),
            DamageModel::TwoIndex { activation, .. } => {
                let phi = crate::damage::activation(activation, p_eff);
                Tangent::dev_projector() * (1.0 - state.d_i)
                    + Tangent::vol_projector() * (1.0 - phi * state.d_u)
            }
            DamageModel::Legacy { mapping, .. } => match mapping {
                LegacyMapping::Single => Tangent::identity() * (1.0 - state.d_i),
                LegacyMapping::Split(SplitVariant::Deviatoric) => {
                    Tangent::dev_projector() * (1.0 - state.d_i) + Tangent::vol_projector()
                }
                LegacyMapping::Split(SplitVariant::Volumetric) => {
                    Tangent::dev_projector() + Tangent::vol_projector() * (1.0 - state.d_i)
                }
                LegacyMapping::Split(_) => Tangent::identity() * (1.0 - state.d_i),
            },
        }
    }
}

/// Full point-level material description: effective-stress plasticity, the
/// damage model acting on it, and the nonlocal length used by field solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams {
    pub plasticity: Plasticity,
    pub damage: DamageModel,
    /// Characteristic length ell (mm) of the nonlocal averaging; 0 keeps the
    /// driver local.
    pub ell: f64,
}

impl MaterialParams {
    /// Cyclically stabilized aluminum alloy calibration: Voce isotropic
    /// hardening plus two recall backstresses. No damage attached.
    pub fn calibrated_aluminum() -> Self {
        let elastic = ElasticConstants::new(75_000.0, 0.334).unwrap();
        let iso = IsotropicHardening::new(215.0, 230.0, 25.0).unwrap();
        let kin = ChabocheSet::new(vec![
            BackstressComponent::new(2_500.0, 25.0).unwrap(),
            BackstressComponent::new(60_000.0, 550.0).unwrap(),
        ]);
        Self {
            plasticity: Plasticity::new(elastic, iso, kin),
            damage: DamageModel::None,
            ell: 12.5,
        }
    }

    /// Aluminum calibration with the damage laws fitted on smooth dog-bone
    /// fatigue specimens.
    pub fn dogbone() -> Self {
        let mut mat = Self::calibrated_aluminum();
        mat.damage = DamageModel::TwoIndex {
            isotropic: TrilinearLaw::new(0.825, 0.775, 0.005, 10.0, 50.0, 1e-8).unwrap(),
            unilateral: TrilinearLaw::new(0.825, 0.025, 0.005, 10.0, 11.0, 1e-8).unwrap(),
            activation: ActivationParams::new(1.0, -20_000.0).unwrap(),
        };
        mat
    }

    /// Aluminum calibration with the damage laws refitted for sharply notched
    /// compact-tension geometries, where plastic strain localizes over a much
    /// smaller length.
    pub fn compact_tension() -> Self {
        let mut mat = Self::calibrated_aluminum();
        mat.damage = DamageModel::TwoIndex {
            isotropic: TrilinearLaw::new(0.825, 0.775, 0.005, 0.25, 0.80, 1e-8).unwrap(),
            unilateral: TrilinearLaw::new(0.825, 0.025, 0.005, 0.50, 4.00, 1e-8).unwrap(),
            activation: ActivationParams::new(1.0, -20_000.0).unwrap(),
        };
        mat.ell = 0.75;
        mat
    }

    /// Demo material for hysteresis-shape studies: constant yield stress so
    /// the loop shape isolates the kinematic hardening contribution.
    pub fn hysteresis_demo(kin: ChabocheSet) -> Self {
        let elastic = ElasticConstants::new(75_000.0, 0.334).unwrap();
        let iso = IsotropicHardening::perfect(235.0).unwrap();
        Self {
            plasticity: Plasticity::new(elastic, iso, kin),
            damage: DamageModel::None,
            ell: 0.0,
        }
    }
}
