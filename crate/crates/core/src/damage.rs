//! Ductile damage: trilinear integrity laws, the crack-closure activation
//! function, and the mapping from effective to nominal stress.
//!
//! Damage enters as two scalar indices acting on complementary parts of the
//! effective stress:
//!
//! ```text
//! sigma = (1 - d_i) dev(sigma_eff) + (1 - phi(p_eff) d_u) p_eff I
//! ```
//!
//! `d_i` degrades the deviatoric response, `d_u` the volumetric one, and the
//! activation function phi fades the volumetric degradation out under
//! compressive mean stress (crack closure regains volumetric stiffness in a
//! smooth way). Both indices grow monotonically, driven by the plastic
//! internal variable through piecewise-linear integrity laws.
//!
//! The single-index mapping `(1 - d) sigma_eff` and its four split variants
//! (tensile / compressive / deviatoric / volumetric) are kept as alternatives
//! for comparative studies.

use crate::tensor::SymTensor3;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DamageError {
    #[error("invalid damage parameter: {0}")]
    InvalidParameter(String),
}

/// Piecewise-linear integrity law through (0, 1), (k1, w1), (k2, w2),
/// (k3, w_min), clamped at w_min beyond k3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilinearLaw {
    pub w1: f64,
    pub w2: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub w_min: f64,
}

impl TrilinearLaw {
    pub fn new(w1: f64, w2: f64, k1: f64, k2: f64, k3: f64, w_min: f64) -> Result<Self, DamageError> {
        if !(w_min > 0.0 && w_min <= w2 && w2 <= w1 && w1 <= 1.0) {
            return Err(DamageError::InvalidParameter(format!(
                "integrity breakpoints must satisfy 0 < w_min <= w2 <= w1 <= 1, got w1={w1}, w2={w2}, w_min={w_min}"
            )));
        }
        if !(k1 >= 0.0 && k1 <= k2 && k2 <= k3) {
            return Err(DamageError::InvalidParameter(format!(
                "plastic-variable breakpoints must satisfy 0 <= k1 <= k2 <= k3, got k1={k1}, k2={k2}, k3={k3}"
            )));
        }
        Ok(Self { w1, w2, k1, k2, k3, w_min })
    }

    /// Degenerate form of the linear test law d(k) = k for k in [0, 1]:
    /// breakpoints collinear on w = 1 - k, floored at w_min past k = 1.
    pub fn linear() -> Self {
        Self::new(0.75, 0.5, 0.25, 0.5, 1.0, 1e-8).unwrap()
    }

    /// Material integrity w(k) in [w_min, 1]. Contract: k >= 0.
    pub fn integrity(&self, k: f64) -> f64 {
        assert!(k >= 0.0, "plastic driver must be non-negative, got {k}");
        if k >= self.k3 {
            self.w_min
        } else if k >= self.k2 {
            lerp(self.k2, self.w2, self.k3, self.w_min, k)
        } else if k >= self.k1 {
            lerp(self.k1, self.w1, self.k2, self.w2, k)
        } else {
            lerp(0.0, 1.0, self.k1, self.w1, k)
        }
    }

    /// Damage index d(k) = 1 - w(k), in [0, 1 - w_min].
    pub fn damage_index(&self, k: f64) -> f64 {
        1.0 - self.integrity(k)
    }
}

/// Linear interpolation; collapsed segments yield the right-hand value.
fn lerp(x0: f64, y0: f64, x1: f64, y1: f64, x: f64) -> f64 {
    if x1 > x0 {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    } else {
        y1
    }
}

/// Crack-closure activation parameters: alpha sets the curvature, m (< 0,
/// MPa) is the mean effective stress at which closure is complete.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationParams {
    pub alpha: f64,
    pub m: f64,
}

impl ActivationParams {
    pub fn new(alpha: f64, m: f64) -> Result<Self, DamageError> {
        if !(alpha > 0.0) {
            return Err(DamageError::InvalidParameter(format!(
                "activation curvature alpha must be positive, got {alpha}"
            )));
        }
        if !(m < 0.0) {
            return Err(DamageError::InvalidParameter(format!(
                "full-closure mean stress m must be negative, got {m}"
            )));
        }
        Ok(Self { alpha, m })
    }
}

/// Activation phi(p_eff): 0 below m (full closure), 1 above 0 (fully open),
/// smooth exponential blend in between. Continuous and non-decreasing.
pub fn activation(params: &ActivationParams, p_eff: f64) -> f64 {
    if p_eff >= 0.0 {
        1.0
    } else if p_eff <= params.m {
        0.0
    } else {
        1.0 - (1.0 - (params.alpha * p_eff / params.m).exp()) / (1.0 - params.alpha.exp())
    }
}

/// Per-point damage indices. Both are non-decreasing over a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DamageState {
    pub d_i: f64,
    pub d_u: f64,
}

impl DamageState {
    pub fn virgin() -> Self {
        Self::default()
    }
}

/// Running-max update of both indices from the plastic driver (local k or
/// interpolated nonlocal k).
pub fn update_damage(
    state: &DamageState,
    k_driver: f64,
    isotropic: &TrilinearLaw,
    unilateral: &TrilinearLaw,
) -> DamageState {
    DamageState {
        d_i: state.d_i.max(isotropic.damage_index(k_driver)),
        d_u: state.d_u.max(unilateral.damage_index(k_driver)),
    }
}

/// Two-index nominal stress with the activation evaluated from the effective
/// mean stress.
pub fn map_stress(sigma_eff: &SymTensor3, d_i: f64, d_u: f64, act: &ActivationParams) -> SymTensor3 {
    let phi = activation(act, sigma_eff.mean());
    map_stress_with_activation(sigma_eff, d_i, d_u, phi)
}

/// Two-index mapping with the activation value supplied by the caller (phi
/// frozen). With phi = 1 and d_i = d_u = d this reduces to the single-index
/// mapping.
pub fn map_stress_with_activation(
    sigma_eff: &SymTensor3,
    d_i: f64,
    d_u: f64,
    phi: f64,
) -> SymTensor3 {
    debug_assert!((0.0..1.0).contains(&d_i) && (0.0..1.0).contains(&d_u));
    let p = sigma_eff.mean();
    sigma_eff.dev() * (1.0 - d_i) + SymTensor3::spherical((1.0 - phi * d_u) * p)
}

/// Single-index nominal stress (1 - d) sigma_eff.
pub fn legacy_map_single(sigma_eff: &SymTensor3, d: f64) -> SymTensor3 {
    debug_assert!((0.0..1.0).contains(&d));
    *sigma_eff * (1.0 - d)
}

/// Which split component of the effective stress a single damage index
/// degrades; the complement stays intact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitVariant {
    Tensile,
    Compressive,
    Deviatoric,
    Volumetric,
}

/// Single-index mapping restricted to one split component.
pub fn legacy_map_split(sigma_eff: &SymTensor3, d: f64, which: SplitVariant) -> SymTensor3 {
    debug_assert!((0.0..1.0).contains(&d));
    match which {
        SplitVariant::Tensile => {
            let t = sigma_eff.tensile_part();
            *sigma_eff - t * d
        }
        SplitVariant::Compressive => {
            let c = sigma_eff.compressive_part();
            *sigma_eff - c * d
        }
        SplitVariant::Deviatoric => {
            sigma_eff.dev() * (1.0 - d) + SymTensor3::spherical(sigma_eff.mean())
        }
        SplitVariant::Volumetric => {
            sigma_eff.dev() + SymTensor3::spherical((1.0 - d) * sigma_eff.mean())
        }
    }
}
