//! Material models for cyclic elastoplasticity with ductile damage.
//!
//! The library covers the local constitutive layer of a fatigue simulation:
//!
//! * [`tensor`]: symmetric rank-2 tensors, invariants, principal
//!   decomposition, and rank-4 operators in Mandel notation.
//! * [`hardening`]: Voce isotropic hardening and Chaboche multi-component
//!   kinematic hardening (Armstrong-Frederick recall).
//! * [`plasticity`]: J2 return-mapping stress update in the effective
//!   (undamaged) configuration, with an algorithmic tangent and an explicit
//!   substepping reference integrator.
//! * [`damage`]: trilinear integrity laws, deviatoric/volumetric damage
//!   indices, and the crack-closure activation function that maps effective
//!   stress to nominal stress.
//! * [`material`]: parameter bundles tying the above together, including
//!   the calibrated aluminium parameter sets used by the test suites.
//! * [`uniaxial`]: a strain-driven material point under a uniaxial nominal
//!   stress condition (free lateral contraction), the building block of the
//!   cyclic drivers.
//!
//! Units throughout: MPa, mm, N; strains are dimensionless.

pub mod damage;
pub mod hardening;
pub mod material;
pub mod plasticity;
pub mod tensor;
pub mod uniaxial;
