//! Scenario files: a sectioned key = value configuration selecting the
//! material, the cyclic protocol, and the output layout.
//!
//! Sections are `[material]`, `[protocol]`, `[output]`, plus `[fem]` and
//! `[solver]` where needed; the top-level `mode` key selects the runner.
//! Unknown keys are rejected, every parameter passes through the validating
//! constructors of the material library, and referenced files must exist at
//! load time. Damage is selected by name: `none`, `two_index` (isotropic and
//! unilateral laws with activation), `single`, or one of the four split
//! mappings `split_tensile`, `split_compressive`, `split_deviatoric`,
//! `split_volumetric`.

use std::fs;
use std::path::{Path, PathBuf};

use plastdam::damage::{ActivationParams, SplitVariant, TrilinearLaw};
use plastdam::hardening::{BackstressComponent, ChabocheSet, IsotropicHardening};
use plastdam::material::{DamageModel, ElasticConstants, LegacyMapping, MaterialParams};
use plastdam::plasticity::{Plasticity, SolverConfig};
use serde::Deserialize;

use crate::protocol::CycleProtocol;
use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    mode: String,
    material: MaterialSection,
    protocol: ProtocolSection,
    output: OutputSection,
    fem: Option<FemSection>,
    solver: Option<SolverSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialSection {
    e: f64,
    nu: f64,
    sigma0: f64,
    sigma_inf: Option<f64>,
    a: Option<f64>,
    #[serde(default)]
    backstresses: Vec<[f64; 2]>,
    ell: f64,
    damage: Option<String>,
    iso_law: Option<[f64; 5]>,
    uni_law: Option<[f64; 5]>,
    law: Option<[f64; 5]>,
    alpha: Option<f64>,
    m_tilde: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolSection {
    cycles: usize,
    amplitude: f64,
    ratio: Option<f64>,
    strain_rate: Option<f64>,
    points_per_quarter: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    history: String,
    cycles: String,
    snapshots: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FemSection {
    mesh: String,
    control_nodes: [usize; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    tol: Option<f64>,
    max_iter: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Matpoint,
    Fem,
}

#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub history: String,
    pub cycles: String,
    /// Snapshot file prefix; omitted disables snapshots.
    pub snapshots: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FemScenario {
    pub mesh: PathBuf,
    /// Node pair whose axial separation is the opening-displacement readout.
    pub control_nodes: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub mode: Mode,
    pub material: MaterialParams,
    pub protocol: CycleProtocol,
    pub output: OutputPaths,
    pub fem: Option<FemScenario>,
    pub solver: SolverConfig,
}

/// Command-line adjustments applied after the file loads.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_cycles: Option<usize>,
}

impl Scenario {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.tol {
            self.solver.tol_rel = t;
        }
        if let Some(c) = o.max_cycles {
            self.protocol.cycles = self.protocol.cycles.min(c.max(1));
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Scenario(msg.into())
}

fn law(name: &str, arr: Option<[f64; 5]>) -> Result<TrilinearLaw, CliError> {
    let a = arr.ok_or_else(|| bad(format!("damage model requires the `{name}` array")))?;
    TrilinearLaw::new(a[0], a[1], a[2], a[3], a[4], 1e-8)
        .map_err(|e| bad(format!("invalid `{name}`: {e}")))
}

fn build_damage(m: &MaterialSection) -> Result<DamageModel, CliError> {
    let kind = m.damage.as_deref().unwrap_or("none");
    let legacy = |variant: Option<SplitVariant>| -> Result<DamageModel, CliError> {
        Ok(DamageModel::Legacy {
            law: law("law", m.law)?,
            mapping: match variant {
                None => LegacyMapping::Single,
                Some(v) => LegacyMapping::Split(v),
            },
        })
    };
    let model = match kind {
        "none" => {
            if m.iso_law.is_some() || m.uni_law.is_some() || m.law.is_some() {
                return Err(bad("damage = \"none\" but damage-law arrays are present"));
            }
            DamageModel::None
        }
        "two_index" => {
            let alpha = m.alpha.ok_or_else(|| bad("two_index damage requires `alpha`"))?;
            let m_tilde = m
                .m_tilde
                .ok_or_else(|| bad("two_index damage requires `m_tilde`"))?;
            DamageModel::TwoIndex {
                isotropic: law("iso_law", m.iso_law)?,
                unilateral: law("uni_law", m.uni_law)?,
                activation: ActivationParams::new(alpha, m_tilde)
                    .map_err(|e| bad(format!("invalid activation: {e}")))?,
            }
        }
        "single" => legacy(None)?,
        "split_tensile" => legacy(Some(SplitVariant::Tensile))?,
        "split_compressive" => legacy(Some(SplitVariant::Compressive))?,
        "split_deviatoric" => legacy(Some(SplitVariant::Deviatoric))?,
        "split_volumetric" => legacy(Some(SplitVariant::Volumetric))?,
        other => return Err(bad(format!("unknown damage model `{other}`"))),
    };
    Ok(model)
}

/// Parses scenario text; relative file references resolve against `base_dir`.
pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario, CliError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| bad(e.to_string()))?;

    let mode = match file.mode.as_str() {
        "matpoint" => Mode::Matpoint,
        "fem" => Mode::Fem,
        other => return Err(bad(format!("unknown mode `{other}`"))),
    };

    let m = &file.material;
    let elastic = ElasticConstants::new(m.e, m.nu).map_err(|e| bad(e.to_string()))?;
    let iso = IsotropicHardening::new(m.sigma0, m.sigma_inf.unwrap_or(m.sigma0), m.a.unwrap_or(0.0))
        .map_err(|e| bad(e.to_string()))?;
    let mut components = Vec::with_capacity(m.backstresses.len());
    for &[h, b] in &m.backstresses {
        components.push(BackstressComponent::new(h, b).map_err(|e| bad(e.to_string()))?);
    }
    if !(m.ell >= 0.0) || !m.ell.is_finite() {
        return Err(bad(format!("length scale must be finite and >= 0, got {}", m.ell)));
    }
    let material = MaterialParams {
        plasticity: Plasticity::new(elastic, iso, ChabocheSet::new(components)),
        damage: build_damage(m)?,
        ell: m.ell,
    };

    let p = &file.protocol;
    let protocol = CycleProtocol::new(
        p.amplitude,
        p.ratio.unwrap_or(-1.0),
        p.cycles,
        p.points_per_quarter.unwrap_or(25),
        p.strain_rate.unwrap_or(0.0),
    )?;

    let fem = match (mode, file.fem) {
        (Mode::Fem, Some(f)) => {
            let mesh = base_dir.join(&f.mesh);
            if !mesh.is_file() {
                return Err(bad(format!("mesh file `{}` does not exist", mesh.display())));
            }
            Some(FemScenario {
                mesh,
                control_nodes: f.control_nodes,
            })
        }
        (Mode::Fem, None) => return Err(bad("fem mode requires a [fem] section")),
        (Mode::Matpoint, Some(_)) => {
            return Err(bad("matpoint mode must not carry a [fem] section"))
        }
        (Mode::Matpoint, None) => None,
    };

    let mut solver = SolverConfig::default();
    if let Some(s) = file.solver {
        if let Some(tol) = s.tol {
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(bad(format!("solver tol must be positive, got {tol}")));
            }
            solver.tol_rel = tol;
        }
        if let Some(mi) = s.max_iter {
            if mi == 0 {
                return Err(bad("solver max_iter must be at least 1"));
            }
            solver.max_iter = mi;
        }
    }

    Ok(Scenario {
        mode,
        material,
        protocol,
        output: OutputPaths {
            history: file.output.history,
            cycles: file.output.cycles,
            snapshots: file.output.snapshots,
        },
        fem,
        solver,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base)
}
