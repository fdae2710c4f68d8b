//! Scenario-driven command line runner.
//!
//! A scenario is a sectioned key = value file selecting a material, a cyclic
//! load protocol, and output paths. The [`matpoint`] runner drives a single
//! uniaxial-stress material point through the strain protocol; the [`femrun`]
//! runner drives a hexahedral mesh through a displacement protocol and
//! records the force against a control-pair opening displacement. Both emit
//! deterministic CSV tables with full `f64` round-trip precision.

pub mod femrun;
pub mod matpoint;
pub mod protocol;
pub mod scenario;
pub mod sweep;
pub mod table;

use std::path::PathBuf;

use plastdam::uniaxial::PointError;
use plastdam_fem::FemError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("refusing to write empty table to {0}")]
    EmptyTable(PathBuf),
    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("material step failed at cycle {cycle}, step {step}: {source}")]
    MatpointStep {
        cycle: usize,
        step: usize,
        #[source]
        source: PointError,
    },
    #[error("FE step failed at cycle {cycle}, step {step}: {source}")]
    FemStep {
        cycle: usize,
        step: usize,
        #[source]
        source: FemError,
    },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("CSV parse error: {0}")]
    Csv(String),
}
