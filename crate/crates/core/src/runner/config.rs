use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discretization::{Grading, RadialMesh};
use crate::error::{LabError, Result};
use crate::functionals::MuSolverParams;
use crate::geometry::{ConeModel, CrossSection, OuterBc, Warp, DEFAULT_MODE_COUNT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CrossSectionConfig {
    RoundSphere {
        a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes: Option<usize>,
    },
    Spectrum {
        #[serde(rename = "R_h0")]
        r_h0: f64,
        volume: f64,
        eigenvalues: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub points: usize,
    pub grading: Grading,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    One(f64),
    Many(Vec<f64>),
}

impl TauSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            TauSpec::One(t) => vec![*t],
            TauSpec::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub step0: f64,
    /// Backward-error target of the eigen solver.
    pub eigen_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let mu = MuSolverParams::default();
        Self {
            max_iters: mu.max_iters,
            tol: mu.tol,
            step0: mu.step0,
            eigen_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn mu_params(&self) -> MuSolverParams {
        MuSolverParams {
            max_iters: self.max_iters,
            tol: self.tol,
            step0: self.step0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub cross_section: CrossSectionConfig,
    pub warp: Warp,
    pub outer_radius: f64,
    pub outer_bc: OuterBc,
    pub mesh: MeshConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Not part of the echo or the hash, so reports do not depend on where they are written.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
}

fn default_seed() -> u64 {
    crate::families::DEFAULT_SEED
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("conelab-out")
}

fn config_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(config_err(format!(
                "n = {} is not supported: the cone theory requires dimension n >= 3",
                self.n
            )));
        }
        if !(self.outer_radius > 0.0) || !self.outer_radius.is_finite() {
            return Err(config_err(format!("outer_radius must be positive, got {}", self.outer_radius)));
        }
        if self.mesh.points < 2 {
            return Err(config_err(format!("mesh.points must be at least 2, got {}", self.mesh.points)));
        }
        if let Grading::Fixed(q) = self.mesh.grading {
            if !(q > 0.0 && q < 1.0) {
                return Err(config_err(format!("mesh.grading must lie in (0, 1), got {q}")));
            }
        }
        if let Some(tau) = &self.tau {
            let values = tau.values();
            if values.is_empty() {
                return Err(config_err("tau list is empty"));
            }
            if let Some(t) = values.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
                return Err(config_err(format!("tau must be positive, got {t}")));
            }
        }
        self.solver.mu_params().validate().map_err(|e| config_err(e.to_string()))?;
        if !(self.solver.eigen_tol > 0.0) {
            return Err(config_err("solver.eigen_tol must be positive"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.a.is_none() && sweep.points.is_none() {
                return Err(config_err("sweep needs a or points"));
            }
            if let Some(a) = &sweep.a {
                if a.is_empty() {
                    return Err(config_err("sweep.a is empty"));
                }
                if !matches!(self.cross_section, CrossSectionConfig::RoundSphere { .. }) {
                    return Err(config_err("sweep.a needs a round_sphere cross section"));
                }
            }
            if let Some(p) = &sweep.points {
                if p.is_empty() {
                    return Err(config_err("sweep.points is empty"));
                }
                if let Some(bad) = p.iter().find(|m| **m < 2) {
                    return Err(config_err(format!("sweep.points entries must be at least 2, got {bad}")));
                }
            }
        }
        self.model().map(|_| ())
    }

    /// Lowercase hex SHA-256 of the canonical JSON form of the config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn sphere_radius(&self) -> Option<f64> {
        match self.cross_section {
            CrossSectionConfig::RoundSphere { a, .. } => Some(a),
            CrossSectionConfig::Spectrum { .. } => None,
        }
    }

    pub fn model(&self) -> Result<ConeModel> {
        self.model_with(self.sphere_radius())
    }

    /// The configured model, with the sphere radius replaced by `a` when given.
    pub fn model_with(&self, a: Option<f64>) -> Result<ConeModel> {
        let cs = match &self.cross_section {
            CrossSectionConfig::RoundSphere { modes, .. } => CrossSection::round_sphere(
                self.n,
                a.expect("round sphere has a radius"),
                modes.unwrap_or(DEFAULT_MODE_COUNT),
            )?,
            CrossSectionConfig::Spectrum {
                r_h0,
                volume,
                eigenvalues,
            } => CrossSection::from_spectrum(self.n, *r_h0, *volume, eigenvalues.clone())?,
        };
        ConeModel::new(cs, self.outer_radius, self.warp, self.outer_bc)
    }

    pub fn mesh_with(&self, points: usize) -> Result<RadialMesh> {
        RadialMesh::with_grading(self.outer_radius, points, self.mesh.grading)
    }

    pub fn taus(&self) -> Result<Vec<f64>> {
        self.tau
            .as_ref()
            .map(|t| t.values())
            .ok_or_else(|| config_err("tau is required for this command"))
    }
}
