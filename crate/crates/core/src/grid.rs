use std::sync::Arc;

use crate::discretization::RadialMesh;
use crate::error::{invalid, LabError, Result};

/// Mode-resolved samples `u_j(r_i)` of a function `u = sum_j u_j(r) psi_j`.
///
/// The angular eigenfunctions are normalized by `int_N psi_j^2 = Vol(N)`, so the
/// constant function 1 is `u_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    mesh: Arc<RadialMesh>,
    modes: Vec<Vec<f64>>,
}

impl GridFunction {
    pub fn new(mesh: Arc<RadialMesh>, modes: Vec<Vec<f64>>) -> Result<Self> {
        if modes.is_empty() {
            return Err(invalid("grid function needs at least one mode"));
        }
        for m in &modes {
            if m.len() != mesh.len() {
                return Err(invalid(format!(
                    "mode has {} values but the mesh has {} nodes",
                    m.len(),
                    mesh.len()
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(LabError::NonFinite("grid function values"));
            }
        }
        Ok(Self { mesh, modes })
    }

    pub fn radial(mesh: Arc<RadialMesh>, values: Vec<f64>) -> Result<Self> {
        Self::new(mesh, vec![values])
    }

    pub fn from_fn(mesh: Arc<RadialMesh>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = mesh.nodes().iter().map(|&r| f(r)).collect();
        Self::radial(mesh, values)
    }

    pub fn zeros(mesh: Arc<RadialMesh>) -> Self {
        let len = mesh.len();
        Self {
            mesh,
            modes: vec![vec![0.0; len]],
        }
    }

    /// Radial function from `f = -2 ln u`, i.e. `u = exp(-f/2)`.
    pub fn from_potential(mesh: Arc<RadialMesh>, f: &[f64]) -> Result<Self> {
        Self::radial(mesh, f.iter().map(|v| (-0.5 * v).exp()).collect())
    }

    /// `f = -2 ln u` of the radial part; requires `u > 0`.
    pub fn to_potential(&self) -> Result<Vec<f64>> {
        self.radial_values()
            .iter()
            .map(|&u| {
                if u > 0.0 {
                    Ok(-2.0 * u.ln())
                } else {
                    Err(LabError::NonPositive(format!("u = {u}")))
                }
            })
            .collect()
    }

    pub fn mesh(&self) -> &RadialMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[Vec<f64>] {
        &self.modes
    }

    pub fn mode(&self, j: usize) -> &[f64] {
        &self.modes[j]
    }

    pub fn radial_values(&self) -> &[f64] {
        &self.modes[0]
    }

    pub fn is_radial(&self) -> bool {
        self.modes[1..].iter().all(|m| m.iter().all(|v| *v == 0.0))
    }

    /// Piecewise-linear value of mode `j` at `r`.
    pub fn value_at(&self, j: usize, r: f64) -> f64 {
        let c = self.mesh.locate(r);
        let (a, b) = self.mesh.cell(c);
        let t = (r - a) / (b - a);
        (1.0 - t) * self.modes[j][c] + t * self.modes[j][c + 1]
    }

    pub fn same_mesh(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }

    pub fn scale(&self, s: f64) -> GridFunction {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            mesh: self.mesh.clone(),
            modes: self.modes.iter().map(|m| m.iter().map(|v| f(*v)).collect()).collect(),
        }
    }

    /// Pointwise product of every mode with a radial profile.
    pub fn multiply_radial(&self, profile: &[f64]) -> GridFunction {
        GridFunction {
            mesh: self.mesh.clone(),
            modes: self
                .modes
                .iter()
                .map(|m| m.iter().zip(profile).map(|(a, b)| a * b).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if !self.same_mesh(other) {
            return Err(LabError::MeshMismatch);
        }
        let count = self.mode_count().max(other.mode_count());
        let len = self.mesh.len();
        let zero = vec![0.0; len];
        let modes = (0..count)
            .map(|j| {
                let a = self.modes.get(j).unwrap_or(&zero);
                let b = other.modes.get(j).unwrap_or(&zero);
                a.iter().zip(b).map(|(x, y)| x + y).collect()
            })
            .collect();
        Ok(GridFunction {
            mesh: self.mesh.clone(),
            modes,
        })
    }
}
