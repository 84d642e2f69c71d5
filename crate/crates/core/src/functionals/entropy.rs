use std::f64::consts::PI;
use std::sync::Arc;

use crate::discretization::operator::{assemble_parts, FormParts, FormScaling};
use crate::discretization::quadrature::for_each_point;
use crate::discretization::{RadialMesh, SymTridiag};
use crate::error::{invalid, LabError, Result};
use crate::geometry::{ConeModel, OuterBc};
use crate::grid::GridFunction;

/// Radial discretization of `F` and `W` on one model and mesh.
///
/// `int u^2 ln u` is integrated exactly cell by cell on the piecewise-linear
/// interpolant, so it shares the consistent mass with the normalization.
#[derive(Debug, Clone)]
pub struct DiscreteEntropy {
    n: usize,
    mesh: Arc<RadialMesh>,
    parts: FormParts,
    perelman: SymTridiag,
    outer_bc: OuterBc,
    /// Per quadrature point: cell index, shape values and `w phi^{n-1} Vol`.
    points: Vec<(usize, f64, f64, f64)>,
}

impl DiscreteEntropy {
    pub fn new(model: &ConeModel, mesh: Arc<RadialMesh>) -> Self {
        let parts = assemble_parts(model, &mesh, 0.0);
        let perelman = parts.combine(FormScaling::Perelman);
        let n = model.n();
        let vol = model.cross_section().volume();
        let mut points = Vec::with_capacity(mesh.cell_count() * 16);
        for c in 0..mesh.cell_count() {
            let (a, b) = mesh.cell(c);
            let h = b - a;
            for_each_point(a, b, |r, w| {
                let dv = w * vol * model.warp_factor(r).powi(n as i32 - 1);
                points.push((c, (b - r) / h, (r - a) / h, dv));
            });
        }
        Self {
            n,
            mesh,
            parts,
            perelman,
            outer_bc: model.outer_bc(),
            points,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mesh(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    pub fn parts(&self) -> &FormParts {
        &self.parts
    }

    /// `4 G + P`.
    pub fn perelman(&self) -> &SymTridiag {
        &self.perelman
    }

    pub fn mass(&self) -> &SymTridiag {
        &self.parts.mass
    }

    pub fn outer_bc(&self) -> OuterBc {
        self.outer_bc
    }

    /// Number of free nodal values (the outer node is fixed at 0 under Dirichlet).
    pub fn dofs(&self) -> usize {
        match self.outer_bc {
            OuterBc::Neumann => self.mesh.len(),
            OuterBc::Dirichlet => self.mesh.len() - 1,
        }
    }

    pub fn extend(&self, free: &[f64]) -> Vec<f64> {
        let mut v = free.to_vec();
        v.resize(self.mesh.len(), 0.0);
        v
    }

    /// `int u^2 dvol` with the consistent mass.
    pub fn l2_squared(&self, u: &[f64]) -> f64 {
        self.parts.mass.quad_form(u)
    }

    /// `int (4 |grad u|^2 + R u^2) dvol`.
    pub fn f_value(&self, u: &[f64]) -> f64 {
        self.parts.form(FormScaling::Perelman, u)
    }

    /// `int |grad u|^2 dvol`.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        self.parts.gradient_form(u)
    }

    /// `int u^2 ln u dvol`, with `u^2 ln u` extended by 0 at `u = 0`.
    pub fn entropy(&self, u: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(c, s0, s1, dv) in &self.points {
            let v = s0 * u[c] + s1 * u[c + 1];
            if v > 0.0 {
                acc += dv * v * v * v.ln();
            }
        }
        acc
    }

    /// Nodal gradient of [`entropy`](Self::entropy): `int (2 u ln u + u) N_i dvol`.
    pub fn entropy_gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; u.len()];
        for &(c, s0, s1, dv) in &self.points {
            let v = s0 * u[c] + s1 * u[c + 1];
            if v > 0.0 {
                let d = dv * (2.0 * v * v.ln() + v);
                g[c] += d * s0;
                g[c + 1] += d * s1;
            }
        }
        g
    }

    /// `entropy(u + d) - entropy(u)` without cancellation between the two totals.
    pub fn entropy_difference(&self, u: &[f64], d: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(c, s0, s1, dv) in &self.points {
            let v = s0 * u[c] + s1 * u[c + 1];
            let dw = s0 * d[c] + s1 * d[c + 1];
            let w = v + dw;
            let fv = if v > 0.0 { v * v * v.ln() } else { 0.0 };
            let delta = if v > 0.0 && w > 0.0 {
                // (w^2 - v^2) ln v + w^2 ln(w / v)
                dw * (v + w) * v.ln() + w * w * (dw / v).ln_1p()
            } else if w > 0.0 {
                w * w * w.ln() - fv
            } else {
                -fv
            };
            acc += dv * delta;
        }
        acc
    }

    /// Change of `W` between the normalizations of `u` and `u + d`.
    ///
    /// With `q = int u^2` the normalized value is
    /// `(tau F(u) - 2 int u^2 ln u) / q + ln(q / target) - n`, which is invariant under
    /// scaling, so the difference carries no rounding from a separate normalization.
    pub fn normalized_w_difference(&self, u: &[f64], d: &[f64], tau: f64) -> f64 {
        let su = self.parts.apply(FormScaling::Perelman, u);
        let sd = self.parts.apply(FormScaling::Perelman, d);
        let mu = self.parts.mass.matvec(u);
        let md = self.parts.mass.matvec(d);
        let df: f64 = (0..u.len()).map(|i| d[i] * (2.0 * su[i] + sd[i])).sum();
        let dq: f64 = (0..u.len()).map(|i| d[i] * (2.0 * mu[i] + md[i])).sum();
        let q = self.l2_squared(u);
        let q1 = q + dq;
        let a = tau * self.f_value(u) - 2.0 * self.entropy(u);
        let da = tau * df - 2.0 * self.entropy_difference(u, d);
        da / q1 - a * dq / (q * q1) + (dq / q).ln_1p()
    }

    /// `(4 pi tau)^{n/2}`, the normalization target of `int u^2`.
    pub fn target_mass(&self, tau: f64) -> f64 {
        (4.0 * PI * tau).powf(self.n as f64 / 2.0)
    }

    /// `W(u, tau) = (4 pi tau)^{-n/2} [tau F(u) - 2 int u^2 ln u - n int u^2]`.
    pub fn w_value(&self, u: &[f64], tau: f64) -> f64 {
        let scale = 1.0 / self.target_mass(tau);
        scale
            * (tau * self.f_value(u) - 2.0 * self.entropy(u) - self.n as f64 * self.l2_squared(u))
    }

    /// Nodal gradient of [`w_value`](Self::w_value).
    pub fn w_gradient(&self, u: &[f64], tau: f64) -> Vec<f64> {
        let scale = 1.0 / self.target_mass(tau);
        let su = self.parts.apply(FormScaling::Perelman, u);
        let mu = self.parts.mass.matvec(u);
        let eg = self.entropy_gradient(u);
        let n = self.n as f64;
        su.iter()
            .zip(&mu)
            .zip(&eg)
            .map(|((s, m), e)| scale * (2.0 * tau * s - 2.0 * e - 2.0 * n * m))
            .collect()
    }

    pub fn check_mesh(&self, u: &GridFunction) -> Result<()> {
        if *u.mesh() != *self.mesh {
            return Err(LabError::MeshMismatch);
        }
        Ok(())
    }
}

fn radial_nonnegative(u: &GridFunction) -> Result<&[f64]> {
    if !u.is_radial() {
        return Err(LabError::NonRadial);
    }
    let v = u.radial_values();
    if let Some(bad) = v.iter().find(|x| **x < 0.0) {
        return Err(LabError::NonPositive(format!("negative entry {bad}")));
    }
    Ok(v)
}

/// `F(u) = int (4 |grad u|^2 + R u^2) dvol`, summed over the modes of `u`.
pub fn f_functional(model: &ConeModel, u: &GridFunction) -> Result<f64> {
    let eigs = model.cross_section().eigenvalues();
    if u.mode_count() > eigs.len() {
        return Err(invalid(format!(
            "grid function has {} modes, cross section only {}",
            u.mode_count(),
            eigs.len()
        )));
    }
    let mut total = 0.0;
    for (j, m) in u.modes().iter().enumerate() {
        if m.iter().all(|v| *v == 0.0) {
            continue;
        }
        let parts = assemble_parts(model, u.mesh(), eigs[j]);
        total += parts.form(FormScaling::Perelman, m);
    }
    Ok(total)
}

/// Perelman's `W(g, u, tau)` for a radial `u >= 0`.
pub fn w_functional(model: &ConeModel, u: &GridFunction, tau: f64) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    let v = radial_nonnegative(u)?;
    let sys = DiscreteEntropy::new(model, u.mesh_arc().clone());
    Ok(sys.w_value(v, tau))
}

pub(crate) fn radial_values_checked(u: &GridFunction) -> Result<&[f64]> {
    radial_nonnegative(u)
}
