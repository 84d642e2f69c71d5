use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::entropy::{radial_values_checked, DiscreteEntropy};
use super::solve::{SolveKind, SolveReport, SolveStatus};
use crate::discretization::banded::dot;
use crate::discretization::operator::operator_from_parts;
use crate::discretization::{smallest_eigenpair, FormScaling, RadialMesh, SymTridiag};
use crate::error::{invalid, LabError, Result};
use crate::geometry::ConeModel;
use crate::grid::GridFunction;

/// Below this value of `W` the descent is reported as diverging.
pub const DIVERGENCE_FLOOR: f64 = -1e10;
/// Relative positivity floor kept by the line search.
pub const POSITIVITY_FLOOR: f64 = 1e-30;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuSolverParams {
    pub max_iters: usize,
    /// Converged when the Euler–Lagrange residual is below `tol * max(1, |W|)`.
    pub tol: f64,
    /// First trial step of the line search.
    pub step0: f64,
}

impl Default for MuSolverParams {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 1e-8,
            step0: 1.0,
        }
    }
}

impl MuSolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.step0 > 0.0) {
            return Err(invalid(format!("step0 must be positive, got {}", self.step0)));
        }
        Ok(())
    }
}

/// Euler–Lagrange residuals at a radial `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElResidual {
    /// `||g - theta M u||_{M^{-1}} ||u||_M` for the discrete gradient `g` of `W`
    /// and the multiplier `theta = u.g / u.Mu`; the first-order change of `W`
    /// under a unit relative perturbation tangent to the constraint.
    pub discrete: f64,
    /// `||r||_{M^{-1}} / ||u||_M` for the weak residual `r` of
    /// `-Delta u + R u / 4 - (2/tau) u ln u - (n/tau) u - (m/tau) u`.
    pub printed: f64,
    /// Same as `printed` for the first variation of `W` divided by `8 tau`:
    /// `u ln u` carries `1/(2 tau)` and the multiplier comes from the discrete gradient.
    pub consistent: f64,
}

fn dual_norm(mass: &SymTridiag, r: &[f64]) -> f64 {
    match mass.solve(r) {
        Some(z) => dot(r, &z).max(0.0).sqrt(),
        None => f64::INFINITY,
    }
}

/// Tangential gradient residual on the free values.
fn discrete_residual(mass: &SymTridiag, x: &[f64], g: &[f64]) -> (f64, f64) {
    let mx = mass.matvec(x);
    let xmx = dot(x, &mx);
    let theta = dot(x, g) / xmx;
    let r: Vec<f64> = g.iter().zip(&mx).map(|(a, b)| a - theta * b).collect();
    (dual_norm(mass, &r) * xmx.sqrt(), theta)
}

/// Residuals of the constrained stationarity condition at `u`; `m` enters only
/// the printed-equation diagnostic.
pub fn el_residual(model: &ConeModel, u: &GridFunction, tau: f64, m: f64) -> Result<ElResidual> {
    if !(tau > 0.0) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    let v = radial_values_checked(u)?;
    if v[..v.len() - 1].iter().any(|x| !(*x > 0.0)) {
        return Err(LabError::NonPositive("u must be positive".into()));
    }
    let sys = DiscreteEntropy::new(model, u.mesh_arc().clone());
    Ok(residuals(&sys, v, tau, m))
}

fn residuals(sys: &DiscreteEntropy, u: &[f64], tau: f64, m: f64) -> ElResidual {
    let d = sys.dofs();
    let mass = sys.mass().leading(d);
    let g = sys.w_gradient(u, tau);
    let x = &u[..d];
    let (discrete, theta) = discrete_residual(&mass, x, &g[..d]);
    let n = sys.n() as f64;
    let lu = sys.parts().apply(FormScaling::SchrodingerL, u);
    let mu = sys.mass().matvec(u);
    let eg = sys.entropy_gradient(u);
    // eg = int (2 u ln u + u) N_i, so int u ln u N_i = (eg - Mu) / 2
    let uln: Vec<f64> = eg.iter().zip(&mu).map(|(e, m)| 0.5 * (e - m)).collect();
    let norm_u = dot(x, &mass.matvec(x)).sqrt();
    let printed_r: Vec<f64> = (0..d)
        .map(|i| lu[i] - 2.0 / tau * uln[i] - (n + m) / tau * mu[i])
        .collect();
    // theta M u = g = c [2 tau S u - 2 eg - 2 n M u], S = 4 L
    let c = 1.0 / sys.target_mass(tau);
    let shift = theta / (8.0 * tau * c);
    let consistent_r: Vec<f64> = (0..d)
        .map(|i| lu[i] - uln[i] / (2.0 * tau) - (1.0 + n) / (4.0 * tau) * mu[i] - shift * mu[i])
        .collect();
    ElResidual {
        discrete,
        printed: dual_norm(&mass, &printed_r) / norm_u,
        consistent: dual_norm(&mass, &consistent_r) / norm_u,
    }
}

fn normalize(mass: &SymTridiag, x: &mut [f64], target: f64) -> f64 {
    let s = (target / mass.quad_form(x)).sqrt();
    x.iter_mut().for_each(|v| *v *= s);
    (mass.quad_form(x) - target).abs() / target
}

/// Builds the preconditioner `c [2 tau S + diag(m max(0, -4 ln u - 6)) + kappa M]`.
fn preconditioner(
    stiff: &SymTridiag,
    mass: &SymTridiag,
    lumped: &[f64],
    x: &[f64],
    tau: f64,
    kappa: f64,
) -> SymTridiag {
    let mut p = stiff.scaled(2.0 * tau).add_scaled(mass, kappa);
    for (i, d) in p.diag.iter_mut().enumerate() {
        if x[i] > 0.0 {
            *d += lumped[i] * (-4.0 * x[i].ln() - 6.0).max(0.0);
        }
    }
    p
}

/// `mu(g, tau)` over the radial subspace by preconditioned projected gradient
/// descent with Armijo backtracking, started from the normalized constant.
pub fn mu_functional(
    model: &ConeModel,
    mesh: Arc<RadialMesh>,
    tau: f64,
    params: &MuSolverParams,
) -> Result<SolveReport> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    params.validate()?;
    let sys = DiscreteEntropy::new(model, mesh.clone());
    let d = sys.dofs();
    let stiff = sys.perelman().leading(d);
    let mass = sys.mass().leading(d);
    let lumped = mass.row_sums();
    let target = sys.target_mass(tau);
    let c = 1.0 / target;

    let op = operator_from_parts(sys.parts(), model.outer_bc(), 0, 0.0, FormScaling::Perelman);
    let lambda0 = smallest_eigenpair(&op, 1e-10)?.value;
    let n = model.n() as f64;
    let kappa = 2.0 * tau * 1.1 * (-lambda0).max(0.0) + 2.0 * n + 6.0;

    let mut x = vec![1.0; d];
    let mut constraint_error = normalize(&mass, &mut x, target);
    let grad = |x: &[f64]| {
        let mut g = sys.w_gradient(&sys.extend(x), tau);
        g.truncate(d);
        g
    };

    let mut w = sys.w_value(&sys.extend(&x), tau);
    let mut trace = vec![w];
    let mut status = None;
    let mut el = f64::INFINITY;
    let mut iterations = 0;
    while iterations <= params.max_iters {
        if w < DIVERGENCE_FLOOR {
            status = Some(SolveStatus::Diverging);
            break;
        }
        let g = grad(&x);
        let (res, theta) = discrete_residual(&mass, &x, &g);
        el = res;
        if el <= params.tol * w.abs().max(1.0) {
            status = Some(SolveStatus::Converged);
            break;
        }
        if iterations == params.max_iters {
            break;
        }
        iterations += 1;

        let pre = preconditioner(&stiff, &mass, &lumped, &x, tau, kappa).scaled(c);
        let mx = mass.matvec(&x);
        let r: Vec<f64> = g.iter().zip(&mx).map(|(a, b)| a - theta * b).collect();
        let (dtilde, z) = match (pre.solve(&r), pre.solve(&mx)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(LabError::IndefiniteForm(lambda0)),
        };
        let beta = dot(&mx, &dtilde) / dot(&mx, &z);
        let dir: Vec<f64> = dtilde.iter().zip(&z).map(|(a, b)| -(a - beta * b)).collect();
        let slope = dot(&r, &dir);
        if !(slope < 0.0) {
            break;
        }
        let mut step = params.step0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            let top = trial.iter().fold(0.0f64, |m, v| m.max(*v));
            if top > 0.0 {
                let floor = POSITIVITY_FLOOR * top;
                trial.iter_mut().for_each(|v| *v = v.max(floor));
                let delta: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
                let dw = sys.normalized_w_difference(&sys.extend(&x), &sys.extend(&delta), tau);
                if dw.is_finite() && dw <= ARMIJO * step * slope {
                    let err = normalize(&mass, &mut trial, target);
                    constraint_error = constraint_error.max(err);
                    x = trial;
                    w += dw;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        trace.push(w);
        if !accepted {
            break;
        }
    }
    let status = match status {
        Some(s) => s,
        None => {
            return Err(LabError::DescentNonConvergence {
                iterations,
                last_residual: el,
                trace,
            })
        }
    };
    let full = sys.extend(&x);
    let w = sys.w_value(&full, tau);
    let printed = residuals(&sys, &full, tau, w).printed;
    Ok(SolveReport {
        kind: SolveKind::Mu,
        status,
        value: w,
        tau: Some(tau),
        mode: 0,
        minimizer: GridFunction::radial(mesh, full)?,
        el_residual: el,
        printed_el_residual: Some(printed),
        constraint_error,
        iterations,
        trace,
        tolerance: params.tol,
        supercritical: !model.is_subcritical(),
        mode_values: Vec::new(),
    })
}
