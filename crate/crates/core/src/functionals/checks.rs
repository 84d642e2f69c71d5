use serde::Serialize;

use super::entropy::{radial_values_checked, DiscreteEntropy};
use crate::discretization::{assemble_parts, smallest_eigenpair, FormScaling, SymTridiag};
use crate::discretization::operator::ModeOperator;
use crate::error::{invalid, LabError, Result};
use crate::geometry::{ConeModel, OuterBc};
use crate::grid::GridFunction;
use crate::weighted::h1_norm;

/// Relative tolerance on `int u^2 = 1` for log-Sobolev inputs.
pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSobolevReport {
    pub a: f64,
    /// `max_u (int u^2 ln u - a int |grad u|^2)` over the family.
    pub empirical_c: f64,
    pub values: Vec<f64>,
    pub argmax: usize,
}

/// Empirical constant of `int u^2 ln u <= a int |grad u|^2 + C(a)` over a
/// family of radial, nonnegative, unit-`L^2` functions.
pub fn log_sobolev_check(
    model: &ConeModel,
    a: f64,
    family: &[GridFunction],
) -> Result<LogSobolevReport> {
    if !(a >= 0.0) {
        return Err(invalid(format!("a must be nonnegative, got {a}")));
    }
    let first = family.first().ok_or_else(|| invalid("empty test family"))?;
    let sys = DiscreteEntropy::new(model, first.mesh_arc().clone());
    let mut values = Vec::with_capacity(family.len());
    for u in family {
        sys.check_mesh(u)?;
        let v = radial_values_checked(u)?;
        let l2 = sys.l2_squared(v);
        if (l2 - 1.0).abs() > NORMALIZATION_TOL {
            return Err(LabError::NotNormalized {
                actual: l2,
                expected: 1.0,
            });
        }
        values.push(sys.entropy(v) - a * sys.dirichlet_energy(v));
    }
    let mut argmax = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[argmax] {
            argmax = i;
        }
    }
    Ok(LogSobolevReport {
        a,
        empirical_c: values[argmax],
        values,
        argmax,
    })
}

/// Constant entering the lower bound for `W` at parameter `a`.
///
/// Writing `v = (4 pi tau)^{-n/4} u`, the entropy term of `W` is
/// `-2 int v^2 ln v - (n/2) ln(4 pi tau)`, and the log-Sobolev inequality at
/// `a/2` gives `-2 int v^2 ln v >= -a int |grad v|^2 - 2 C(a/2)`.
pub fn chain_constant(model: &ConeModel, a: f64, family: &[GridFunction]) -> Result<f64> {
    Ok(2.0 * log_sobolev_check(model, 0.5 * a, family)?.empirical_c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub w_value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `W(u, tau) >= (4 pi tau)^{-n/2} tau int (R u^2 + (4 - a/tau) |grad u|^2)
/// - (n/2) ln(4 pi tau) - C_a - n` for a radial `u` with `int u^2 = (4 pi tau)^{n/2}`.
///
/// Equality is attained by the maximizer defining `C_a`, so the comparison
/// allows rounding at the level of `1e-12` relative.
pub fn lower_bound_chain_check(
    model: &ConeModel,
    u: &GridFunction,
    tau: f64,
    a: f64,
    c_a: f64,
) -> Result<ChainReport> {
    if !(tau > 0.0) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    let v = radial_values_checked(u)?;
    let sys = DiscreteEntropy::new(model, u.mesh_arc().clone());
    let target = sys.target_mass(tau);
    let l2 = sys.l2_squared(v);
    if (l2 - target).abs() > NORMALIZATION_TOL * target {
        return Err(LabError::NotNormalized {
            actual: l2,
            expected: target,
        });
    }
    let n = model.n() as f64;
    let w_value = sys.w_value(v, tau);
    let potential = sys.parts().potential.quad_form(v);
    let grad = sys.dirichlet_energy(v);
    let bound = tau * (potential + (4.0 - a / tau) * grad) / target
        - 0.5 * n * (4.0 * std::f64::consts::PI * tau).ln()
        - c_a
        - n;
    let slack = 1e-12 * w_value.abs().max(bound.abs()).max(1.0);
    Ok(ChainReport {
        w_value,
        bound,
        holds: w_value >= bound - slack,
    })
}

/// `A = 1 + 1.1 max(0, -min R)` over the mesh nodes.
pub fn default_form_shift(model: &ConeModel, nodes: &[f64]) -> f64 {
    let min_r = nodes
        .iter()
        .map(|&r| model.scalar_curvature_at(r).unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    1.0 + 1.1 * (-min_r).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerProductReport {
    pub a: f64,
    /// `min ||u||_A^2 / ||u||_{H^1}^2` over the family.
    pub c1_hat: f64,
    /// `max ||u||_A^2 / ||u||_{H^1}^2` over the family.
    pub c2_hat: f64,
    /// Smallest generalized eigenvalue of the form matrix, per mode.
    pub form_floor: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Form matrices of `(u, v)_A = int ((R + A) u v + 4 <grad u, grad v>)`, one per mode.
pub fn form_matrices(model: &ConeModel, u: &GridFunction, a: f64) -> Vec<(SymTridiag, SymTridiag)> {
    let eigs = model.cross_section().eigenvalues();
    (0..u.mode_count())
        .map(|j| {
            let parts = assemble_parts(model, u.mesh(), eigs[j]);
            (
                parts.combine(FormScaling::Perelman).add_scaled(&parts.mass, a),
                parts.mass,
            )
        })
        .collect()
}

/// `||u||_A^2`.
pub fn form_norm_squared(model: &ConeModel, u: &GridFunction, a: f64) -> f64 {
    form_matrices(model, u, a)
        .iter()
        .zip(u.modes())
        .map(|((k, _), m)| k.quad_form(m))
        .sum()
}

pub fn inner_product_equivalence_check(
    model: &ConeModel,
    a: f64,
    family: &[GridFunction],
) -> Result<InnerProductReport> {
    let first = family.first().ok_or_else(|| invalid("empty test family"))?;
    let modes = family.iter().map(|u| u.mode_count()).max().unwrap_or(1);
    let probe = GridFunction::new(
        first.mesh_arc().clone(),
        vec![vec![0.0; first.mesh().len()]; modes],
    )?;
    let mut form_floor = Vec::with_capacity(modes);
    for (j, (k, m)) in form_matrices(model, &probe, a).into_iter().enumerate() {
        let op = ModeOperator::from_matrices(j, k, m, OuterBc::Neumann, FormScaling::Perelman);
        let low = smallest_eigenpair(&op, 1e-10)?.value;
        if !(low > 0.0) {
            return Err(LabError::IndefiniteForm(low));
        }
        form_floor.push(low);
    }
    let mut ratios = Vec::with_capacity(family.len());
    for u in family {
        if !u.same_mesh(first) {
            return Err(LabError::MeshMismatch);
        }
        let h1 = h1_norm(u, model)?;
        if h1 == 0.0 {
            continue;
        }
        ratios.push(form_norm_squared(model, u, a) / (h1 * h1));
    }
    if ratios.is_empty() {
        return Err(invalid("test family has no nonzero member"));
    }
    Ok(InnerProductReport {
        a,
        c1_hat: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        c2_hat: ratios.iter().cloned().fold(0.0, f64::max),
        form_floor,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{Grading, RadialMesh};
    use std::sync::Arc;

    #[test]
    fn constant_function_log_sobolev_value() {
        let model = ConeModel::round_cone(4, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, 128, Grading::auto()).unwrap());
        let sys = DiscreteEntropy::new(&model, mesh.clone());
        let vol = sys.l2_squared(&vec![1.0; mesh.len()]);
        let u = GridFunction::from_fn(mesh, |_| vol.powf(-0.5)).unwrap();
        let rep = log_sobolev_check(&model, 0.3, &[u]).unwrap();
        assert!((rep.empirical_c + 0.5 * vol.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        let model = ConeModel::round_cone(4, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, 64, Grading::auto()).unwrap());
        let u = GridFunction::from_fn(mesh, |_| 3.0).unwrap();
        assert!(matches!(
            log_sobolev_check(&model, 0.3, &[u]),
            Err(LabError::NotNormalized { .. })
        ));
    }

    #[test]
    fn indefinite_form_is_reported() {
        let model = ConeModel::round_cone(4, 0.9, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, 64, Grading::auto()).unwrap());
        let u = GridFunction::from_fn(mesh, |r| r).unwrap();
        assert!(matches!(
            inner_product_equivalence_check(&model, -1e3, &[u]),
            Err(LabError::IndefiniteForm(_))
        ));
    }
}
