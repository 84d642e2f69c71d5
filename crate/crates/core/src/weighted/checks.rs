use serde::Serialize;

use super::norms::{
    field_terms, sobolev_norm, weighted_norm, weighted_terms, DilatedField, GridField, WeightSpec,
};
use super::weight::{smoothstep, Region, Weight};
use crate::discretization::RadialMesh;
use crate::error::{invalid, LabError, Result};
use crate::geometry::ConeModel;
use crate::grid::GridFunction;

/// Relative tolerance on the Hardy comparison.
pub const HARDY_TOL: f64 = 1e-8;

/// Fixed cutoff in the normalized log-radius `t = ln(r/r_1) / ln(L/r_1)`:
/// zero on the innermost and outermost 5%, one on `[0.25, 0.75]`.
pub fn cutoff(mesh: &RadialMesh) -> Vec<f64> {
    (0..mesh.len())
        .map(|i| cutoff_profile(mesh.log_position(i)))
        .collect()
}

pub fn cutoff_profile(t: f64) -> f64 {
    if t <= 0.05 || t >= 0.95 {
        0.0
    } else if t < 0.25 {
        smoothstep((t - 0.05) / 0.2)
    } else if t > 0.75 {
        smoothstep((0.95 - t) / 0.2)
    } else {
        1.0
    }
}

/// `(p / |n - pk|)^p`.
pub fn hardy_constant(n: usize, p: f64, k: usize) -> Result<f64> {
    let gap = n as f64 - p * k as f64;
    if gap.abs() < 1e-12 {
        return Err(LabError::DegenerateHardyIndex(n));
    }
    Ok((p / gap.abs()).powf(p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport {
    /// `int |u|^p / r^{pk}`.
    pub lhs: f64,
    /// `constant * int |grad u|^p / r^{p(k-1)}`.
    pub rhs: f64,
    pub constant: f64,
    /// `lhs / rhs`, at most 1 when the inequality holds.
    pub ratio: f64,
    pub satisfied: bool,
}

pub fn hardy_check(u: &GridFunction, model: &ConeModel, p: f64, k: usize) -> Result<HardyReport> {
    if !model.is_exact() {
        return Err(LabError::RequiresExactCone);
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid(format!("Hardy check needs p > 1, got {p}")));
    }
    if k == 0 {
        return Err(invalid("Hardy check needs k >= 1"));
    }
    let constant = hardy_constant(model.n(), p, k)?;
    let last = u.mesh().len() - 1;
    if u.modes().iter().any(|m| m[0] != 0.0 || m[last] != 0.0) {
        return Err(LabError::NotCompactlySupported);
    }
    let spec = WeightSpec::new(1, p, k as f64 - model.n() as f64 / p)?;
    let terms = weighted_terms(u, spec, model, Weight::Cone, Region::Full)?;
    let lhs = terms[0];
    let rhs = constant * terms[1];
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(HardyReport {
        lhs,
        rhs,
        constant,
        ratio,
        satisfied: lhs <= rhs * (1.0 + HARDY_TOL),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `||u||_{W^{k,p}}`.
    pub plain: f64,
    /// `||u||_{W^{k,p}_{k-n/p}}`.
    pub weighted: f64,
    pub lower_ok: bool,
    /// `weighted / plain`, 0 for the zero function.
    pub ratio: f64,
}

pub fn norm_equivalence_check(
    u: &GridFunction,
    model: &ConeModel,
    k: usize,
    p: f64,
) -> Result<EquivalenceReport> {
    if !(p > 1.0) {
        return Err(invalid(format!("norm equivalence needs p > 1, got {p}")));
    }
    if k > 2 {
        return Err(LabError::UnsupportedOrder(k));
    }
    let n = model.n() as f64;
    for i in 1..=k {
        if (p * i as f64 - n).abs() < 1e-12 {
            return Err(LabError::ExcludedIndex(i));
        }
    }
    let plain = sobolev_norm(u, model, k, p)?;
    let weighted = weighted_norm(u, WeightSpec::new(k, p, k as f64 - n / p)?, model)?;
    Ok(EquivalenceReport {
        plain,
        weighted,
        lower_ok: plain <= weighted,
        ratio: if plain > 0.0 { weighted / plain } else { 0.0 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    /// Norm in the target space.
    pub lhs: f64,
    /// Norm in the source space.
    pub rhs: f64,
    /// `lhs / rhs`, 0 for the zero function.
    pub ratio: f64,
}

/// Largest admissible target exponent `q_l` with `1/q_l = 1/p - (k - l)/n`;
/// infinite when the right side is not positive.
pub fn sobolev_exponent(n: usize, from: WeightSpec, to_k: usize) -> f64 {
    let inv = 1.0 / from.p - (from.k as f64 - to_k as f64) / n as f64;
    if inv > 0.0 {
        1.0 / inv
    } else {
        f64::INFINITY
    }
}

pub fn embedding_check(
    u: &GridFunction,
    model: &ConeModel,
    from: WeightSpec,
    to: WeightSpec,
) -> Result<EmbeddingReport> {
    from.validate()?;
    to.validate()?;
    if from.k <= to.k {
        return Err(LabError::SobolevRange(format!(
            "source order {} must exceed target order {}",
            from.k, to.k
        )));
    }
    let q_max = sobolev_exponent(model.n(), from, to.k);
    if to.p > q_max * (1.0 + 1e-12) {
        return Err(LabError::SobolevRange(format!(
            "target exponent {} exceeds {q_max}",
            to.p
        )));
    }
    if from.delta != to.delta {
        return Err(LabError::SobolevRange(format!(
            "weight indices differ: {} vs {}",
            from.delta, to.delta
        )));
    }
    let lhs = weighted_norm(u, to, model)?;
    let rhs = weighted_norm(u, from, model)?;
    Ok(EmbeddingReport {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    /// `||u||` on `C_{a r1, a r2}`.
    pub lhs: f64,
    /// `a^{-delta} ||u_a||` on `C_{r1, r2}` with `u_a(r) = u(a r)`.
    pub rhs: f64,
    pub rel_err: f64,
}

pub fn scaling_homogeneity_check(
    u: &GridFunction,
    model: &ConeModel,
    spec: WeightSpec,
    a: f64,
    r1: f64,
    r2: f64,
) -> Result<ScalingReport> {
    if !model.is_exact() {
        return Err(LabError::RequiresExactCone);
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid(format!("dilation must be positive, got {a}")));
    }
    let (lo, hi) = (u.mesh().tip(), u.mesh().outer());
    let slack = 1e-12;
    for (x, y) in [(a * r1, a * r2), (r1, r2)] {
        if !(x > 0.0 && y > x) || x < lo * (1.0 - slack) || y > hi * (1.0 + slack) {
            return Err(LabError::AnnulusOutsideMesh {
                lo: x,
                hi: y,
                min: lo,
                max: hi,
            });
        }
    }
    let field = GridField::new(u, model)?;
    let lhs_terms = field_terms(&field, spec, model, Weight::Cone, a * r1, a * r2)?;
    let dilated = DilatedField { inner: &field, a };
    let rhs_terms = field_terms(&dilated, spec, model, Weight::Cone, r1, r2)?;
    let lhs = lhs_terms.iter().sum::<f64>().powf(1.0 / spec.p);
    let rhs = a.powf(-spec.delta) * rhs_terms.iter().sum::<f64>().powf(1.0 / spec.p);
    let rel_err = if lhs == rhs {
        0.0
    } else {
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
    };
    Ok(ScalingReport { lhs, rhs, rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Grading;
    use crate::geometry::OuterBc;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn hardy_constants() {
        assert_eq!(hardy_constant(3, 2.0, 1).unwrap(), 4.0);
        assert_eq!(hardy_constant(4, 2.0, 1).unwrap(), 1.0);
        assert!(hardy_constant(4, 2.0, 2).is_err());
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff_profile(0.0), 0.0);
        assert_eq!(cutoff_profile(0.5), 1.0);
        assert_eq!(cutoff_profile(1.0), 0.0);
        assert!(cutoff_profile(0.15) > 0.0 && cutoff_profile(0.15) < 1.0);
    }

    #[test]
    fn hardy_rejects_unsupported_inputs() {
        let model = ConeModel::round_cone(3, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, 64, Grading::auto()).unwrap());
        let one = GridFunction::from_fn(mesh, |_| 1.0).unwrap();
        assert_eq!(
            hardy_check(&one, &model, 2.0, 1).unwrap_err(),
            LabError::NotCompactlySupported
        );
    }

    #[test]
    fn scaling_of_constant() {
        let model = ConeModel::round_cone(3, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, 256, Grading::auto()).unwrap());
        let one = GridFunction::from_fn(mesh, |_| 1.0).unwrap();
        let spec = WeightSpec::new(0, 2.0, 0.0).unwrap();
        let rep = scaling_homogeneity_check(&one, &model, spec, 0.5, 0.5, 1.0).unwrap();
        let exact = (4.0 * PI * 2f64.ln()).sqrt();
        assert!((rep.lhs - exact).abs() < 1e-13 * exact);
        assert!(rep.rel_err < 1e-13);
        let same = scaling_homogeneity_check(&one, &model, spec, 1.0, 0.3, 0.9).unwrap();
        assert_eq!(same.lhs, same.rhs);
    }

    #[test]
    fn embedding_range_checks() {
        let model = ConeModel::round_cone(4, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, 64, Grading::auto()).unwrap());
        let z = GridFunction::zeros(mesh);
        let from = WeightSpec::new(1, 2.0, -1.0).unwrap();
        assert_eq!(sobolev_exponent(4, from, 0), 4.0);
        let ok = WeightSpec::new(0, 4.0, -1.0).unwrap();
        assert_eq!(embedding_check(&z, &model, from, ok).unwrap().ratio, 0.0);
        let bad = WeightSpec::new(0, 4.5, -1.0).unwrap();
        assert!(embedding_check(&z, &model, from, bad).is_err());
    }
}
