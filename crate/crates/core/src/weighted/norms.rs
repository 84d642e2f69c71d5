use serde::{Deserialize, Serialize};

use super::weight::{Region, Weight, WeightFunction};
use crate::discretization::quadrature::for_each_point;
use crate::error::{invalid, LabError, Result};
use crate::geometry::ConeModel;
use crate::grid::GridFunction;

/// Selects the norm `W^{k,p}_delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub k: usize,
    pub p: f64,
    pub delta: f64,
}

impl WeightSpec {
    pub fn new(k: usize, p: f64, delta: f64) -> Result<Self> {
        let spec = Self { k, p, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(invalid(format!("p must be at least 1, got {}", self.p)));
        }
        if !self.delta.is_finite() {
            return Err(LabError::NonFinite("weight index"));
        }
        if self.k > 2 {
            return Err(LabError::UnsupportedOrder(self.k));
        }
        Ok(())
    }

    /// `H^k = W^{k,2}_{k - n/2}`.
    pub fn sobolev_h(k: usize, n: usize) -> Self {
        Self {
            k,
            p: 2.0,
            delta: k as f64 - n as f64 / 2.0,
        }
    }
}

/// Something with pointwise derivative magnitudes `|grad^i u|(r)`, averaged in
/// mean square over the cross section.
pub trait Field {
    fn magnitude(&self, order: usize, r: f64) -> f64;
    /// Radii where the magnitudes may fail to be smooth.
    fn breakpoints(&self) -> Vec<f64>;
}

/// A grid function read through the mode decomposition of a cone model.
pub struct GridField<'a> {
    u: &'a GridFunction,
    model: &'a ConeModel,
    nus: Vec<f64>,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl<'a> GridField<'a> {
    pub fn new(u: &'a GridFunction, model: &'a ConeModel) -> Result<Self> {
        let eigs = model.cross_section().eigenvalues();
        if u.mode_count() > eigs.len() {
            return Err(invalid(format!(
                "grid function has {} modes, cross section only {}",
                u.mode_count(),
                eigs.len()
            )));
        }
        if u.mesh().outer() > model.outer_radius() * (1.0 + 1e-12) {
            return Err(LabError::MeshMismatch);
        }
        let nodes = u.mesh().nodes();
        let (first, second) = u.modes().iter().map(|m| nodal_derivatives(nodes, m)).unzip();
        Ok(Self {
            u,
            model,
            nus: eigs[..u.mode_count()].to_vec(),
            first,
            second,
        })
    }

    fn interp(&self, data: &[f64], c: usize, t: f64) -> f64 {
        (1.0 - t) * data[c] + t * data[c + 1]
    }
}

impl Field for GridField<'_> {
    fn magnitude(&self, order: usize, r: f64) -> f64 {
        let mesh = self.u.mesh();
        let c = mesh.locate(r);
        let (a, b) = mesh.cell(c);
        let h = b - a;
        let t = (r - a) / h;
        let (phi, dphi, _) = self.model.warp_jet(r);
        let mut sq = 0.0;
        match order {
            0 => {
                for m in self.u.modes() {
                    sq += self.interp(m, c, t).powi(2);
                }
            }
            1 => {
                for (m, nu) in self.u.modes().iter().zip(&self.nus) {
                    let f = self.interp(m, c, t);
                    let df = (m[c + 1] - m[c]) / h;
                    sq += df * df + nu * f * f / (phi * phi);
                }
            }
            _ => {
                let dim = self.model.cross_section().dim() as f64;
                let rh = self.model.cross_section().scalar_curvature();
                let g = dphi / phi;
                for (j, (m, nu)) in self.u.modes().iter().zip(&self.nus).enumerate() {
                    let f = self.interp(m, c, t);
                    let df = self.interp(&self.first[j], c, t);
                    let ddf = self.interp(&self.second[j], c, t);
                    let p2 = phi * phi;
                    sq += ddf * ddf
                        + 2.0 * nu / p2 * (df - f * g).powi(2)
                        + f * f * (nu * nu - rh * nu / dim) / (p2 * p2)
                        - 2.0 * f * df * g * nu / p2
                        + dim * df * df * g * g;
                }
            }
        }
        sq.max(0.0).sqrt()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let nodes = self.u.mesh().nodes();
        let mut pts = nodes.to_vec();
        for m in self.u.modes() {
            for c in 0..nodes.len() - 1 {
                let (x, y) = (m[c], m[c + 1]);
                if x * y < 0.0 {
                    pts.push(nodes[c] + (nodes[c + 1] - nodes[c]) * x / (x - y));
                }
            }
        }
        pts
    }
}

/// `u_a(r) = u(a r)` on an exact cone: `|grad^i u_a|(r) = a^i |grad^i u|(a r)`.
pub struct DilatedField<'a, F: Field> {
    pub inner: &'a F,
    pub a: f64,
}

impl<F: Field> Field for DilatedField<'_, F> {
    fn magnitude(&self, order: usize, r: f64) -> f64 {
        self.a.powi(order as i32) * self.inner.magnitude(order, self.a * r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().iter().map(|r| r / self.a).collect()
    }
}

/// Three-point first and second derivatives at the nodes of a nonuniform grid.
fn nodal_derivatives(x: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    if n < 3 {
        let s = (f[n - 1] - f[0]) / (x[n - 1] - x[0]);
        return (vec![s; n], d2);
    }
    for i in 0..n {
        let c = i.clamp(1, n - 2);
        let (h0, h1) = (x[c] - x[c - 1], x[c + 1] - x[c]);
        let (s0, s1) = ((f[c] - f[c - 1]) / h0, (f[c + 1] - f[c]) / h1);
        let second = 2.0 * (s1 - s0) / (h0 + h1);
        // derivative of the interpolating parabola through c-1, c, c+1, evaluated at x[i]
        let mid = (h1 * s0 + h0 * s1) / (h0 + h1);
        d1[i] = mid + second * (x[i] - x[c]);
        d2[i] = second;
    }
    (d1, d2)
}

fn integration_range(mesh_lo: f64, mesh_hi: f64, region: Region) -> Result<(f64, f64)> {
    match region {
        Region::Full => Ok((mesh_lo, mesh_hi)),
        Region::Annulus(lo, hi) => {
            let slack = 1e-12;
            if !(lo > 0.0 && hi > lo)
                || lo < mesh_lo * (1.0 - slack)
                || hi > mesh_hi * (1.0 + slack)
            {
                return Err(LabError::AnnulusOutsideMesh {
                    lo,
                    hi,
                    min: mesh_lo,
                    max: mesh_hi,
                });
            }
            Ok((lo.max(mesh_lo), hi.min(mesh_hi)))
        }
    }
}

/// `int_lo^hi chi^{p(delta - i) + n} |grad^i u|^p phi^{n-1} dr Vol(N)` for `i = 0..=k`.
pub fn field_terms(
    field: &dyn Field,
    spec: WeightSpec,
    model: &ConeModel,
    weight: Weight,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = model.n() as f64;
    let vol = model.cross_section().volume();
    let mut cuts: Vec<f64> = field
        .breakpoints()
        .into_iter()
        .chain(WeightFunction::for_model(model).breakpoints())
        .filter(|r| *r > lo && *r < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut terms = vec![0.0; spec.k + 1];
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        for_each_point(a, b, |r, wt| {
            let chi = weight.chi(r);
            let dv = wt * vol * model.warp_factor(r).powf(n - 1.0);
            for (i, term) in terms.iter_mut().enumerate() {
                let e = spec.p * (spec.delta - i as f64) + n;
                let mag = field.magnitude(i, r);
                if mag != 0.0 {
                    *term += chi.powf(e) * mag.powf(spec.p) * dv;
                }
            }
        });
    }
    if terms.iter().any(|t| !t.is_finite()) {
        return Err(LabError::NonFinite("weighted norm"));
    }
    Ok(terms)
}

/// Per-order integrals of the weighted norm (the norm is `(sum)^{1/p}`).
pub fn weighted_terms(
    u: &GridFunction,
    spec: WeightSpec,
    model: &ConeModel,
    weight: Weight,
    region: Region,
) -> Result<Vec<f64>> {
    let field = GridField::new(u, model)?;
    let (lo, hi) = integration_range(u.mesh().tip(), u.mesh().outer(), region)?;
    field_terms(&field, spec, model, weight, lo, hi)
}

pub fn weighted_norm_with(
    u: &GridFunction,
    spec: WeightSpec,
    model: &ConeModel,
    weight: Weight,
    region: Region,
) -> Result<f64> {
    let terms = weighted_terms(u, spec, model, weight, region)?;
    Ok(terms.iter().sum::<f64>().powf(1.0 / spec.p))
}

/// `||u||_{W^{k,p}_delta}` on the whole model with the weight `chi`.
pub fn weighted_norm(u: &GridFunction, spec: WeightSpec, model: &ConeModel) -> Result<f64> {
    weighted_norm_with(u, spec, model, Weight::manifold(model), Region::Full)
}

/// The usual `W^{k,p}` norm.
pub fn sobolev_norm(u: &GridFunction, model: &ConeModel, k: usize, p: f64) -> Result<f64> {
    let spec = WeightSpec::new(k, p, 0.0)?;
    weighted_norm_with(u, spec, model, Weight::Unweighted, Region::Full)
}

/// `H^1 = W^{1,2}_{1-n/2}`, i.e. `(int chi^2 u^2 + |grad u|^2)^{1/2}`.
pub fn h1_norm(u: &GridFunction, model: &ConeModel) -> Result<f64> {
    weighted_norm(u, WeightSpec::sobolev_h(1, model.n()), model)
}

/// `sup_r sum_{i<=k} chi^{delta - i} |grad^i u|` over the mesh nodes.
pub fn c_k_delta_norm(
    u: &GridFunction,
    model: &ConeModel,
    weight: Weight,
    k: usize,
    delta: f64,
) -> Result<f64> {
    if k > 2 {
        return Err(LabError::UnsupportedOrder(k));
    }
    let field = GridField::new(u, model)?;
    let nodes = u.mesh().nodes();
    let mut sup = 0.0f64;
    for (idx, &r) in nodes.iter().enumerate() {
        let chi = weight.chi(r);
        let mut acc = 0.0;
        for i in 0..=k {
            let mag = if i == 0 {
                u.modes().iter().map(|m| m[idx] * m[idx]).sum::<f64>().sqrt()
            } else {
                field.magnitude(i, r)
            };
            if mag != 0.0 {
                acc += chi.powf(delta - i as f64) * mag;
            }
        }
        sup = sup.max(acc);
    }
    Ok(sup)
}

/// `[(eps/2, eps), (eps/4, eps/2), ...]`, `j_count` annuli.
pub fn dyadic_annulus_decompose(r_max: f64, j_count: usize) -> Result<Vec<(f64, f64)>> {
    if j_count == 0 {
        return Err(invalid("j_count must be at least 1"));
    }
    if !(r_max > 0.0) {
        return Err(invalid(format!("r_max must be positive, got {r_max}")));
    }
    Ok((0..j_count)
        .map(|j| (r_max * 0.5f64.powi(j as i32 + 1), r_max * 0.5f64.powi(j as i32)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{Grading, RadialMesh};
    use crate::geometry::OuterBc;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup(n: usize, points: usize) -> (ConeModel, Arc<RadialMesh>) {
        let model = ConeModel::round_cone(n, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, points, Grading::auto()).unwrap());
        (model, mesh)
    }

    #[test]
    fn constant_on_annulus_gives_log_two() {
        let (model, mesh) = setup(3, 300);
        let one = GridFunction::from_fn(mesh, |_| 1.0).unwrap();
        let spec = WeightSpec::new(0, 2.0, 0.0).unwrap();
        let v = weighted_norm_with(&one, spec, &model, Weight::Cone, Region::Annulus(0.5, 1.0))
            .unwrap();
        let exact = 4.0 * PI * 2f64.ln();
        assert!((v * v - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let (model, mesh) = setup(3, 64);
        let z = GridFunction::zeros(mesh);
        for k in 0..=2 {
            let spec = WeightSpec::new(k, 2.0, -0.3).unwrap();
            assert_eq!(weighted_norm(&z, spec, &model).unwrap(), 0.0);
        }
        assert_eq!(h1_norm(&z, &model).unwrap(), 0.0);
        assert_eq!(c_k_delta_norm(&z, &model, Weight::Cone, 2, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn exponent_cancellation_gives_plain_l2() {
        let (model, mesh) = setup(4, 200);
        let one = GridFunction::from_fn(mesh.clone(), |_| 1.0).unwrap();
        let spec = WeightSpec::new(0, 2.0, -2.0).unwrap();
        let v = weighted_norm(&one, spec, &model).unwrap();
        let vol = model.cross_section().volume() * (1.0 - mesh.tip().powi(4)) / 4.0;
        assert!((v * v - vol).abs() < 1e-13 * vol);
    }

    #[test]
    fn second_order_magnitude_of_r_squared() {
        // Hess(r^2) = 2 I on flat space, so |Hess| = 2 sqrt(n)
        let model = ConeModel::round_cone(4, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::geometric(1.0, 200, 0.98).unwrap());
        let u = GridFunction::from_fn(mesh, |r| r * r).unwrap();
        let field = GridField::new(&u, &model).unwrap();
        for r in [0.2, 0.5, 0.9] {
            assert!((field.magnitude(2, r) - 4.0).abs() < 1e-3);
        }
    }

    #[test]
    fn second_order_magnitude_of_a_linear_coordinate() {
        // x_1 = r psi_1 on R^3 with psi_1 = sqrt(3) cos(theta), nu = 2; its Hessian vanishes
        let model = ConeModel::round_cone(3, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::geometric(1.0, 400, 0.99).unwrap());
        let vals: Vec<f64> = mesh.nodes().to_vec();
        let u = GridFunction::new(mesh.clone(), vec![vec![0.0; 400], vals]).unwrap();
        let field = GridField::new(&u, &model).unwrap();
        for r in [0.2, 0.5, 0.9] {
            assert!(field.magnitude(2, r) < 1e-6);
            assert!((field.magnitude(1, r) - 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn dyadic_lists() {
        assert_eq!(dyadic_annulus_decompose(1.0, 1).unwrap(), vec![(0.5, 1.0)]);
        assert_eq!(
            dyadic_annulus_decompose(1.0, 3).unwrap(),
            vec![(0.5, 1.0), (0.25, 0.5), (0.125, 0.25)]
        );
        assert!(dyadic_annulus_decompose(1.0, 0).is_err());
    }

    #[test]
    fn c_k_delta_examples() {
        let (model, mesh) = setup(3, 200);
        let delta = 0.4;
        let u = GridFunction::from_fn(mesh.clone(), |r| r.powf(delta)).unwrap();
        let v = c_k_delta_norm(&u, &model, Weight::Cone, 0, delta).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let s = 1.3;
        let u = GridFunction::from_fn(mesh, |r| r.powf(s)).unwrap();
        let v = c_k_delta_norm(&u, &model, Weight::Cone, 0, delta).unwrap();
        assert!((v - 1.0f64.powf(s - delta)).abs() < 1e-12);
    }
}
