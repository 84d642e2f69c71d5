use super::banded::{CellLaplacian, SymTridiag};
use super::mesh::RadialMesh;
use super::quadrature::for_each_point;
use crate::error::{invalid, Result};
use crate::geometry::{ConeModel, OuterBc};

/// Coefficients `(gradient, potential)` of the assembled form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormScaling {
    /// `4 |grad u|^2 + R u^2`.
    Perelman,
    /// `|grad u|^2 + R u^2 / 4`, the form of `-Delta + R/4`.
    SchrodingerL,
}

impl FormScaling {
    pub fn coefficients(self) -> (f64, f64) {
        match self {
            FormScaling::Perelman => (4.0, 1.0),
            FormScaling::SchrodingerL => (1.0, 0.25),
        }
    }
}

/// The three bilinear forms of one angular mode on the full nodal space.
///
/// All carry the measure `phi^{n-1} dr Vol(N)`: `radial = int u'v'`,
/// `angular = int nu uv / phi^2`, `potential = int R uv`, `mass = int uv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormParts {
    pub radial: CellLaplacian,
    pub angular: SymTridiag,
    pub potential: SymTridiag,
    pub mass: SymTridiag,
}

impl FormParts {
    /// `int |grad u|^2` as a matrix.
    pub fn gradient(&self) -> SymTridiag {
        self.radial.to_tridiag().add_scaled(&self.angular, 1.0)
    }

    pub fn combine(&self, scaling: FormScaling) -> SymTridiag {
        let (g, p) = scaling.coefficients();
        self.gradient().scaled(g).add_scaled(&self.potential, p)
    }

    /// Product with the combined form, the radial part applied in difference form.
    pub fn apply(&self, scaling: FormScaling, u: &[f64]) -> Vec<f64> {
        let (g, p) = scaling.coefficients();
        let a = self.radial.matvec(u);
        let b = self.angular.matvec(u);
        let c = self.potential.matvec(u);
        (0..u.len()).map(|i| g * (a[i] + b[i]) + p * c[i]).collect()
    }

    pub fn gradient_form(&self, u: &[f64]) -> f64 {
        self.radial.quad_form(u) + self.angular.quad_form(u)
    }

    pub fn form(&self, scaling: FormScaling, u: &[f64]) -> f64 {
        let (g, p) = scaling.coefficients();
        g * self.gradient_form(u) + p * self.potential.quad_form(u)
    }
}

pub fn assemble_parts(model: &ConeModel, mesh: &RadialMesh, nu: f64) -> FormParts {
    let n = model.n();
    let vol = model.cross_section().volume();
    let size = mesh.len();
    let mut radial = vec![0.0; mesh.cell_count()];
    let mut angular = SymTridiag::zeros(size);
    let mut potential = SymTridiag::zeros(size);
    let mut mass = SymTridiag::zeros(size);
    for c in 0..mesh.cell_count() {
        let (a, b) = mesh.cell(c);
        let h = b - a;
        let mut kc = 0.0;
        let mut ab = [[0.0; 2]; 2];
        let mut pb = [[0.0; 2]; 2];
        let mut mb = [[0.0; 2]; 2];
        for_each_point(a, b, |r, w| {
            let phi = model.warp_factor(r);
            let dv = w * vol * phi.powi(n as i32 - 1);
            let shape = [(b - r) / h, (r - a) / h];
            let curv = model.scalar_curvature_unchecked(r);
            let ang = nu / (phi * phi);
            kc += dv / (h * h);
            for i in 0..2 {
                for j in 0..2 {
                    let uv = shape[i] * shape[j] * dv;
                    ab[i][j] += ang * uv;
                    pb[i][j] += curv * uv;
                    mb[i][j] += uv;
                }
            }
        });
        radial[c] = kc;
        angular.add_block(c, ab);
        potential.add_block(c, pb);
        mass.add_block(c, mb);
    }
    FormParts {
        radial: CellLaplacian { k: radial },
        angular,
        potential,
        mass,
    }
}

/// Stiffness and mass of one mode with the outer boundary condition applied.
///
/// Dirichlet removes the outer node; the tip carries the natural condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    pub mode: usize,
    pub nu: f64,
    pub scaling: FormScaling,
    pub outer_bc: OuterBc,
    pub stiffness: SymTridiag,
    pub mass: SymTridiag,
    full_len: usize,
}

impl ModeOperator {
    /// Wraps an already assembled full-length pair.
    pub fn from_matrices(
        mode: usize,
        stiffness: SymTridiag,
        mass: SymTridiag,
        outer_bc: OuterBc,
        scaling: FormScaling,
    ) -> Self {
        let full_len = mass.len();
        let dofs = match outer_bc {
            OuterBc::Neumann => full_len,
            OuterBc::Dirichlet => full_len - 1,
        };
        ModeOperator {
            mode,
            nu: f64::NAN,
            scaling,
            outer_bc,
            stiffness: stiffness.leading(dofs),
            mass: mass.leading(dofs),
            full_len,
        }
    }

    pub fn dofs(&self) -> usize {
        self.stiffness.len()
    }

    pub fn full_len(&self) -> usize {
        self.full_len
    }

    /// Pads a vector of free values to the full nodal length.
    pub fn extend(&self, free: &[f64]) -> Vec<f64> {
        let mut v = free.to_vec();
        v.resize(self.full_len, 0.0);
        v
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        full[..self.dofs()].to_vec()
    }

    pub fn rayleigh_quotient(&self, free: &[f64]) -> f64 {
        self.stiffness.quad_form(free) / self.mass.quad_form(free)
    }
}

pub fn assemble_mode_operator(
    model: &ConeModel,
    mesh: &RadialMesh,
    mode: usize,
    scaling: FormScaling,
) -> Result<ModeOperator> {
    let eigs = model.cross_section().eigenvalues();
    let nu = *eigs.get(mode).ok_or_else(|| {
        invalid(format!("mode {mode} out of range, cross section has {} modes", eigs.len()))
    })?;
    let parts = assemble_parts(model, mesh, nu);
    Ok(operator_from_parts(&parts, model.outer_bc(), mode, nu, scaling))
}

pub fn operator_from_parts(
    parts: &FormParts,
    outer_bc: OuterBc,
    mode: usize,
    nu: f64,
    scaling: FormScaling,
) -> ModeOperator {
    let mut op = ModeOperator::from_matrices(
        mode,
        parts.combine(scaling),
        parts.mass.clone(),
        outer_bc,
        scaling,
    );
    op.nu = nu;
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::mesh::Grading;
    use std::f64::consts::PI;

    fn flat(n: usize, bc: OuterBc) -> ConeModel {
        ConeModel::round_cone(n, 1.0, 1.0, bc).unwrap()
    }

    #[test]
    fn constants_are_in_the_kernel_of_the_flat_radial_form() {
        let model = flat(3, OuterBc::Neumann);
        let mesh = RadialMesh::with_grading(1.0, 200, Grading::auto()).unwrap();
        let op = assemble_mode_operator(&model, &mesh, 0, FormScaling::Perelman).unwrap();
        let y = op.stiffness.matvec(&vec![1.0; op.dofs()]);
        let scale = op.stiffness.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        assert!(y.iter().all(|v| v.abs() <= 1e-10 * scale));
    }

    #[test]
    fn form_of_linear_function_matches_closed_form() {
        // u = r on the flat 3-cone: int_{r1}^1 4 * 1 * r^2 * 4 pi dr
        let model = flat(3, OuterBc::Neumann);
        let mesh = RadialMesh::geometric(1.0, 64, 0.9).unwrap();
        let op = assemble_mode_operator(&model, &mesh, 0, FormScaling::Perelman).unwrap();
        let u: Vec<f64> = mesh.nodes().to_vec();
        let exact = 16.0 * PI * (1.0 - mesh.tip().powi(3)) / 3.0;
        assert!((op.stiffness.quad_form(&u) - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn schrodinger_scaling_is_a_quarter_of_perelman() {
        let model = ConeModel::round_cone(4, 0.8, 1.0, OuterBc::Neumann).unwrap();
        let mesh = RadialMesh::geometric(1.0, 50, 0.85).unwrap();
        let p = assemble_mode_operator(&model, &mesh, 1, FormScaling::Perelman).unwrap();
        let l = assemble_mode_operator(&model, &mesh, 1, FormScaling::SchrodingerL).unwrap();
        for k in 0..5 {
            let u: Vec<f64> = (0..50).map(|i| ((i * (k + 3)) as f64 * 0.37).sin()).collect();
            let a = p.stiffness.quad_form(&u);
            let b = l.stiffness.quad_form(&u);
            assert!((a - 4.0 * b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn dirichlet_drops_outer_node() {
        let model = flat(3, OuterBc::Dirichlet);
        let mesh = RadialMesh::geometric(1.0, 20, 0.8).unwrap();
        let op = assemble_mode_operator(&model, &mesh, 0, FormScaling::Perelman).unwrap();
        assert_eq!(op.dofs(), 19);
        assert_eq!(op.extend(&[1.0; 19])[19], 0.0);
        assert!(assemble_mode_operator(&model, &mesh, 99, FormScaling::Perelman).is_err());
    }
}
