use std::sync::Arc;

use rayon::prelude::*;

use super::solve::{SolveKind, SolveReport, SolveStatus};
use crate::discretization::{assemble_mode_operator, smallest_eigenpair, FormScaling, RadialMesh};
use crate::error::Result;
use crate::geometry::ConeModel;
use crate::grid::GridFunction;

/// `lambda(g)`: the smallest eigenvalue of `-4 Delta + R`, minimized over the angular modes.
pub fn lambda_functional(model: &ConeModel, mesh: Arc<RadialMesh>, tol: f64) -> Result<SolveReport> {
    let count = model.cross_section().mode_count();
    let pairs = (0..count)
        .into_par_iter()
        .map(|j| {
            let op = assemble_mode_operator(model, &mesh, j, FormScaling::Perelman)?;
            let pair = smallest_eigenpair(&op, tol)?;
            Ok((op, pair))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (j, (_, p)) in pairs.iter().enumerate() {
        if p.value < pairs[best].1.value {
            best = j;
        }
    }
    let (op, pair) = &pairs[best];
    let mut modes = vec![vec![0.0; mesh.len()]; best + 1];
    modes[best] = pair.vector.clone();
    let free = op.restrict(&pair.vector);
    let constraint_error = (op.mass.quad_form(&free) - 1.0).abs();
    Ok(SolveReport {
        kind: SolveKind::Lambda,
        status: SolveStatus::Converged,
        value: pair.value,
        tau: None,
        mode: best,
        minimizer: GridFunction::new(mesh, modes)?,
        el_residual: pair.residual,
        printed_el_residual: None,
        constraint_error,
        iterations: pair.iterations,
        trace: pair.trace.clone(),
        tolerance: tol,
        supercritical: !model.is_subcritical(),
        mode_values: pairs.iter().map(|(_, p)| p.value).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Grading;
    use crate::geometry::OuterBc;

    #[test]
    fn ground_state_lives_in_the_radial_mode() {
        for a in [0.8, 1.0, 1.5] {
            let model = ConeModel::round_cone(4, a, 1.0, OuterBc::Dirichlet).unwrap();
            let mesh = Arc::new(RadialMesh::with_grading(1.0, 128, Grading::auto()).unwrap());
            let rep = lambda_functional(&model, mesh, 1e-12).unwrap();
            assert_eq!(rep.mode, 0);
            assert!(rep.mode_values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
