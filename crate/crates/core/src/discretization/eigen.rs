use super::banded::{dot, SymTridiag};
use super::operator::ModeOperator;
use crate::error::{LabError, Result};

const MAX_INVERSE_STEPS: usize = 200;
const MAX_BRACKET_STEPS: usize = 4000;

/// Smallest generalized eigenpair of a mode operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Full nodal vector, `M`-normalized, first nonzero entry positive.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// Normwise backward error `|Kv - lambda Mv| / (|K||v| + |lambda||M||v|)`.
    pub residual: f64,
    pub trace: Vec<f64>,
}

/// Number of generalized eigenvalues of `(k, m)` strictly below `sigma`.
pub fn count_below(k: &SymTridiag, m: &SymTridiag, sigma: f64) -> usize {
    k.add_scaled(m, -sigma).negative_count()
}

/// Interval `(lo, hi]` containing the smallest eigenvalue and nothing else
/// below `hi`, narrowed by inertia bisection.
fn bracket(k: &SymTridiag, m: &SymTridiag) -> Result<(f64, f64)> {
    let ones = vec![1.0; k.len()];
    let rq = k.quad_form(&ones) / m.quad_form(&ones);
    let scale = rq.abs().max(1.0);
    let mut hi = rq + 1e-9 * scale;
    let mut step = scale;
    let mut lo = rq - step;
    let mut guard = 0;
    while count_below(k, m, lo) > 0 {
        hi = lo;
        step *= 2.0;
        lo -= step;
        guard += 1;
        if guard > MAX_BRACKET_STEPS || !lo.is_finite() {
            return Err(LabError::EigenNonConvergence {
                iterations: guard,
                trace: vec![lo],
            });
        }
    }
    let span0 = hi - lo;
    for _ in 0..MAX_BRACKET_STEPS {
        let width = hi - lo;
        if width <= 1e-12 * lo.abs().max(hi.abs()) || width <= 1e-15 * span0 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(k, m, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn backward_error(op: &ModeOperator, v: &[f64], lambda: f64) -> f64 {
    let kv = op.stiffness.matvec(v);
    let mv = op.mass.matvec(v);
    let akv = op.stiffness.abs_matvec(v);
    let amv = op.mass.abs_matvec(v);
    let num = kv
        .iter()
        .zip(&mv)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max);
    let den = akv
        .iter()
        .zip(&amv)
        .map(|(a, b)| a + lambda.abs() * b)
        .fold(0.0, f64::max);
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Inertia bisection to bracket the bottom of the spectrum, then inverse
/// iteration from the all-ones vector shifted just below the bracket.
pub fn smallest_eigenpair(op: &ModeOperator, tol: f64) -> Result<EigenPair> {
    let (lo, hi) = bracket(&op.stiffness, &op.mass)?;
    // a shift landing on an exact eigenvalue (0 for constants) leaves a zero pivot
    let sigma = lo - (hi - lo).max(1e-10 * lo.abs().max(1.0));
    let shifted = op.stiffness.add_scaled(&op.mass, -sigma);
    let mut x = vec![1.0; op.dofs()];
    let mut trace = Vec::new();
    for it in 1..=MAX_INVERSE_STEPS {
        let rhs = op.mass.matvec(&x);
        let y = match shifted.solve(&rhs) {
            Some(y) => y,
            None => {
                return Err(LabError::EigenNonConvergence {
                    iterations: it,
                    trace,
                })
            }
        };
        let norm = op.mass.quad_form(&y).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(LabError::EigenNonConvergence {
                iterations: it,
                trace,
            });
        }
        x = y.iter().map(|v| v / norm).collect();
        let value = op.stiffness.quad_form(&x);
        let residual = backward_error(op, &x, value);
        trace.push(residual);
        if residual <= tol {
            if let Some(first) = x.iter().find(|v| **v != 0.0) {
                if *first < 0.0 {
                    x.iter_mut().for_each(|v| *v = -*v);
                }
            }
            return Ok(EigenPair {
                value,
                vector: op.extend(&x),
                iterations: it,
                residual,
                trace,
            });
        }
    }
    Err(LabError::EigenNonConvergence {
        iterations: MAX_INVERSE_STEPS,
        trace,
    })
}

/// `x^T K x / x^T M x` on the free values.
pub fn rayleigh(k: &SymTridiag, m: &SymTridiag, x: &[f64]) -> f64 {
    dot(x, &k.matvec(x)) / dot(x, &m.matvec(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::mesh::{Grading, RadialMesh};
    use crate::discretization::operator::{assemble_mode_operator, FormScaling};
    use crate::geometry::{ConeModel, OuterBc};

    fn dense_smallest(k: &SymTridiag, m: &SymTridiag) -> f64 {
        // bisection on the inertia count with a dense Sturm reference
        let mut lo = -1e6;
        let mut hi = 1e6;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(k, m, mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn matches_independent_bisection() {
        let k = SymTridiag {
            diag: vec![2.0, 3.0, 4.0, 5.0, 6.0],
            off: vec![-1.0, 0.5, -0.25, 1.0],
        };
        let m = SymTridiag {
            diag: vec![2.0, 2.0, 2.0, 2.0, 2.0],
            off: vec![0.5, 0.5, 0.5, 0.5],
        };
        let (lo, hi) = bracket(&k, &m).unwrap();
        let reference = dense_smallest(&k, &m);
        assert!(lo <= reference + 1e-9 && reference <= hi + 1e-9);
    }

    #[test]
    fn flat_neumann_ground_state_is_constant() {
        let model = ConeModel::round_cone(3, 1.0, 1.0, OuterBc::Neumann).unwrap();
        let mesh = RadialMesh::with_grading(1.0, 128, Grading::auto()).unwrap();
        let op = assemble_mode_operator(&model, &mesh, 0, FormScaling::Perelman).unwrap();
        let pair = smallest_eigenpair(&op, 1e-12).unwrap();
        assert!(pair.value.abs() < 1e-10);
        let v0 = pair.vector[0];
        assert!(v0 > 0.0);
        assert!(pair.vector.iter().all(|v| (v - v0).abs() < 1e-8 * v0));
    }

    #[test]
    fn rayleigh_consistency_and_normalization() {
        let model = ConeModel::round_cone(4, 0.9, 1.0, OuterBc::Dirichlet).unwrap();
        let mesh = RadialMesh::with_grading(1.0, 256, Grading::auto()).unwrap();
        let op = assemble_mode_operator(&model, &mesh, 0, FormScaling::Perelman).unwrap();
        let pair = smallest_eigenpair(&op, 1e-12).unwrap();
        let free = op.restrict(&pair.vector);
        assert!((op.mass.quad_form(&free) - 1.0).abs() < 1e-12);
        let rq = op.rayleigh_quotient(&free);
        assert!((rq - pair.value).abs() <= 1e-10 * pair.value.abs().max(1.0));
        assert!(count_below(&op.stiffness, &op.mass, pair.value * (1.0 - 1e-9)) == 0);
    }
}
