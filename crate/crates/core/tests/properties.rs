use std::sync::Arc;

use conelab::asymptotics::{default_window, fit_decay_exponent, indicial_roots};
use conelab::discretization::{Grading, RadialMesh};
use conelab::weighted::{scaling_homogeneity_check, weighted_norm, WeightSpec};
use conelab::{ConeModel, GridFunction, OuterBc};
use proptest::prelude::*;

fn mesh(points: usize) -> Arc<RadialMesh> {
    Arc::new(RadialMesh::with_grading(1.0, points, Grading::auto()).unwrap())
}

fn bump_sum(mesh: &Arc<RadialMesh>, coeffs: &[(f64, f64, f64)]) -> GridFunction {
    GridFunction::from_fn(mesh.clone(), |r| {
        coeffs
            .iter()
            .map(|(amp, c, s)| amp * r.powf(*s) * (-(r.ln() - c.ln()).powi(2)).exp())
            .sum()
    })
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, 0.01..0.9f64, 0.0..1.5f64), 1..4)
}

fn spec() -> impl Strategy<Value = WeightSpec> {
    (0usize..=2, prop::sample::select(vec![1.5, 2.0, 3.0]), -1.5..1.5f64)
        .prop_map(|(k, p, d)| WeightSpec::new(k, p, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weighted_norm_is_a_norm(a in coeffs(), b in coeffs(), c in -5.0..5.0f64, spec in spec()) {
        let model = ConeModel::round_cone(4, 0.8, 1.0, OuterBc::Neumann).unwrap();
        let m = mesh(256);
        let (u, v) = (bump_sum(&m, &a), bump_sum(&m, &b));
        let nu = weighted_norm(&u, spec, &model).unwrap();
        let nv = weighted_norm(&v, spec, &model).unwrap();
        let sum = weighted_norm(&u.add(&v).unwrap(), spec, &model).unwrap();
        prop_assert!(sum <= (nu + nv) * (1.0 + 1e-12));
        let scaled = weighted_norm(&u.scale(c), spec, &model).unwrap();
        prop_assert!((scaled - c.abs() * nu).abs() <= 1e-12 * (c.abs() * nu).max(1e-300));
    }

    #[test]
    fn dilation_scaling_is_exact(a in coeffs(), dil in 0.2..1.0f64, spec in spec()) {
        let model = ConeModel::round_cone(3, 0.9, 1.0, OuterBc::Neumann).unwrap();
        let u = bump_sum(&mesh(256), &a);
        let rep = scaling_homogeneity_check(&u, &model, spec, dil, 0.2, 0.95).unwrap();
        prop_assert!(rep.rel_err <= 1e-8, "{:?}", rep);
    }

    #[test]
    fn powers_are_fitted_exactly(s in -0.99..2.0f64, c in 0.1..10.0f64) {
        let model = ConeModel::round_cone(4, 0.8, 1.0, OuterBc::Neumann).unwrap();
        let u = GridFunction::from_fn(mesh(256), |r| c * r.powf(s)).unwrap();
        let fit = fit_decay_exponent(&u, &model, default_window(&model, &u)).unwrap();
        prop_assert!((fit.fitted_exponent - s).abs() < 1e-8);
        prop_assert!(fit.theorem_consistent);
    }

    #[test]
    fn indicial_roots_satisfy_vieta(n in 3usize..8, a in 0.3..1.5f64, j in 0usize..4) {
        let model = ConeModel::round_cone(n, a, 1.0, OuterBc::Neumann).unwrap();
        let r = indicial_roots(&model, j).unwrap();
        let nf = n as f64;
        prop_assert!((r.gamma_plus + r.gamma_minus + (nf - 2.0)).abs() < 1e-10);
        if !r.oscillatory {
            // each root makes the r^{-2} coefficient of (-4 Delta + R)(r^g Y_j) vanish
            let cs = model.cross_section();
            let free = cs.scalar_curvature() + 4.0 * cs.eigenvalues()[j] - (nf - 1.0) * (nf - 2.0);
            for g in [r.gamma_plus, r.gamma_minus] {
                let q = -4.0 * (g * g + (nf - 2.0) * g) + free;
                prop_assert!(q.abs() < 1e-9 * free.abs().max(1.0));
            }
        }
    }

    #[test]
    fn meshes_are_geometric(points in 2usize..2000, outer in 0.1..10.0f64) {
        let m = RadialMesh::with_grading(outer, points, Grading::auto()).unwrap();
        let nodes = m.nodes();
        prop_assert_eq!(nodes.len(), points);
        prop_assert!((m.outer() - outer).abs() <= 1e-15 * outer);
        prop_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let q = m.grading();
        prop_assert!(q > 0.0 && q < 1.0);
        for w in nodes.windows(2) {
            prop_assert!((w[0] / w[1] - q).abs() < 1e-12);
        }
    }
}
