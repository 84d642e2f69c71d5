//! Tip behavior of radial functions: power-law fits, indicial roots and
//! weighted uniform decay.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::geometry::ConeModel;
use crate::grid::GridFunction;
use crate::weighted::{Field, GridField, WeightFunction};

pub const MIN_FIT_NODES: usize = 10;
/// Largest spread of fitted exponents over nested windows still called asymptotic.
pub const WINDOW_STABILITY_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub nodes: usize,
    /// Least-squares slope of `ln u` against `ln r`.
    pub fitted_exponent: f64,
    /// RMS of the fit in `ln u`.
    pub residual: f64,
    /// `-(n/2 - 1)`; minimizers must decay slower than `r^bound` blows up.
    pub bound: f64,
    /// Bounded indicial root of mode 0 when the model is an exact cone with real roots.
    pub indicial_root: Option<f64>,
    pub theorem_consistent: bool,
}

impl DecayFit {
    pub fn indicial_gap(&self) -> Option<f64> {
        self.indicial_root.map(|g| (self.fitted_exponent - g).abs())
    }
}

/// `[10 r_1, eps0 / 40]`.
pub fn default_window(model: &ConeModel, u: &GridFunction) -> (f64, f64) {
    let eps0 = WeightFunction::for_model(model).epsilon0();
    (10.0 * u.mesh().tip(), eps0 / 40.0)
}

fn window_nodes(u: &GridFunction, window: (f64, f64)) -> Vec<usize> {
    let (lo, hi) = window;
    u.mesh()
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, r)| **r >= lo && **r <= hi)
        .map(|(i, _)| i)
        .collect()
}

/// Fits `u ~ C r^beta` on the mesh nodes inside `window` using mode 0.
pub fn fit_decay_exponent(
    u: &GridFunction,
    model: &ConeModel,
    window: (f64, f64),
) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(crate::error::invalid(format!("bad fit window ({lo}, {hi})")));
    }
    let idx = window_nodes(u, window);
    if idx.len() < MIN_FIT_NODES {
        return Err(LabError::WindowTooSmall {
            nodes: idx.len(),
            required: MIN_FIT_NODES,
        });
    }
    let nodes = u.mesh().nodes();
    let values = u.mode(0);
    let mut pts = Vec::with_capacity(idx.len());
    for &i in &idx {
        if !(values[i] > 0.0) {
            return Err(LabError::NonPositive(format!("u = {} at r = {}", values[i], nodes[i])));
        }
        pts.push((nodes[i].ln(), values[i].ln()));
    }
    let count = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = sxy / sxx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - my - beta * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / count)
        .sqrt();
    if !beta.is_finite() || !residual.is_finite() {
        return Err(LabError::NonFinite("decay fit"));
    }
    let bound = -(model.n() as f64 / 2.0 - 1.0);
    let indicial_root = indicial_roots(model, 0)
        .ok()
        .filter(|r| !r.oscillatory)
        .map(|r| r.gamma_plus);
    Ok(DecayFit {
        window,
        nodes: idx.len(),
        fitted_exponent: beta,
        residual,
        bound,
        indicial_root,
        theorem_consistent: beta - bound > 3.0 * residual,
    })
}

/// Roots of `-4 (g^2 + (n-2) g) + R_h + 4 nu_j - (n-1)(n-2) = 0`, the balance of the
/// `r^{-2}` terms of `-4 Delta + R` on `r^g` times the mode `j` eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicialRoots {
    pub discriminant: f64,
    /// Real parts when `oscillatory`.
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub imaginary: f64,
    pub oscillatory: bool,
}

pub fn indicial_roots(model: &ConeModel, j: usize) -> Result<IndicialRoots> {
    if !model.is_exact() {
        return Err(LabError::RequiresExactCone);
    }
    let cs = model.cross_section();
    let nu = *cs.eigenvalues().get(j).ok_or_else(|| {
        crate::error::invalid(format!("mode {j} out of range, cross section has {} modes", cs.mode_count()))
    })?;
    let n = model.n() as f64;
    let disc = (n - 2.0).powi(2) + cs.scalar_curvature() + 4.0 * nu - (n - 1.0) * (n - 2.0);
    let centre = -(n - 2.0) / 2.0;
    if disc < 0.0 {
        return Ok(IndicialRoots {
            discriminant: disc,
            gamma_plus: centre,
            gamma_minus: centre,
            imaginary: (-disc).sqrt() / 2.0,
            oscillatory: true,
        });
    }
    let half = disc.sqrt() / 2.0;
    Ok(IndicialRoots {
        discriminant: disc,
        gamma_plus: centre + half,
        gamma_minus: centre - half,
        imaginary: 0.0,
        oscillatory: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformReport {
    /// `(r_lo, r_hi, max r^{l - delta} |grad^l u|)` from the outermost window inward.
    pub windows: Vec<(f64, f64, f64)>,
    pub sup_value: f64,
    pub vanishing: bool,
}

/// Splits `[lo, hi]` into `count` windows of equal logarithmic length, outermost first.
pub fn log_windows(lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
    let span = (hi / lo).ln();
    (0..count)
        .rev()
        .map(|k| {
            let a = lo * (span * k as f64 / count as f64).exp();
            let b = lo * (span * (k + 1) as f64 / count as f64).exp();
            (a, b)
        })
        .collect()
}

/// Tracks `r^{l - delta} |grad^l u|` over four shrinking tip windows. Vanishing
/// means the window maxima never grow toward the tip and the innermost is below
/// half the outermost.
pub fn weighted_uniform_check(
    u: &GridFunction,
    model: &ConeModel,
    l: usize,
    delta: f64,
) -> Result<UniformReport> {
    if l > 1 {
        return Err(LabError::UnsupportedOrder(l));
    }
    let field = GridField::new(u, model)?;
    let (lo, hi) = default_window(model, u);
    let nodes = u.mesh().nodes();
    let mut windows = Vec::new();
    for (a, b) in log_windows(lo, hi, 4) {
        let mut best = 0.0f64;
        let mut seen = false;
        for c in 0..nodes.len() - 1 {
            let r = if l == 0 { nodes[c] } else { (nodes[c] * nodes[c + 1]).sqrt() };
            if r < a || r > b {
                continue;
            }
            seen = true;
            let mag = if l == 0 {
                u.modes().iter().map(|m| m[c] * m[c]).sum::<f64>().sqrt()
            } else {
                field.magnitude(1, r)
            };
            best = best.max(r.powf(l as f64 - delta) * mag);
        }
        if !seen {
            return Err(LabError::WindowTooSmall {
                nodes: 0,
                required: 1,
            });
        }
        windows.push((a, b, best));
    }
    let sup_value = windows.iter().fold(0.0f64, |m, w| m.max(w.2));
    let monotone = windows.windows(2).all(|p| p[1].2 <= p[0].2 * (1.0 + 1e-9));
    let vanishing = monotone && windows[3].2 < 0.5 * windows[0].2;
    Ok(UniformReport {
        windows,
        sup_value,
        vanishing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowStability {
    pub fits: Vec<DecayFit>,
    pub spread: f64,
    pub stable: bool,
}

/// Fits on the default window and on its inner two thirds and inner third
/// (in `ln r`).
pub fn window_stability(u: &GridFunction, model: &ConeModel) -> Result<WindowStability> {
    let (lo, hi) = default_window(model, u);
    let span = (hi / lo).ln();
    let fits = [1.0, 2.0 / 3.0, 1.0 / 3.0]
        .iter()
        .map(|s| fit_decay_exponent(u, model, (lo, lo * (span * s).exp())))
        .collect::<Result<Vec<_>>>()?;
    let (mn, mx) = fits.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), f| {
        (a.min(f.fitted_exponent), b.max(f.fitted_exponent))
    });
    let spread = mx - mn;
    Ok(WindowStability {
        fits,
        spread,
        stable: spread < WINDOW_STABILITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{Grading, RadialMesh};
    use crate::geometry::OuterBc;
    use std::sync::Arc;

    fn setup(n: usize, a: f64) -> (ConeModel, Arc<RadialMesh>) {
        let model = ConeModel::round_cone(n, a, 1.0, OuterBc::Neumann).unwrap();
        let mesh = Arc::new(RadialMesh::with_grading(1.0, 256, Grading::auto()).unwrap());
        (model, mesh)
    }

    #[test]
    fn exact_powers_are_recovered() {
        let (model, mesh) = setup(4, 0.8);
        for s in [0.3, -0.7, 0.0, 1.9] {
            let u = GridFunction::from_fn(mesh.clone(), |r| 2.5 * r.powf(s)).unwrap();
            let fit = fit_decay_exponent(&u, &model, default_window(&model, &u)).unwrap();
            assert!((fit.fitted_exponent - s).abs() < 1e-8, "{s} {}", fit.fitted_exponent);
            assert!(fit.residual < 1e-10);
        }
    }

    #[test]
    fn window_needs_ten_nodes() {
        let (model, mesh) = setup(4, 0.8);
        let u = GridFunction::from_fn(mesh.clone(), |_| 1.0).unwrap();
        let r = mesh.nodes()[100];
        let err = fit_decay_exponent(&u, &model, (r, r * 1.5)).unwrap_err();
        assert!(matches!(err, LabError::WindowTooSmall { .. }));
    }

    #[test]
    fn indicial_roots_of_round_cones() {
        let (flat, _) = setup(4, 1.0);
        let r = indicial_roots(&flat, 0).unwrap();
        assert!(r.gamma_plus.abs() < 1e-14);
        let (cone, _) = setup(4, 0.8);
        let r = indicial_roots(&cone, 0).unwrap();
        assert!((r.gamma_plus - (-2.0 + 7.375f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((r.gamma_plus + r.gamma_minus + 2.0).abs() < 1e-14);
        let (wide, _) = setup(4, 2.0);
        assert!(indicial_roots(&wide, 0).unwrap().oscillatory);
    }

    #[test]
    fn uniform_decay_of_powers() {
        let (model, mesh) = setup(4, 0.8);
        let delta = -0.5;
        let u = GridFunction::from_fn(mesh.clone(), |r| r.powf(delta + 0.1)).unwrap();
        assert!(weighted_uniform_check(&u, &model, 0, delta).unwrap().vanishing);
        assert!(weighted_uniform_check(&u, &model, 1, delta).unwrap().vanishing);
        let u = GridFunction::from_fn(mesh, |r| r.powf(delta)).unwrap();
        let rep = weighted_uniform_check(&u, &model, 0, delta).unwrap();
        assert!(!rep.vanishing);
        assert!((rep.sup_value - 1.0).abs() < 1e-12);
    }
}
