//! Deterministic test families for the inequality checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretization::{assemble_parts, RadialMesh};
use crate::error::Result;
use crate::geometry::ConeModel;
use crate::grid::GridFunction;
use crate::weighted::cutoff;

pub const DEFAULT_SEED: u64 = 20_240_917;

fn log_bump(mesh: &RadialMesh, centre: f64, width: f64) -> Vec<f64> {
    (0..mesh.len())
        .map(|i| {
            let t = (mesh.log_position(i) - centre) / width;
            (-t * t).exp()
        })
        .collect()
}

fn times(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Fifty compactly supported functions: powers, log-bumps, log-oscillations and
/// seeded random mixtures, the last ten carrying a second angular mode.
pub fn hardy_family(mesh: &Arc<RadialMesh>, seed: u64) -> Result<Vec<GridFunction>> {
    let cut = cutoff(mesh);
    let nodes = mesh.nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(50);
    for k in 0..10 {
        let s = -1.5 + 0.4 * k as f64;
        let v: Vec<f64> = nodes.iter().map(|r| r.powf(s)).collect();
        out.push(GridFunction::radial(mesh.clone(), times(&v, &cut))?);
    }
    for k in 0..10 {
        let b = log_bump(mesh, 0.3 + 0.04 * k as f64, 0.02 + 0.01 * k as f64);
        out.push(GridFunction::radial(mesh.clone(), times(&b, &cut))?);
    }
    for k in 0..10 {
        let freq = 1.0 + k as f64;
        let s = -0.5 + 0.1 * k as f64;
        let v: Vec<f64> = nodes.iter().map(|r| r.powf(s) * (freq * r.ln()).sin()).collect();
        out.push(GridFunction::radial(mesh.clone(), times(&v, &cut))?);
    }
    for k in 0..20 {
        let modes = if k < 10 { 1 } else { 2 };
        let mut data = Vec::with_capacity(modes);
        for _ in 0..modes {
            let mut v = vec![0.0; mesh.len()];
            for _ in 0..4 {
                let c: f64 = rng.random_range(0.1..0.9);
                let w: f64 = rng.random_range(0.01..0.2);
                let amp: f64 = rng.random_range(-1.0..1.0);
                let s: f64 = rng.random_range(-1.0..1.0);
                for (i, b) in log_bump(mesh, c, w).iter().enumerate() {
                    v[i] += amp * b * nodes[i].powf(s);
                }
            }
            data.push(times(&v, &cut));
        }
        out.push(GridFunction::new(mesh.clone(), data)?);
    }
    Ok(out)
}

/// `r^{(pk - n)/p + eps}` times the cutoff, approaching equality in the Hardy
/// inequality as `eps -> 0` and the tip truncation shrinks.
pub fn hardy_extremal(mesh: &Arc<RadialMesh>, n: usize, p: f64, k: usize, eps: f64) -> Result<GridFunction> {
    let s = (p * k as f64 - n as f64) / p + eps;
    let v: Vec<f64> = mesh.nodes().iter().map(|r| r.powf(s)).collect();
    GridFunction::radial(mesh.clone(), times(&v, &cutoff(mesh)))
}

/// Signed log-bumps moving toward the tip, `count` of them.
pub fn tip_bumps(mesh: &Arc<RadialMesh>, count: usize) -> Result<Vec<GridFunction>> {
    (0..count)
        .map(|j| {
            let centre = 0.8 * 0.7f64.powi(j as i32);
            let b = log_bump(mesh, centre.max(0.08), 0.03);
            GridFunction::radial(mesh.clone(), times(&b, &cutoff(mesh)))
        })
        .collect()
}

/// Rescales radial `v` so that `int v^2 dvol = target` with the consistent mass.
pub fn normalize_radial(model: &ConeModel, mesh: &Arc<RadialMesh>, v: Vec<f64>, target: f64) -> Result<GridFunction> {
    let mass = assemble_parts(model, mesh, 0.0).mass;
    let q = mass.quad_form(&v);
    let s = (target / q).sqrt();
    GridFunction::radial(mesh.clone(), v.into_iter().map(|x| x * s).collect())
}

/// Unit-`L^2` positive functions `1e-3 + exp(-(r/s)^2)` with `s = L 2^{-j}`,
/// preceded by the constant.
pub fn concentrating_bumps(model: &ConeModel, mesh: &Arc<RadialMesh>, count: usize) -> Result<Vec<GridFunction>> {
    let mut out = vec![normalize_radial(model, mesh, vec![1.0; mesh.len()], 1.0)?];
    let outer = mesh.outer();
    for j in 0..count {
        let s = outer * 0.5f64.powi(j as i32);
        let v = mesh.nodes().iter().map(|r| 1e-3 + (-(r / s).powi(2)).exp()).collect();
        out.push(normalize_radial(model, mesh, v, 1.0)?);
    }
    Ok(out)
}

/// Seeded positive radial functions `exp(sum_k c_k cos(k pi t))` in the
/// normalized log-radius `t`, scaled to `int u^2 = target`.
pub fn random_positive(
    model: &ConeModel,
    mesh: &Arc<RadialMesh>,
    count: usize,
    seed: u64,
    target: f64,
) -> Result<Vec<GridFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = (0..mesh.len())
                .map(|i| {
                    let t = mesh.log_position(i);
                    let e: f64 = coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * (k as f64 * std::f64::consts::PI * t).cos())
                        .sum();
                    e.exp()
                })
                .collect();
            normalize_radial(model, mesh, v, target)
        })
        .collect()
}

/// Seeded signed functions with `modes` angular modes, not cut off.
pub fn random_signed(mesh: &Arc<RadialMesh>, count: usize, modes: usize, seed: u64) -> Result<Vec<GridFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = mesh.nodes();
    (0..count)
        .map(|_| {
            let data = (0..modes)
                .map(|_| {
                    let mut v = vec![0.0; mesh.len()];
                    for _ in 0..3 {
                        let c: f64 = rng.random_range(0.0..1.0);
                        let w: f64 = rng.random_range(0.05..0.5);
                        let amp: f64 = rng.random_range(-1.0..1.0);
                        let s: f64 = rng.random_range(0.0..1.5);
                        for (i, b) in log_bump(mesh, c, w).iter().enumerate() {
                            v[i] += amp * b * nodes[i].powf(s);
                        }
                    }
                    v
                })
                .collect();
            GridFunction::new(mesh.clone(), data)
        })
        .collect()
}
