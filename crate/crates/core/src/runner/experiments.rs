use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::report::{Report, Series};
use crate::asymptotics::{
    default_window, fit_decay_exponent, indicial_roots, weighted_uniform_check, window_stability,
};
use crate::discretization::RadialMesh;
use crate::error::{LabError, Result};
use crate::families::{
    concentrating_bumps, hardy_extremal, hardy_family, random_positive, random_signed, tip_bumps,
};
use crate::functionals::{
    chain_constant, default_form_shift, inner_product_equivalence_check, lambda_functional,
    log_sobolev_check, lower_bound_chain_check, mu_functional, SolveReport, SolveStatus,
};
use crate::geometry::{ConeModel, OuterBc};
use crate::grid::GridFunction;
use crate::weighted::{
    dyadic_annulus_decompose, embedding_check, hardy_check, norm_equivalence_check,
    scaling_homogeneity_check, weighted_norm, weighted_norm_with, Region, Weight, WeightSpec,
    WeightFunction, HARDY_TOL,
};

/// Environment variable holding the work-pool size.
pub const THREADS_ENV: &str = "CONELAB_THREADS";
/// Constraint drift allowed after each projection of the mu solver.
pub const CONSTRAINT_TOL: f64 = 1e-10;
/// Floor below which a decreasing lambda sequence counts as divergent.
pub const DIVERGENCE_LEVEL: f64 = -100.0;
pub const SHARPNESS_EPS: f64 = 1e-3;
pub const SHARPNESS_LEVEL: f64 = 0.9;
pub const SCALING_TOL: f64 = 1e-8;
pub const ADDITIVITY_TOL: f64 = 1e-12;

fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .parse()
            .map_err(|_| LabError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| LabError::Config(format!("cannot build work pool: {e}")))
}

fn radius_tag(a: Option<f64>) -> String {
    a.map(|a| format!("a={a} ")).unwrap_or_default()
}

fn error_value(e: &LabError) -> Value {
    json!(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    Cauchy,
    Divergent,
    Inconclusive,
}

/// Classifies `lambda_M` listed by increasing `M`. Divergent: strictly decreasing
/// and ending below [`DIVERGENCE_LEVEL`]. Cauchy: increments shrinking in size,
/// or all below `1e-10` relative.
pub fn classify_sequence(values: &[f64]) -> Dichotomy {
    if values.len() < 3 || values.iter().any(|v| !v.is_finite()) {
        return Dichotomy::Inconclusive;
    }
    let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.iter().all(|d| *d < 0.0) && *values.last().unwrap() < DIVERGENCE_LEVEL {
        return Dichotomy::Divergent;
    }
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if steps.iter().all(|d| d.abs() <= 1e-10 * scale)
        || steps.windows(2).all(|w| w[1].abs() < w[0].abs())
    {
        return Dichotomy::Cauchy;
    }
    Dichotomy::Inconclusive
}

/// Expected behavior of `lambda_M`, none just below the threshold.
fn expected_dichotomy(model: &ConeModel) -> Option<Dichotomy> {
    let n = model.n() as f64;
    let rh = model.cross_section().scalar_curvature();
    if rh > n - 2.0 {
        Some(Dichotomy::Cauchy)
    } else if rh <= 0.75 * (n - 2.0) {
        Some(Dichotomy::Divergent)
    } else {
        None
    }
}

/// `lambda` over the grid of sphere radii and point counts.
pub fn run_lambda_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let sweep = cfg.sweep.clone();
    let radii: Vec<Option<f64>> = match sweep.as_ref().and_then(|s| s.a.clone()) {
        Some(a) => a.into_iter().map(Some).collect(),
        None => vec![cfg.sphere_radius()],
    };
    let mut points = sweep
        .and_then(|s| s.points)
        .unwrap_or_else(|| vec![cfg.mesh.points]);
    points.sort_unstable();
    points.dedup();
    let cells: Vec<(Option<f64>, usize)> = radii
        .iter()
        .flat_map(|a| points.iter().map(move |m| (*a, *m)))
        .collect();
    let solve = |a: Option<f64>, m: usize| -> Result<(ConeModel, Arc<RadialMesh>, SolveReport)> {
        let model = cfg.model_with(a)?;
        let mesh = Arc::new(cfg.mesh_with(m)?);
        let rep = lambda_functional(&model, mesh.clone(), cfg.solver.eigen_tol)?;
        Ok((model, mesh, rep))
    };
    let results: Vec<_> = pool()?.install(|| cells.par_iter().map(|(a, m)| solve(*a, *m)).collect());

    let mut report = Report::new("lambda-sweep", cfg);
    let mut groups = Vec::new();
    for a in &radii {
        let model = cfg.model_with(*a)?;
        let mut seq = Vec::new();
        for ((ca, m), res) in cells.iter().zip(&results) {
            if ca != a {
                continue;
            }
            match res {
                Ok((_, mesh, rep)) => {
                    report.row(json!({
                        "a": a, "points": m, "tip": mesh.tip(), "lambda": rep.value,
                        "mode": rep.mode, "residual": rep.el_residual,
                        "tolerance": rep.tolerance, "mode_values": rep.mode_values,
                    }));
                    report.check(
                        format!("eigen residual {}M={m}", radius_tag(*a)),
                        rep.el_residual <= rep.tolerance,
                        rep.el_residual,
                        rep.tolerance,
                    );
                    seq.push(rep.value);
                }
                Err(e) => {
                    report.row(json!({"a": a, "points": m, "error": error_value(e)}));
                    report.check_with(
                        format!("eigen solve {}M={m}", radius_tag(*a)),
                        false,
                        f64::NAN,
                        cfg.solver.eigen_tol,
                        Some(error_value(e)),
                    );
                }
            }
            if let Ok((_, _, rep)) = res {
                if rep.mode != 0 && model.is_exact() && a.is_some() {
                    report.check(format!("ground mode {}M={m}", radius_tag(*a)), false, rep.mode as f64, 0.0);
                }
            }
        }
        let class = classify_sequence(&seq);
        let expected = if points.len() >= 3 { expected_dichotomy(&model) } else { None };
        if let Some(exp) = expected {
            let last = seq.last().copied().unwrap_or(f64::NAN);
            let threshold = if exp == Dichotomy::Divergent { DIVERGENCE_LEVEL } else { 0.0 };
            report.check(format!("dichotomy {}{exp:?}", radius_tag(*a)), class == exp, last, threshold);
        }
        groups.push(json!({
            "a": a,
            "R_h0": model.cross_section().scalar_curvature(),
            "threshold_margin": model.threshold_margin(),
            "points": points,
            "lambda": seq,
            "classification": class,
            "expected": expected,
        }));
    }
    report.summary = json!({ "dichotomy": groups });
    Ok(report)
}

fn flat_constant_value(model: &ConeModel, tau: f64) -> Option<f64> {
    let n = model.n() as f64;
    let cs = model.cross_section();
    let flat = model.is_exact()
        && model.outer_bc() == OuterBc::Neumann
        && (cs.scalar_curvature() - (n - 1.0) * (n - 2.0)).abs() <= 1e-12 * cs.scalar_curvature().abs().max(1.0);
    if !flat {
        return None;
    }
    let vol = cs.volume() * model.outer_radius().powf(n) / n;
    let c = (4.0 * PI * tau).powf(n / 4.0) / vol.sqrt();
    Some(-2.0 * c.ln() - n)
}

fn solve_mu_all(cfg: &ExperimentConfig) -> Result<(ConeModel, Vec<f64>, Vec<Result<SolveReport>>)> {
    let model = cfg.model()?;
    let taus = cfg.taus()?;
    let mesh = Arc::new(cfg.mesh_with(cfg.mesh.points)?);
    let params = cfg.solver.mu_params();
    let results = pool()?.install(|| {
        taus.par_iter()
            .map(|t| mu_functional(&model, mesh.clone(), *t, &params))
            .collect()
    });
    Ok((model, taus, results))
}

fn label(tau: f64) -> String {
    format!("tau_{tau}")
}

/// Records the outcome of one mu solve; returns the converged report, if any.
fn mu_rows<'a>(
    report: &mut Report,
    model: &ConeModel,
    tau: f64,
    res: &'a Result<SolveReport>,
) -> Option<&'a SolveReport> {
    match res {
        Ok(rep) => {
            let el_tol = rep.tolerance * rep.value.abs().max(1.0);
            report.row(json!({
                "tau": tau, "status": rep.status, "mu": rep.value,
                "el_residual": rep.el_residual, "el_tolerance": el_tol,
                "printed_el_residual": rep.printed_el_residual,
                "constraint_error": rep.constraint_error, "constraint_tolerance": CONSTRAINT_TOL,
                "iterations": rep.iterations, "supercritical": rep.supercritical,
                "radial_upper_bound": true,
            }));
            report.series.push(Series {
                label: label(tau),
                function: rep.minimizer.clone(),
            });
            match rep.status {
                SolveStatus::Converged => {
                    report.check(format!("el residual tau={tau}"), rep.el_residual <= el_tol, rep.el_residual, el_tol);
                    report.check(
                        format!("constraint tau={tau}"),
                        rep.constraint_error <= CONSTRAINT_TOL,
                        rep.constraint_error,
                        CONSTRAINT_TOL,
                    );
                    if let Some(exact) = flat_constant_value(model, tau) {
                        let err = (rep.value - exact).abs();
                        report.check(format!("constant critical point tau={tau}"), err <= 1e-8, err, 1e-8);
                    }
                    Some(rep)
                }
                SolveStatus::Diverging => {
                    report.check(
                        format!("divergence only when supercritical tau={tau}"),
                        rep.supercritical,
                        rep.value,
                        crate::functionals::mu::DIVERGENCE_FLOOR,
                    );
                    None
                }
            }
        }
        Err(e) => {
            report.row(json!({"tau": tau, "error": error_value(e)}));
            report.check_with(format!("mu solve tau={tau}"), false, f64::NAN, 0.0, Some(error_value(e)));
            None
        }
    }
}

fn decay_value(model: &ConeModel, u: &GridFunction) -> Value {
    match fit_decay_exponent(u, model, default_window(model, u)) {
        Ok(fit) => json!(fit),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Minimizes `W` for every configured `tau`.
pub fn run_mu_solve(cfg: &ExperimentConfig) -> Result<Report> {
    let (model, taus, results) = solve_mu_all(cfg)?;
    let mut report = Report::new("mu-solve", cfg);
    let mut fits = Vec::new();
    for (tau, res) in taus.iter().zip(&results) {
        if let Some(rep) = mu_rows(&mut report, &model, *tau, res) {
            let fit = decay_value(&model, &rep.minimizer);
            if let Ok(f) = fit_decay_exponent(&rep.minimizer, &model, default_window(&model, &rep.minimizer)) {
                if model.is_subcritical() {
                    report.check(
                        format!("decay bound tau={tau}"),
                        f.theorem_consistent,
                        f.fitted_exponent,
                        f.bound,
                    );
                }
            }
            fits.push(json!({ "tau": tau, "decay": fit }));
        }
    }
    report.summary = json!({
        "subcritical": model.is_subcritical(),
        "threshold_margin": model.threshold_margin(),
        "decay": fits,
    });
    Ok(report)
}

/// Minimizes `W` and studies the minimizer near the tip.
pub fn run_decay_fit(cfg: &ExperimentConfig) -> Result<Report> {
    let (model, taus, results) = solve_mu_all(cfg)?;
    let mut report = Report::new("decay-fit", cfg);
    let roots = indicial_roots(&model, 0).ok();
    let mut entries = Vec::new();
    for (tau, res) in taus.iter().zip(&results) {
        let Some(rep) = mu_rows(&mut report, &model, *tau, res) else {
            continue;
        };
        let u = &rep.minimizer;
        let window = default_window(&model, u);
        let fit = match fit_decay_exponent(u, &model, window) {
            Ok(f) => f,
            Err(e) => {
                report.check_with(format!("decay fit tau={tau}"), false, f64::NAN, 0.0, Some(error_value(&e)));
                continue;
            }
        };
        let stability = window_stability(u, &model);
        let delta = fit.bound + 0.1;
        let uniform: Vec<_> = (0..=1).map(|l| weighted_uniform_check(u, &model, l, delta)).collect();
        if model.is_subcritical() {
            report.check(format!("decay bound tau={tau}"), fit.theorem_consistent, fit.fitted_exponent, fit.bound);
            if let Some(gap) = fit.indicial_gap() {
                report.check(format!("indicial gap tau={tau}"), gap <= 0.05, gap, 0.05);
            }
            match &stability {
                Ok(s) => report.check(
                    format!("window stability tau={tau}"),
                    s.stable,
                    s.spread,
                    crate::asymptotics::WINDOW_STABILITY_TOL,
                ),
                Err(e) => report.check_with(
                    format!("window stability tau={tau}"),
                    false,
                    f64::NAN,
                    crate::asymptotics::WINDOW_STABILITY_TOL,
                    Some(error_value(e)),
                ),
            }
            for (l, res) in uniform.iter().enumerate() {
                match res {
                    Ok(r) => {
                        let shrink = r.windows[3].2 / r.windows[0].2;
                        report.check(format!("uniform decay l={l} tau={tau}"), r.vanishing, shrink, 0.5)
                    }
                    Err(e) => report.check_with(
                        format!("uniform decay l={l} tau={tau}"),
                        false,
                        f64::NAN,
                        0.5,
                        Some(error_value(e)),
                    ),
                }
            }
        }
        entries.push(json!({
            "tau": tau,
            "fit": fit,
            "stability": stability.as_ref().map(|s| json!(s)).unwrap_or_else(error_value),
            "uniform": uniform.iter().map(|r| r.as_ref().map(|v| json!(v)).unwrap_or_else(error_value)).collect::<Vec<_>>(),
            "delta": delta,
        }));
    }
    report.summary = json!({
        "indicial_roots": roots,
        "subcritical": model.is_subcritical(),
        "fits": entries,
    });
    Ok(report)
}

fn witness(u: &GridFunction) -> Value {
    json!({ "r": u.mesh().nodes(), "modes": u.modes() })
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

type Section = (Vec<Value>, Vec<(String, bool, f64, f64, Option<Value>)>);

fn hardy_section(exact: &ConeModel, mesh: &Arc<RadialMesh>, seed: u64) -> Result<Section> {
    let n = exact.n();
    let family = hardy_family(mesh, seed)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (p, k) in [(2.0, 1usize), (3.0, 1), (1.5, 1), (2.0, 2)] {
        if (p * k as f64 - n as f64).abs() < 1e-12 {
            continue;
        }
        let mut worst: Option<(f64, usize)> = None;
        let mut all = true;
        for (i, u) in family.iter().enumerate() {
            let r = hardy_check(u, exact, p, k)?;
            rows.push(json!({"check": "hardy", "p": p, "k": k, "index": i, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio, "satisfied": r.satisfied}));
            all &= r.satisfied;
            if worst.is_none_or(|(w, _)| r.ratio > w) {
                worst = Some((r.ratio, i));
            }
        }
        let (ratio, idx) = worst.unwrap_or((0.0, 0));
        let wit = (!all).then(|| witness(&family[idx]));
        checks.push((format!("hardy validity p={p} k={k}"), all, ratio, 1.0 + HARDY_TOL, wit));
    }
    let ext = hardy_extremal(mesh, n, 2.0, 1, SHARPNESS_EPS)?;
    let r = hardy_check(&ext, exact, 2.0, 1)?;
    rows.push(json!({"check": "hardy_sharpness", "eps": SHARPNESS_EPS, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio}));
    checks.push(("hardy sharpness p=2 k=1".into(), r.ratio >= SHARPNESS_LEVEL, r.ratio, SHARPNESS_LEVEL, None));
    Ok((rows, checks))
}

fn scaling_section(exact: &ConeModel, mesh: &Arc<RadialMesh>, seed: u64) -> Result<Section> {
    let mut funcs = vec![
        GridFunction::from_fn(mesh.clone(), |_| 1.0)?,
        GridFunction::from_fn(mesh.clone(), |r| r * (3.0 * r.ln()).sin() + 2.0)?,
    ];
    funcs.extend(random_signed(mesh, 2, 2, seed ^ 0x5ca1e)?);
    let outer = mesh.outer();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (fi, u) in funcs.iter().enumerate() {
        for a in [0.5, 0.25, 0.8] {
            for delta in [-1.0, 0.0, 0.5, 1.0] {
                for k in [0usize, 1] {
                    for p in [1.0, 2.0] {
                        let spec = WeightSpec::new(k, p, delta)?;
                        let (r1, r2) = (0.3 * outer, 0.9 * outer);
                        let rep = scaling_homogeneity_check(u, exact, spec, a, r1, r2)?;
                        worst = worst.max(rep.rel_err);
                        rows.push(json!({"check": "scaling", "function": fi, "a": a, "delta": delta, "k": k, "p": p, "lhs": rep.lhs, "rhs": rep.rhs, "rel_err": rep.rel_err}));
                    }
                }
            }
        }
    }
    let checks = vec![("scaling homogeneity".to_string(), worst <= SCALING_TOL, worst, SCALING_TOL, None)];
    Ok((rows, checks))
}

fn norm_section(model: &ConeModel, mesh: &Arc<RadialMesh>, seed: u64) -> Result<Section> {
    let n = model.n() as f64;
    let mut family = random_signed(mesh, 20, 2, seed ^ 0x0e0)?;
    family.extend(tip_bumps(mesh, 8)?);
    let mut rows = Vec::new();
    let mut checks = Vec::new();

    let mut ordering_ok = true;
    let mut worst = 0.0f64;
    for k in 0..=2usize {
        for p in [2.0, 1.5, 3.0] {
            if (1..=k).any(|i| (p * i as f64 - n).abs() < 1e-12) {
                continue;
            }
            let mut ratios = Vec::new();
            for u in &family {
                let r = norm_equivalence_check(u, model, k, p)?;
                ordering_ok &= r.lower_ok;
                if r.weighted > 0.0 {
                    worst = worst.max(r.plain / r.weighted);
                }
                ratios.push(r.ratio);
            }
            rows.push(json!({"check": "weight_ordering", "k": k, "p": p, "max_ratio": max_of(ratios.iter().copied()), "ratios": ratios}));
        }
    }
    checks.push(("weight ordering".into(), ordering_ok, worst, 1.0, None));

    let pairs = random_signed(mesh, 40, 2, seed ^ 0x9a1)?;
    let specs = [
        WeightSpec::new(0, 2.0, 0.0)?,
        WeightSpec::new(1, 2.0, 1.0 - n / 2.0)?,
        WeightSpec::new(2, 2.0, 2.0 - n / 2.0)?,
        WeightSpec::new(1, 1.0, -1.0)?,
        WeightSpec::new(1, 3.0, 0.5)?,
    ];
    for spec in specs {
        let mut triangle = true;
        let mut homogeneous = true;
        let mut positive = true;
        let mut worst_tri = f64::NEG_INFINITY;
        let mut worst_hom = 0.0f64;
        for (i, pair) in pairs.chunks(2).enumerate() {
            let (u, v) = (&pair[0], &pair[1]);
            let nu = weighted_norm(u, spec, model)?;
            let nv = weighted_norm(v, spec, model)?;
            let nuv = weighted_norm(&u.add(v)?, spec, model)?;
            let c = -1.75 + 0.3 * i as f64;
            let nc = weighted_norm(&u.scale(c), spec, model)?;
            let tri = nuv / (nu + nv);
            worst_tri = worst_tri.max(tri);
            triangle &= nuv <= (nu + nv) * (1.0 + 1e-12);
            let hom = (nc - c.abs() * nu).abs() / (c.abs() * nu);
            worst_hom = worst_hom.max(hom);
            homogeneous &= hom <= 1e-12;
            positive &= nu > 0.0 && nv > 0.0;
        }
        rows.push(json!({"check": "norm_axioms", "spec": spec, "max_triangle_ratio": worst_tri, "max_homogeneity_err": worst_hom}));
        let tag = format!("k={} p={} delta={}", spec.k, spec.p, spec.delta);
        checks.push((format!("triangle {tag}"), triangle, worst_tri, 1.0, None));
        checks.push((format!("homogeneity {tag}"), homogeneous, worst_hom, 1e-12, None));
        checks.push((format!("positivity {tag}"), positive, 0.0, 0.0, None));
    }

    let eps = WeightFunction::for_model(model).epsilon0();
    let annuli = dyadic_annulus_decompose(eps, 6)?;
    let spec = WeightSpec::sobolev_h(1, model.n());
    let weight = Weight::manifold(model);
    let mut worst_add = 0.0f64;
    for u in family.iter().take(5) {
        let union = weighted_norm_with(u, spec, model, weight, Region::Annulus(annuli[5].0, eps))?.powf(spec.p);
        let parts: f64 = annuli
            .iter()
            .map(|(lo, hi)| weighted_norm_with(u, spec, model, weight, Region::Annulus(*lo, *hi)).map(|v| v.powf(spec.p)))
            .sum::<Result<f64>>()?;
        let err = if union > 0.0 { (union - parts).abs() / union } else { parts };
        worst_add = worst_add.max(err);
    }
    rows.push(json!({"check": "dyadic_additivity", "annuli": annuli, "max_rel_err": worst_add}));
    checks.push(("dyadic additivity".into(), worst_add <= ADDITIVITY_TOL, worst_add, ADDITIVITY_TOL, None));

    let from = WeightSpec::sobolev_h(1, model.n());
    let q = 2.0 * n / (n - 2.0);
    let mut finite = true;
    for (label, to) in [("l2", WeightSpec::new(0, 2.0, from.delta)?), ("critical", WeightSpec::new(0, q, from.delta)?)] {
        let mut ratios = Vec::new();
        for u in &family {
            let r = embedding_check(u, model, from, to)?;
            finite &= r.ratio.is_finite();
            ratios.push(r.ratio);
        }
        rows.push(json!({"check": "embedding", "target": label, "q": to.p, "max_ratio": max_of(ratios.iter().copied()), "ratios": ratios}));
    }
    checks.push(("embedding ratios finite".into(), finite, 0.0, 0.0, None));
    Ok((rows, checks))
}

fn entropy_section(model: &ConeModel, mesh: &Arc<RadialMesh>, tau: f64, seed: u64) -> Result<Section> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let bumps = concentrating_bumps(model, mesh, 10)?;
    let a_values = [0.1, 0.5, 1.0];
    let mut consts = Vec::new();
    for a in a_values {
        let r = log_sobolev_check(model, a, &bumps)?;
        rows.push(json!({"check": "log_sobolev", "a": a, "empirical_c": r.empirical_c, "argmax": r.argmax, "values": r.values}));
        consts.push(r.empirical_c);
    }
    let finite = consts.iter().all(|c| c.is_finite());
    let monotone = consts.windows(2).all(|w| w[1] <= w[0]);
    checks.push(("log-Sobolev constant finite".into(), finite, max_of(consts.iter().copied()), f64::INFINITY, None));
    checks.push(("log-Sobolev constant nonincreasing in a".into(), monotone, consts[consts.len() - 1] - consts[0], 0.0, None));

    let target = (4.0 * PI * tau).powf(model.n() as f64 / 2.0);
    let positives = random_positive(model, mesh, 20, seed ^ 0xc4a1, target)?;
    let mut family = bumps;
    for u in &positives {
        family.push(u.scale(target.sqrt().recip()));
    }
    let mut all = true;
    let mut worst = f64::INFINITY;
    for a in a_values {
        let c_a = chain_constant(model, a, &family)?;
        for (i, u) in positives.iter().enumerate() {
            let r = lower_bound_chain_check(model, u, tau, a, c_a)?;
            all &= r.holds;
            worst = worst.min(r.w_value - r.bound);
            rows.push(json!({"check": "lower_bound_chain", "a": a, "tau": tau, "index": i, "c_a": c_a, "w": r.w_value, "bound": r.bound, "holds": r.holds}));
        }
    }
    checks.push(("lower-bound chain".into(), all, worst, 0.0, None));

    if model.is_subcritical() {
        let shift = default_form_shift(model, mesh.nodes());
        let mut fam = random_signed(mesh, 20, 2, seed ^ 0x1b)?;
        fam.extend(tip_bumps(mesh, 8)?);
        match inner_product_equivalence_check(model, shift, &fam) {
            Ok(r) => {
                let ok = r.c1_hat > 0.0 && r.c1_hat <= r.c2_hat && r.c2_hat.is_finite();
                rows.push(json!({"check": "inner_product_equivalence", "A": shift, "c1_hat": r.c1_hat, "c2_hat": r.c2_hat, "form_floor": r.form_floor}));
                checks.push(("inner-product equivalence".into(), ok, r.c2_hat / r.c1_hat, f64::INFINITY, None));
            }
            Err(e) => {
                rows.push(json!({"check": "inner_product_equivalence", "A": shift, "error": error_value(&e)}));
                checks.push(("inner-product equivalence".into(), false, f64::NAN, f64::INFINITY, Some(error_value(&e))));
            }
        }
    } else {
        rows.push(json!({"check": "inner_product_equivalence", "skipped": "supercritical model"}));
    }
    Ok((rows, checks))
}

/// Every inequality check over the built-in families.
pub fn run_inequality_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let model = cfg.model()?;
    let exact = model.exact_counterpart();
    let mesh = Arc::new(cfg.mesh_with(cfg.mesh.points)?);
    let tau = cfg.tau.as_ref().map(|t| t.values()[0]).unwrap_or(1.0);
    let seed = cfg.seed;
    type Job<'a> = Box<dyn Fn() -> Result<Section> + Send + Sync + 'a>;
    let jobs: Vec<Job> = vec![
        Box::new(|| hardy_section(&exact, &mesh, seed)),
        Box::new(|| scaling_section(&exact, &mesh, seed)),
        Box::new(|| norm_section(&model, &mesh, seed)),
        Box::new(|| entropy_section(&model, &mesh, tau, seed)),
    ];
    let sections: Vec<Result<Section>> = pool()?.install(|| jobs.par_iter().map(|j| j()).collect());
    let mut report = Report::new("inequalities", cfg);
    let names = ["hardy", "scaling", "norms", "entropy"];
    for (name, section) in names.iter().zip(sections) {
        match section {
            Ok((rows, checks)) => {
                for r in rows {
                    report.row(r);
                }
                for (c, ok, obs, thr, wit) in checks {
                    report.check_with(c, ok, obs, thr, wit);
                }
            }
            Err(e) => {
                report.row(json!({"check": name, "error": error_value(&e)}));
                report.check_with(format!("{name} section"), false, f64::NAN, 0.0, Some(error_value(&e)));
            }
        }
    }
    report.summary = json!({
        "tau": tau,
        "mesh_points": mesh.len(),
        "tip": mesh.tip(),
        "checks": report.checks.len(),
        "failed": report.checks.iter().filter(|c| !c.passed).count(),
    });
    Ok(report)
}
