//! Cell quadrature: Gauss–Legendre rules and closed-form power integrals.

use std::sync::OnceLock;

/// Points per cell. Exact for polynomials up to degree 31, which covers every
/// `P1 x P1 x r^{n-1}` integrand of the exact cone for `n <= 30`.
pub const CELL_POINTS: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k > 0);
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 1 { x } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

fn cell_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(CELL_POINTS))
}

/// `int_a^b f(r) dr` with the per-cell rule.
pub fn integrate_cell(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (x, w) = cell_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        acc += wi * f(mid + half * xi);
    }
    acc * half
}

/// Visits the quadrature points of `[a, b]` as `(r, weight)`.
pub fn for_each_point(a: f64, b: f64, mut f: impl FnMut(f64, f64)) {
    let (x, w) = cell_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (xi, wi) in x.iter().zip(w) {
        f(mid + half * xi, wi * half);
    }
}

/// `int_a^b r^s dr` for `0 < a <= b`, computed without cancellation.
pub fn power_integral(a: f64, b: f64, s: f64) -> f64 {
    let log_ratio = (b / a).ln();
    let e = s + 1.0;
    if e == 0.0 {
        return log_ratio;
    }
    a.powf(e) * (e * log_ratio).exp_m1() / e
}
