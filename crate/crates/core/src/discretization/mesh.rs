use serde::{Deserialize, Serialize};

use super::quadrature::integrate_cell;
use crate::error::{invalid, Result};

/// Log-spacing constant of the automatic grading `q = exp(-2 / sqrt(M))`.
///
/// With it the tip depth `ln(L / r_1) = 2 (M - 1) / sqrt(M)` and the bulk
/// resolution both improve as `M` grows.
pub const AUTO_GRADING_SPAN: f64 = 2.0;

/// How the grading ratio is chosen for a given point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grading {
    Fixed(f64),
    Auto(AutoGrading),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoGrading {
    Auto,
}

impl Grading {
    pub fn auto() -> Self {
        Grading::Auto(AutoGrading::Auto)
    }

    pub fn ratio(&self, points: usize) -> f64 {
        match *self {
            Grading::Fixed(q) => q,
            Grading::Auto(_) => (-AUTO_GRADING_SPAN / (points as f64).sqrt()).exp(),
        }
    }
}

/// Geometric mesh `r_i = L q^{M-1-i}` on `[r_1, L]`; the tip `(0, r_1)` is truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh {
    nodes: Vec<f64>,
    grading: f64,
}

impl RadialMesh {
    pub fn geometric(outer: f64, points: usize, q: f64) -> Result<Self> {
        if !(outer > 0.0) || !outer.is_finite() {
            return Err(invalid(format!("outer radius must be positive, got {outer}")));
        }
        if points < 2 {
            return Err(invalid(format!("mesh needs at least 2 points, got {points}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("grading ratio must lie in (0, 1), got {q}")));
        }
        let lq = q.ln();
        let nodes: Vec<f64> = (0..points)
            .map(|i| outer * ((points - 1 - i) as f64 * lq).exp())
            .collect();
        if !(nodes[0] > 0.0) {
            return Err(invalid(format!(
                "tip radius underflows for M = {points}, q = {q}"
            )));
        }
        Ok(Self { nodes, grading: q })
    }

    pub fn with_grading(outer: f64, points: usize, grading: Grading) -> Result<Self> {
        Self::geometric(outer, points, grading.ratio(points))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn tip(&self) -> f64 {
        self.nodes[0]
    }

    pub fn outer(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.nodes[i + 1])
    }

    /// Index of the cell containing `r`, clamped to the mesh.
    pub fn locate(&self, r: f64) -> usize {
        let k = self.nodes.partition_point(|&x| x <= r);
        k.saturating_sub(1).min(self.cell_count() - 1)
    }

    /// Normalized log-radius `ln(r/r_1) / ln(L/r_1)` of node `i`, equal to `i/(M-1)`.
    pub fn log_position(&self, i: usize) -> f64 {
        i as f64 / (self.len() - 1) as f64
    }

    /// `w_i = int N_i r^{n-1} dr` for the hat functions `N_i`.
    pub fn nodal_weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        let e = n as i32 - 1;
        for i in 0..self.cell_count() {
            let (a, b) = self.cell(i);
            let h = b - a;
            w[i] += integrate_cell(a, b, |r| (b - r) / h * r.powi(e));
            w[i + 1] += integrate_cell(a, b, |r| (r - a) / h * r.powi(e));
        }
        w
    }

    /// `int_{r_1}^L f r^{n-1} dr` for the piecewise-linear interpolant of `values`.
    pub fn integrate_nodal(&self, values: &[f64], n: usize) -> f64 {
        assert_eq!(values.len(), self.len());
        self.nodal_weights(n)
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Same as [`integrate_nodal`](Self::integrate_nodal) plus the truncated tip
    /// cell `(0, r_1)` by the power rule `f(r_1) r_1^n / n`.
    pub fn integrate_with_tip(&self, values: &[f64], n: usize) -> f64 {
        let r1 = self.tip();
        self.integrate_nodal(values, n) + values[0] * r1.powi(n as i32) / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_meshes() {
        let m = RadialMesh::geometric(1.0, 2, 0.5).unwrap();
        assert_eq!(m.nodes(), &[0.5, 1.0]);
        let m = RadialMesh::geometric(1.0, 11, 0.5).unwrap();
        assert!((m.tip() - 2f64.powi(-10)).abs() < 1e-18);
        assert_eq!(m.outer(), 1.0);
    }

    #[test]
    fn grading_ratio_is_uniform() {
        let m = RadialMesh::with_grading(2.0, 512, Grading::auto()).unwrap();
        let q = m.grading();
        for w in m.nodes().windows(2) {
            assert!((w[0] / w[1] - q).abs() < 1e-12);
        }
        assert!((m.tip() - 2.0 * q.powi(511)).abs() <= 1e-12 * m.tip());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RadialMesh::geometric(0.0, 16, 0.5).is_err());
        assert!(RadialMesh::geometric(1.0, 1, 0.5).is_err());
        assert!(RadialMesh::geometric(1.0, 16, 1.0).is_err());
        assert!(RadialMesh::geometric(1.0, 16, 0.0).is_err());
    }

    #[test]
    fn ball_volume_with_tip_cell() {
        // |B^3| = 4 pi / 3
        for points in [256, 512, 1024] {
            let m = RadialMesh::with_grading(1.0, points, Grading::auto()).unwrap();
            let ones = vec![1.0; points];
            let v = 4.0 * PI * m.integrate_with_tip(&ones, 3);
            assert!((v - 4.0 * PI / 3.0).abs() < 1e-6);
        }
        let coarse = RadialMesh::geometric(1.0, 64, 0.9).unwrap();
        let v = 4.0 * PI * coarse.integrate_with_tip(&vec![1.0; 64], 3);
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn nodal_weights_exact_for_linear_integrands() {
        let m = RadialMesh::geometric(1.0, 40, 0.8).unwrap();
        // f(r) = r is reproduced exactly by P1, so int r * r^2 = (1 - r1^4)/4
        let vals: Vec<f64> = m.nodes().to_vec();
        let exact = (1.0 - m.tip().powi(4)) / 4.0;
        assert!((m.integrate_nodal(&vals, 3) - exact).abs() < 1e-15);
        assert!(m.nodal_weights(4).iter().all(|w| *w > 0.0));
    }

    #[test]
    fn locate_cells() {
        let m = RadialMesh::geometric(1.0, 5, 0.5).unwrap();
        assert_eq!(m.locate(1.0 / 16.0), 0);
        assert_eq!(m.locate(0.3), 2);
        assert_eq!(m.locate(1.0), 3);
        assert_eq!(m.locate(0.5), 3);
    }
}
