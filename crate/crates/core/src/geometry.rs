//! Cross sections and warped cone metrics `dr^2 + phi(r)^2 h0` over `(0, L] x N`.
//!
//! Cross sections are carried as spectral data only: dimension, scalar
//! curvature, volume and the distinct eigenvalues of the Laplacian. Every
//! quantity the radial solvers consume factors through this data once a
//! function is expanded in cross-section eigenfunctions.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};

/// Number of cross-section modes kept by default.
pub const DEFAULT_MODE_COUNT: usize = 8;

/// Spectral and curvature data of a compact cross section `(N^{n-1}, h0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossSection {
    dim: usize,
    scalar_curvature: f64,
    volume: f64,
    eigenvalues: Vec<f64>,
}

impl CrossSection {
    /// Round sphere of radius `a` and dimension `n - 1`, with the first `modes`
    /// distinct Laplace eigenvalues `l (l + n - 2) / a^2`.
    pub fn round_sphere(n: usize, a: f64, modes: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("cone dimension n = {n} must be at least 3")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(invalid(format!("sphere radius must be positive, got {a}")));
        }
        if modes == 0 {
            return Err(invalid("at least one mode is required"));
        }
        let dim = n - 1;
        let a2 = a * a;
        let eigenvalues = (0..modes)
            .map(|l| (l * (l + dim - 1)) as f64 / a2)
            .collect();
        Ok(Self {
            dim,
            scalar_curvature: (dim * (dim - 1)) as f64 / a2,
            volume: unit_sphere_volume(dim) * a.powi(dim as i32),
            eigenvalues,
        })
    }

    /// Arbitrary cross section given by its data. The eigenvalue list must start
    /// with a single zero (connected `N`) and be ascending.
    pub fn from_spectrum(
        n: usize,
        scalar_curvature: f64,
        volume: f64,
        eigenvalues: Vec<f64>,
    ) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("cone dimension n = {n} must be at least 3")));
        }
        if !scalar_curvature.is_finite() {
            return Err(LabError::NonFinite("scalar curvature"));
        }
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(invalid(format!("cross-section volume must be positive, got {volume}")));
        }
        match eigenvalues.first() {
            Some(&v) if v == 0.0 => {}
            _ => return Err(invalid("eigenvalue list must start with 0")),
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite("cross-section eigenvalues"));
        }
        if eigenvalues.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid(
                "eigenvalues must be strictly ascending with a single zero",
            ));
        }
        Ok(Self {
            dim: n - 1,
            scalar_curvature,
            volume,
            eigenvalues,
        })
    }

    /// Dimension of the cross section, `n - 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cone_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.scalar_curvature
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Round-sphere cross section with [`DEFAULT_MODE_COUNT`] modes.
pub fn make_round_sphere_cross_section(n: usize, a: f64) -> Result<CrossSection> {
    CrossSection::round_sphere(n, a, DEFAULT_MODE_COUNT)
}

/// Volume of the unit sphere `S^dim`.
pub fn unit_sphere_volume(dim: usize) -> f64 {
    use std::f64::consts::PI;
    // |S^0| = 2, |S^1| = 2 pi, |S^m| = 2 pi / (m - 1) |S^{m-2}|
    let mut v = if dim.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut m = if dim.is_multiple_of(2) { 0 } else { 1 };
    while m < dim {
        m += 2;
        v *= 2.0 * PI / (m - 1) as f64;
    }
    v
}

/// Radial profile of the cross-section metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Warp {
    /// `h_r = h0`, so `phi(r) = r`.
    Exact,
    /// `h_r = (1 + c r^alpha) h0`, so `phi(r) = r sqrt(1 + c r^alpha)`.
    Perturbed { alpha: f64, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBc {
    Neumann,
    Dirichlet,
}

/// A finite warped cone closed off at `r = L` by a boundary condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeModel {
    n: usize,
    cross_section: CrossSection,
    outer_radius: f64,
    warp: Warp,
    outer_bc: OuterBc,
}

/// Outcome of the asymptotic-tameness check on `h_r - h0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcReport {
    pub holds: bool,
    /// Supremum of `r^{i-1} |d^i/dr^i (h_r - h0)|` for `i = 1..=k` (infinite when unbounded).
    pub constants: Vec<f64>,
    /// Largest value seen on a geometric sample of radii down to `1e-12 L`.
    pub observed: Vec<f64>,
}

impl ConeModel {
    pub fn new(
        cross_section: CrossSection,
        outer_radius: f64,
        warp: Warp,
        outer_bc: OuterBc,
    ) -> Result<Self> {
        if !(outer_radius > 0.0) || !outer_radius.is_finite() {
            return Err(invalid(format!("outer radius must be positive, got {outer_radius}")));
        }
        if let Warp::Perturbed { alpha, c } = warp {
            if !(alpha > 0.0) || !alpha.is_finite() || !c.is_finite() {
                return Err(invalid(format!(
                    "perturbation needs alpha > 0 and finite c, got alpha = {alpha}, c = {c}"
                )));
            }
            // 1 + c r^alpha must stay positive on (0, L]
            if 1.0 + c.min(0.0) * outer_radius.powf(alpha) <= 0.0 {
                return Err(invalid(format!(
                    "perturbation 1 + c r^alpha degenerates on (0, {outer_radius}]"
                )));
            }
        }
        Ok(Self {
            n: cross_section.cone_dim(),
            cross_section,
            outer_radius,
            warp,
            outer_bc,
        })
    }

    /// Exact cone over a round sphere of radius `a`.
    pub fn round_cone(n: usize, a: f64, outer_radius: f64, outer_bc: OuterBc) -> Result<Self> {
        Self::new(
            make_round_sphere_cross_section(n, a)?,
            outer_radius,
            Warp::Exact,
            outer_bc,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cross_section(&self) -> &CrossSection {
        &self.cross_section
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn warp(&self) -> Warp {
        self.warp
    }

    pub fn outer_bc(&self) -> OuterBc {
        self.outer_bc
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.warp, Warp::Exact)
    }

    /// Same cone with a different outer boundary condition.
    pub fn with_outer_bc(&self, outer_bc: OuterBc) -> Self {
        Self {
            outer_bc,
            ..self.clone()
        }
    }

    /// Unperturbed cone over the same cross section.
    pub fn exact_counterpart(&self) -> Self {
        Self {
            warp: Warp::Exact,
            ..self.clone()
        }
    }

    /// `R_{h0} - (n - 2)`; the finiteness theory needs this strictly positive.
    pub fn threshold_margin(&self) -> f64 {
        self.cross_section.scalar_curvature - (self.n as f64 - 2.0)
    }

    pub fn is_subcritical(&self) -> bool {
        self.threshold_margin() > 0.0
    }

    /// `phi(r)`.
    pub fn warp_factor(&self, r: f64) -> f64 {
        match self.warp {
            Warp::Exact => r,
            Warp::Perturbed { alpha, c } => r * (1.0 + c * r.powf(alpha)).sqrt(),
        }
    }

    /// `(phi, phi', phi'')` at `r`.
    pub fn warp_jet(&self, r: f64) -> (f64, f64, f64) {
        match self.warp {
            Warp::Exact => (r, 1.0, 0.0),
            Warp::Perturbed { alpha, c } => {
                let w = 1.0 + c * r.powf(alpha);
                let dw = c * alpha * r.powf(alpha - 1.0);
                let ddw = c * alpha * (alpha - 1.0) * r.powf(alpha - 2.0);
                let phi = r * w.sqrt();
                // (ln phi)' = 1/r + w'/(2w)
                let dlog = 1.0 / r + dw / (2.0 * w);
                let ddlog = -1.0 / (r * r) + ddw / (2.0 * w) - dw * dw / (2.0 * w * w);
                (phi, phi * dlog, phi * (dlog * dlog + ddlog))
            }
        }
    }

    /// Scalar curvature of the cone metric at radius `r`.
    pub fn scalar_curvature_at(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r > self.outer_radius {
            return Err(LabError::RadiusOutOfRange {
                r,
                outer: self.outer_radius,
            });
        }
        Ok(self.scalar_curvature_unchecked(r))
    }

    pub(crate) fn scalar_curvature_unchecked(&self, r: f64) -> f64 {
        match self.warp {
            Warp::Exact => {
                let m = self.cross_section.dim as f64;
                (self.cross_section.scalar_curvature - m * (m - 1.0)) / (r * r)
            }
            Warp::Perturbed { .. } => {
                let (phi, dphi, ddphi) = self.warp_jet(r);
                warped_scalar_curvature(
                    self.cross_section.scalar_curvature,
                    self.cross_section.dim,
                    phi,
                    dphi,
                    ddphi,
                )
            }
        }
    }

    /// Checks `r^{i-1} |grad^i (h_r - h0)| <= C_i` for `i = 1..=k`.
    ///
    /// The tensor norm of `h0` against itself is `sqrt(n - 1)`, which is the
    /// norm factor attached to the scalar profile `c r^alpha`.
    pub fn check_ac_condition(&self, k: usize) -> Result<AcReport> {
        if k == 0 {
            return Err(invalid("AC order k must be at least 1"));
        }
        let (alpha, c) = match self.warp {
            Warp::Exact => {
                return Ok(AcReport {
                    holds: true,
                    constants: vec![0.0; k],
                    observed: vec![0.0; k],
                })
            }
            Warp::Perturbed { alpha, c } => (alpha, c),
        };
        let norm = (self.cross_section.dim as f64).sqrt();
        let big_l = self.outer_radius;
        let mut constants = Vec::with_capacity(k);
        let mut observed = Vec::with_capacity(k);
        for i in 1..=k {
            // d^i/dr^i (c r^alpha) = c * alpha (alpha-1) ... (alpha-i+1) r^{alpha-i}
            let falling: f64 = (0..i).map(|m| alpha - m as f64).product();
            let coeff = (c * falling).abs() * norm;
            // r^{i-1} r^{alpha-i} = r^{alpha-1}
            let sup = if coeff == 0.0 {
                0.0
            } else if alpha >= 1.0 {
                coeff * big_l.powf(alpha - 1.0)
            } else {
                f64::INFINITY
            };
            let sampled = (0..=240)
                .map(|s| big_l * 10f64.powf(-(s as f64) / 20.0))
                .map(|r| coeff * r.powf(alpha - 1.0))
                .fold(0.0, f64::max);
            constants.push(sup);
            observed.push(sampled);
        }
        Ok(AcReport {
            holds: constants.iter().all(|c| c.is_finite()),
            constants,
            observed,
        })
    }
}

/// Scalar curvature of `dr^2 + phi(r)^2 h` where `h` has dimension `m` and
/// scalar curvature `fiber_curvature`:
/// `R = R_h / phi^2 - 2 m phi''/phi - m (m - 1) (phi'/phi)^2`.
pub fn warped_scalar_curvature(fiber_curvature: f64, m: usize, phi: f64, dphi: f64, ddphi: f64) -> f64 {
    let m = m as f64;
    fiber_curvature / (phi * phi) - 2.0 * m * ddphi / phi - m * (m - 1.0) * (dphi / phi).powi(2)
}
