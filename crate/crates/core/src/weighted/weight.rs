use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::ConeModel;

/// The weight `chi`: `1/r` on the inner part of the conical neighborhood,
/// 1 away from it, C^2 in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightFunction {
    epsilon0: f64,
}

impl WeightFunction {
    /// Needs `0 < epsilon0 <= 1` so that `chi >= 1` everywhere.
    pub fn new(epsilon0: f64) -> Result<Self> {
        if !(epsilon0 > 0.0 && epsilon0 <= 1.0) {
            return Err(invalid(format!("epsilon0 must lie in (0, 1], got {epsilon0}")));
        }
        Ok(Self { epsilon0 })
    }

    /// `epsilon0 = min(L/2, 1)`.
    pub fn for_model(model: &ConeModel) -> Self {
        Self {
            epsilon0: (0.5 * model.outer_radius()).min(1.0),
        }
    }

    pub fn epsilon0(&self) -> f64 {
        self.epsilon0
    }

    pub fn eval(&self, r: f64) -> f64 {
        let inner = 0.25 * self.epsilon0;
        if r < inner {
            1.0 / r
        } else if r < self.epsilon0 {
            let s = smoothstep((r - inner) / (self.epsilon0 - inner));
            (1.0 - s) / r + s
        } else {
            1.0
        }
    }

    pub fn breakpoints(&self) -> [f64; 2] {
        [0.25 * self.epsilon0, self.epsilon0]
    }
}

/// Quintic smoothstep with vanishing first and second derivatives at both ends.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Which weight enters a weighted norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Weight {
    /// `r` itself, the weight of the model cone `C`.
    Cone,
    /// `chi`, the weight of the compact manifold.
    Manifold(WeightFunction),
    /// `chi = 1`, giving the usual Sobolev norms.
    Unweighted,
}

impl Weight {
    pub fn manifold(model: &ConeModel) -> Self {
        Weight::Manifold(WeightFunction::for_model(model))
    }

    pub fn chi(&self, r: f64) -> f64 {
        match self {
            Weight::Cone => 1.0 / r,
            Weight::Manifold(w) => w.eval(r),
            Weight::Unweighted => 1.0,
        }
    }
}

/// Radial integration range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Region {
    /// The whole mesh `[r_1, L]`.
    Full,
    /// The annulus `C_{lo, hi}`.
    Annulus(f64, f64),
}
