use serde::Serialize;

use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveKind {
    Lambda,
    Mu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// The objective fell below the divergence floor; expected when the model
    /// violates the curvature threshold.
    Diverging,
}

/// Outcome of a `lambda` or `mu` computation.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub kind: SolveKind,
    pub status: SolveStatus,
    /// `lambda`, or the `mu` estimate `m` (an upper bound for `mu` over the radial subspace).
    pub value: f64,
    pub tau: Option<f64>,
    /// Angular mode of the minimizer.
    pub mode: usize,
    pub minimizer: GridFunction,
    pub el_residual: f64,
    /// Same residual for the printed Euler–Lagrange equation, diagnostic only.
    pub printed_el_residual: Option<f64>,
    pub constraint_error: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub tolerance: f64,
    pub supercritical: bool,
    /// Smallest eigenvalue per mode (lambda runs only).
    pub mode_values: Vec<f64>,
}
