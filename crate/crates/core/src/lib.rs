//! Numerical laboratory for Perelman's entropy functionals on warped cones with an
//! isolated conical tip.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod discretization;
pub mod error;
pub mod families;
pub mod geometry;
pub mod functionals;
pub mod grid;
pub mod runner;
pub mod weighted;

pub use error::{LabError, Result};
pub use geometry::{ConeModel, CrossSection, OuterBc, Warp};
pub use grid::GridFunction;
