//! Graded radial meshes, P1 assembly of the radial forms and the smallest-eigenpair solver.

pub mod banded;
pub mod eigen;
pub mod mesh;
pub mod operator;
pub mod quadrature;

pub use banded::SymTridiag;
pub use eigen::{smallest_eigenpair, EigenPair};
pub use mesh::{Grading, RadialMesh};
pub use operator::{assemble_mode_operator, assemble_parts, FormParts, FormScaling, ModeOperator};
