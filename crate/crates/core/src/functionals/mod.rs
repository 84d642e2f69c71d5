//! Perelman's F and W functionals, lambda and mu, and the inequality checks of the entropy theory.

pub mod checks;
pub mod entropy;
pub mod lambda;
pub mod mu;
pub mod solve;

pub use checks::{
    chain_constant, default_form_shift, inner_product_equivalence_check, log_sobolev_check,
    lower_bound_chain_check, ChainReport, InnerProductReport, LogSobolevReport,
};
pub use entropy::{f_functional, w_functional, DiscreteEntropy};
pub use lambda::lambda_functional;
pub use mu::{el_residual, mu_functional, ElResidual, MuSolverParams};
pub use solve::{SolveKind, SolveReport, SolveStatus};
