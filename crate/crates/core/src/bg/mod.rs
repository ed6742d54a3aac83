//! Backus–Gilbert weight systems, reconstructions and error diagnostics.

pub mod budget;
pub mod classical;
pub mod extended;
pub mod profile;
pub mod system;

pub use budget::{error_budget, spline_distance, BudgetInput, ErrorBudget};
pub use classical::classical_bg_weights;
pub use extended::{adjoint_gram, extended_bg_weights, extended_objective, psd_part};
pub use profile::{apply_all, iterative_refinement, reconstruct_profile, Profile, ProfileSolver};
pub use system::{
    assemble_adjoint_system, reconstruct_value, solve_weights, AssembledSystem, LeastSquaresSolver, MomentMatrix,
    Target, WeightVector, CONDITION_LIMIT,
};
