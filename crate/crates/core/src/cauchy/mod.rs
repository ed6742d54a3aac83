//! Elliptic Cauchy problem on the annulus `1/2 < r < 1`: recover the trace on
//! the right half of the outer circle from Cauchy data on the left half.

pub mod bvp;
pub mod mesh;
pub mod operators;

pub use bvp::{solve_mixed_bvp, BcKind, BcPattern, Condition, Field, MixedBvpSolver, MixedBvpSpec};
pub use mesh::{AnnulusGrid, BoundaryTrace, Segment};
pub use operators::{eta_blend, eta_linear, CauchyOperators, KmStatus, KmVariant, KozlovMazya, STALL_GAIN, STALL_WINDOW};
