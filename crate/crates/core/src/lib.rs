//! Backus–Gilbert reconstruction of linear functionals from moment data of a
//! quadratic Volterra operator, plus an annulus Cauchy problem solved with
//! sentinels and Hadamard's ill-posedness example.
//!
//! Everything numerical is generic over [`scalar::Real`]; the aliases below
//! fix the scalar to `f64`.

pub mod bg;
pub mod bspline;
pub mod cauchy;
pub mod error;
pub mod grid;
pub mod hadamard;
pub mod linalg;
pub mod moment_op;
pub mod scalar;

pub use error::{Error, Result};

pub type Matrix = linalg::Matrix<f64>;
pub type SampledFunction = grid::SampledFunction<f64>;
pub type SplineFunction = bspline::SplineFunction<f64>;
pub type VolterraOperator = moment_op::QuadraticVolterraOperator<f64>;
pub type ForwardMap = moment_op::DiscreteForwardMap<f64>;
pub type WeightVector = bg::WeightVector<f64>;
pub type Profile = bg::Profile<f64>;
pub type ProfileSolver = bg::ProfileSolver<f64>;
pub type ErrorBudget = bg::ErrorBudget<f64>;
pub type BoundaryTrace = cauchy::BoundaryTrace<f64>;
pub type Field = cauchy::Field<f64>;
pub type CauchyOperators = cauchy::CauchyOperators<f64>;
pub type KozlovMazya = cauchy::KozlovMazya<f64>;
pub type AmplificationRow = hadamard::AmplificationRow<f64>;
