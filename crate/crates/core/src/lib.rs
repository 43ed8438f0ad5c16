//! ILQR on reduced-order models of quadratic systems.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

// `!(x > 0.0)` style comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burgers;
pub mod dynamics;
pub mod error;
pub mod ilqr;
pub mod linalg;
pub mod mateq;
pub mod modred;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = nalgebra::DMatrix<f64>;
pub type Vector = nalgebra::DVector<f64>;
pub type System = dynamics::QuadraticSystem<f64>;
pub type Discretized = dynamics::DiscretizedSystem<f64>;
pub type Cost = ilqr::QuadraticCost<f64>;
pub type Solution = ilqr::IlqrResult<f64>;
pub type SolveError = ilqr::IlqrError<f64>;
pub type Lti = mateq::LtiSystem<f64>;

pub type SystemF32 = dynamics::QuadraticSystem<f32>;
pub type CostF32 = ilqr::QuadraticCost<f32>;
