//! Local differential privacy for trajectories in continuous, bounded 2-D
//! location spaces.
//!
//! Two perturbation pipelines are provided. [`trajectory::tracs_d`] splits
//! each location into a direction and a normalized distance relative to a
//! public reference location; [`trajectory::tracs_c`] perturbs the two
//! normalized Cartesian coordinates independently. Both spend a budget of
//! `ε` per location and both can be rounded onto a grid or a point set
//! after the fact.
//!
//! The geometry, mechanism and trajectory code is generic over the
//! [`Scalar`] float type; the aliases below fix it to `f64` or `f32`.

// Negated comparisons are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod mechanisms;
pub mod scalar;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Location64 = geometry::Location<f64>;
pub type Location32 = geometry::Location<f32>;
pub type RectSpace64 = geometry::RectSpace<f64>;
pub type RectSpace32 = geometry::RectSpace<f32>;
pub type Angle64 = geometry::Angle<f64>;
pub type Angle32 = geometry::Angle<f32>;
pub type UnitValue64 = geometry::UnitValue<f64>;
pub type UnitValue32 = geometry::UnitValue<f32>;
pub type PiecewisePdf64 = mechanisms::PiecewisePdf<f64>;
pub type PiecewisePdf32 = mechanisms::PiecewisePdf<f32>;
pub type PrivacyBudget64 = mechanisms::PrivacyBudget<f64>;
pub type PrivacyBudget32 = mechanisms::PrivacyBudget<f32>;
pub type Trajectory64 = trajectory::Trajectory<f64>;
pub type Trajectory32 = trajectory::Trajectory<f32>;
pub type DiscreteSpace64 = trajectory::DiscreteSpace<f64>;
pub type DiscreteSpace32 = trajectory::DiscreteSpace<f32>;
