//! Exact lifted variable elimination for parfactor models, checked against a
//! grounding oracle.

pub mod corpus;
pub mod error;
pub mod ground;
pub mod grounding;
pub mod histogram;
pub mod io;
pub mod model;
pub mod ops;
pub mod perm;
pub mod planner;
pub mod potential;
pub mod scalar;
pub mod wmc;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use model::{Model, Parfactor};
pub use planner::{Answer, Query, Strategy};
pub use potential::Potential;

pub type Model64 = Model<f64>;
pub type Model32 = Model<f32>;
pub type Parfactor64 = Parfactor<f64>;
pub type Parfactor32 = Parfactor<f32>;
pub type Potential64 = Potential<f64>;
pub type Potential32 = Potential<f32>;
pub type Answer64 = Answer<f64>;
pub type Answer32 = Answer<f32>;
