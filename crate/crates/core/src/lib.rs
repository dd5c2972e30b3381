//! Exact-arithmetic construction and verification of a quantum-group
//! R-matrix, its dynamical twist, and the associated commuting difference
//! operators.
//!
//! Every object is evaluated over arbitrary-precision rationals at exactly
//! specified parameter points; identity checks are exact multi-point
//! evaluations, never floating-point approximations.

pub mod qsl;
pub mod cli;
pub mod diffop;
pub mod dressed;
pub mod report;
pub mod rmat;
pub mod rs;
pub mod scalars;
pub mod twist;

pub use scalars::{Error, ParamPoint, Rat, UPoint, WPoint};
