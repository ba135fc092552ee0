//! Planar Kirchhoff rod dynamics.
//!
//! The crate couples a finite-difference model of an inextensible rod with
//! a closed-form solution family of its kinematic compatibility equations.
//! It exposes two explicit time integrators (a plain forward Euler scheme
//! and one that keeps the state on the collinear manifold of the family),
//! numerical checks of the reduction from the kinematic system to a pair of
//! developable surfaces, and scenario drivers for single cilia and carpets.

pub mod error;
pub mod grid;
pub mod rod;
pub mod analytic;
pub mod reduction;
pub mod integrators;
pub mod scenario;

pub use error::{Error, Result};
