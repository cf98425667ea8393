//! Simulation and geometric control of a deformable body swimming in a 2D
//! ideal fluid.

pub mod cli;
pub mod control_fields;
pub mod dynamics;
pub mod error;
pub mod internal_forces;
pub mod mass_matrices;
pub mod ode;
pub mod potentials;
pub mod scalar;
pub mod shape_space;
pub mod strokes;

pub use error::{Error, Result};
