//! Discrete exterior calculus toolkit for linearization obstructions of
//! nonlinear PDE systems on compact meshes: rigid cosymmetries, deformation
//! currents, de Rham-valued obstruction charges, and a Newton continuation
//! solver that cross-validates charges against actual extendability of
//! linearized solutions.

pub mod calculus;
pub mod error;
pub mod lie;
pub mod mesh;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
