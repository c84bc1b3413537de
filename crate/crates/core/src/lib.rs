//! Structure-preserving finite elements for incompressible Navier-Stokes in
//! vorticity-velocity-pressure form on tetrahedral meshes.

pub mod assembly;
pub mod error;
pub mod experiments;
pub mod fe_spaces;
pub mod fields;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
