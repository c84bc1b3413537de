//! Block systems for the mixed vorticity-velocity-pressure problem: boundary
//! conditions, harmonic multipliers, loads and linearized convection.

mod bc;
mod forms;
mod harmonic;
mod system;

pub use bc::{
    box_side, BoundaryConditionSpec, BoundaryPartition, BoundaryRegion, FaceSelector,
    FlowCondition, VorticityCondition,
};
pub use forms::{
    assemble_convection, assemble_natural_bc, load_vector, scalar_load_vector, NaturalBoundaryTerms,
};
pub use harmonic::{
    build_harmonic_space, harmonic_2_dimension, harmonic_3_dimension, harmonic_dimension_by_rank,
    HarmonicSpace,
};
pub use system::{
    assemble_b0, assemble_mixed, BoundarySetup, MixedTerms, HARMONIC, OMEGA, PRESSURE, VELOCITY,
};
