use crate::error::{Error, Result};
use crate::fe_spaces::Discretization;
use crate::fields::{ScalarField, VectorField};
use crate::linalg::{BlockSystem, SparseMatrix};

use super::bc::{BoundaryConditionSpec, BoundaryPartition};
use super::forms::{assemble_natural_bc, load_vector, scalar_load_vector};
use super::harmonic::{build_harmonic_space, HarmonicSpace};

pub const OMEGA: &str = "omega";
pub const VELOCITY: &str = "u";
pub const PRESSURE: &str = "p";
pub const HARMONIC: &str = "phi";

/// Boundary partition and harmonic space, fixed for a mesh and a set of conditions.
#[derive(Debug, Clone)]
pub struct BoundarySetup {
    pub bc: BoundaryConditionSpec,
    pub partition: BoundaryPartition,
    pub harmonic: HarmonicSpace,
}

impl BoundarySetup {
    pub fn new(disc: &Discretization, bc: &BoundaryConditionSpec) -> Result<Self> {
        let partition = bc.partition(&disc.mesh)?;
        let harmonic = build_harmonic_space(disc, bc)?;
        Ok(BoundarySetup {
            bc: bc.clone(),
            partition,
            harmonic,
        })
    }
}

/// Operator terms beyond the steady Stokes part.
#[derive(Debug, Clone, Copy, Default)]
pub struct MixedTerms<'a> {
    pub nu: f64,
    /// `1 / dt`, zero for the steady problem.
    pub inv_dt: f64,
    /// `(A3, A5)` convection blocks.
    pub convection: Option<(&'a SparseMatrix, &'a SparseMatrix)>,
    /// Previous velocity fluxes for the time-derivative right-hand side.
    pub u_prev: Option<&'a [f64]>,
}

/// The system
///
/// ```text
/// M1 w - D1^T M2 u                           = natural(u x n)
/// nu M2 D1 w + A3 w + (M2/dt + A5) u - D2^T M3 p = M2 u_prev/dt + <f2, v> + natural(p)
/// M3 D2 u + M3 H phi                         = <f3, q>
/// H^T M3 p                                   = 0
/// ```
///
/// with essential boundary dofs constrained to interpolated data at time `t`.
pub fn assemble_mixed(
    disc: &Discretization,
    setup: &BoundarySetup,
    terms: &MixedTerms<'_>,
    f2: &VectorField,
    f3: Option<&ScalarField>,
    t: f64,
) -> Result<BlockSystem> {
    if !(terms.nu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "viscosity must be positive, got {}",
            terms.nu
        )));
    }
    let nh = setup.harmonic.dim();
    let mut sys = BlockSystem::new([
        (OMEGA, disc.v1.ndof),
        (VELOCITY, disc.v2.ndof),
        (PRESSURE, disc.v3.ndof),
        (HARMONIC, nh),
    ]);
    let m2d1 = disc.m2.matmul(&disc.d1)?;
    let m3d2 = disc.m3.matmul(&disc.d2)?;

    sys.add_block(OMEGA, OMEGA, disc.m1.clone())?;
    sys.add_block(OMEGA, VELOCITY, m2d1.transpose().scaled(-1.0))?;

    sys.add_block(VELOCITY, OMEGA, m2d1.scaled(terms.nu))?;
    if terms.inv_dt != 0.0 {
        sys.add_block(VELOCITY, VELOCITY, disc.m2.scaled(terms.inv_dt))?;
    }
    if let Some((a3, a5)) = terms.convection {
        sys.add_block(VELOCITY, OMEGA, a3.clone())?;
        sys.add_block(VELOCITY, VELOCITY, a5.clone())?;
    }
    sys.add_block(VELOCITY, PRESSURE, m3d2.transpose().scaled(-1.0))?;
    sys.add_block(PRESSURE, VELOCITY, m3d2)?;
    if nh > 0 {
        let h = setup.harmonic.matrix(disc.v3.ndof);
        let m3h = disc.m3.matmul(&h)?;
        sys.add_block(HARMONIC, PRESSURE, m3h.transpose())?;
        sys.add_block(PRESSURE, HARMONIC, m3h)?;
    }

    let natural = assemble_natural_bc(disc, &setup.bc, &setup.partition, t);
    sys.add_rhs(OMEGA, &natural.edge_rhs)?;
    sys.add_rhs(VELOCITY, &natural.face_rhs)?;
    sys.add_rhs(VELOCITY, &load_vector(disc, f2, t))?;
    if let Some(u_prev) = terms.u_prev {
        if terms.inv_dt != 0.0 {
            let mut r = vec![0.0; disc.v2.ndof];
            disc.m2.mul_vec_add(terms.inv_dt, u_prev, &mut r);
            sys.add_rhs(VELOCITY, &r)?;
        }
    }
    if let Some(f3) = f3 {
        sys.add_rhs(PRESSURE, &scalar_load_vector(disc, f3, t))?;
    }

    for (e, v) in setup.partition.vorticity_values(&setup.bc, &disc.mesh, t) {
        sys.constrain(OMEGA, e, v)?;
    }
    for (f, v) in setup.partition.flux_values(&setup.bc, &disc.mesh, t) {
        sys.constrain(VELOCITY, f, v)?;
    }
    Ok(sys)
}

/// The steady mixed Stokes-type system.
pub fn assemble_b0(
    disc: &Discretization,
    setup: &BoundarySetup,
    nu: f64,
    f2: &VectorField,
    f3: Option<&ScalarField>,
) -> Result<BlockSystem> {
    assemble_mixed(
        disc,
        setup,
        &MixedTerms {
            nu,
            ..Default::default()
        },
        f2,
        f3,
        0.0,
    )
}
