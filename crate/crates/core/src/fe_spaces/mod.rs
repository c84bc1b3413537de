//! Lowest-order discrete de Rham complex: Whitney 1-forms on edges, 2-forms on
//! faces and 3-forms on cells, with their derivative and mass matrices.
//!
//! Coefficients are the canonical degrees of freedom: edge circulations,
//! face fluxes and cell integrals. The 3-form basis function of a cell is
//! therefore `1_T / |T|`, which makes the divergence matrix a pure incidence
//! matrix and the 3-form mass matrix `diag(1 / |T|)`.

mod interpolate;
mod norms;
mod operators;
pub mod whitney;

pub use interpolate::{
    cell_average_vector, edge_circulation, evaluate_derivative, evaluate_scalar, evaluate_vector,
    face_flux, interpolate_scalar, interpolate_vector,
};
pub use norms::{error_norms, scalar_error_norm, ErrorNorms, ExactDerivative};
pub use operators::{derivative_matrix, integer_composition_defect, mass_matrix};
pub use whitney::TetFrame;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::mesh::{boundary_skeleton, SimplicialMesh3};
use crate::quadrature::QuadratureRule;

/// Quadrature degree used for load vectors. High enough to integrate the
/// gradient of a degree-7 polynomial against face bases without error.
pub const LOAD_QUADRATURE_DEGREE: usize = 7;

/// Degree of a discrete differential form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormDegree {
    One,
    Two,
    Three,
}

impl FormDegree {
    pub fn as_usize(self) -> usize {
        match self {
            FormDegree::One => 1,
            FormDegree::Two => 2,
            FormDegree::Three => 3,
        }
    }

    pub fn next(self) -> Option<FormDegree> {
        match self {
            FormDegree::One => Some(FormDegree::Two),
            FormDegree::Two => Some(FormDegree::Three),
            FormDegree::Three => None,
        }
    }
}

/// Degrees of freedom of the lowest-order space of `k`-forms on one mesh.
#[derive(Debug, Clone)]
pub struct FormSpace {
    pub degree: FormDegree,
    pub ndof: usize,
    /// Global simplex (edge, face or tet) carrying each dof.
    pub dof_entities: Vec<usize>,
    pub boundary_dofs: Vec<usize>,
    mesh_id: u64,
}

impl FormSpace {
    pub fn new(mesh: &SimplicialMesh3, degree: FormDegree) -> Self {
        let (faces, edges, _) = boundary_skeleton(mesh);
        let (ndof, boundary_dofs) = match degree {
            FormDegree::One => (mesh.num_edges(), edges),
            FormDegree::Two => (mesh.num_faces(), faces),
            FormDegree::Three => (mesh.num_tets(), Vec::new()),
        };
        FormSpace {
            degree,
            ndof,
            dof_entities: (0..ndof).collect(),
            boundary_dofs,
            mesh_id: mesh.id(),
        }
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn check_mesh(&self, mesh: &SimplicialMesh3) -> Result<()> {
        if self.mesh_id != mesh.id() {
            return Err(Error::InvalidArgument(format!(
                "{}-form space was built on a different mesh",
                self.degree.as_usize()
            )));
        }
        Ok(())
    }

    pub fn zeros(&self) -> FormCoefficients {
        FormCoefficients {
            degree: self.degree,
            mesh_id: self.mesh_id,
            values: vec![0.0; self.ndof],
        }
    }

    pub fn coefficients(&self, values: Vec<f64>) -> Result<FormCoefficients> {
        if values.len() != self.ndof {
            return Err(Error::Dimension(format!(
                "{} values for a {}-form space with {} dofs",
                values.len(),
                self.degree.as_usize(),
                self.ndof
            )));
        }
        Ok(FormCoefficients {
            degree: self.degree,
            mesh_id: self.mesh_id,
            values,
        })
    }
}

/// Coefficient vector of a discrete form.
#[derive(Debug, Clone, PartialEq)]
pub struct FormCoefficients {
    pub degree: FormDegree,
    mesh_id: u64,
    pub values: Vec<f64>,
}

impl FormCoefficients {
    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_space(&self, space: &FormSpace) -> Result<()> {
        if self.degree != space.degree
            || self.mesh_id != space.mesh_id
            || self.values.len() != space.ndof
        {
            return Err(Error::InvalidArgument(format!(
                "coefficients of a {}-form do not belong to this {}-form space",
                self.degree.as_usize(),
                space.degree.as_usize()
            )));
        }
        Ok(())
    }
}

/// A mesh together with its form spaces, derivative and mass matrices.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: SimplicialMesh3,
    pub v1: FormSpace,
    pub v2: FormSpace,
    pub v3: FormSpace,
    /// curl: edge circulations to face fluxes.
    pub d1: SparseMatrix,
    /// div: face fluxes to cell integrals.
    pub d2: SparseMatrix,
    pub m1: SparseMatrix,
    pub m2: SparseMatrix,
    pub m3: SparseMatrix,
    /// Rule for mass, convection and error integrals.
    pub quad: QuadratureRule,
    /// Rule for load vectors.
    pub load_quad: QuadratureRule,
}

impl Discretization {
    pub fn new(mesh: SimplicialMesh3) -> Result<Self> {
        Self::with_quadrature(mesh, QuadratureRule::degree5())
    }

    pub fn with_quadrature(mesh: SimplicialMesh3, quad: QuadratureRule) -> Result<Self> {
        let v1 = FormSpace::new(&mesh, FormDegree::One);
        let v2 = FormSpace::new(&mesh, FormDegree::Two);
        let v3 = FormSpace::new(&mesh, FormDegree::Three);
        let d1 = derivative_matrix(&v1, &v2, &mesh)?;
        let d2 = derivative_matrix(&v2, &v3, &mesh)?;
        let m1 = mass_matrix(&v1, &mesh, &quad)?;
        let m2 = mass_matrix(&v2, &mesh, &quad)?;
        let m3 = mass_matrix(&v3, &mesh, &quad)?;
        let load_quad = QuadratureRule::with_degree(LOAD_QUADRATURE_DEGREE)?;
        Ok(Discretization {
            mesh,
            v1,
            v2,
            v3,
            d1,
            d2,
            m1,
            m2,
            m3,
            quad,
            load_quad,
        })
    }

    pub fn space(&self, degree: FormDegree) -> &FormSpace {
        match degree {
            FormDegree::One => &self.v1,
            FormDegree::Two => &self.v2,
            FormDegree::Three => &self.v3,
        }
    }

    /// `sqrt(c^T M c)` in the mass matrix of the coefficients' degree.
    pub fn mass_norm(&self, c: &FormCoefficients) -> f64 {
        let m = match c.degree {
            FormDegree::One => &self.m1,
            FormDegree::Two => &self.m2,
            FormDegree::Three => &self.m3,
        };
        m.quadratic_form(&c.values).max(0.0).sqrt()
    }

    /// Cellwise divergence densities `(D2 u)_T / |T|`.
    pub fn divergence_density(&self, u: &[f64]) -> Vec<f64> {
        self.d2
            .mul_vec(u)
            .iter()
            .zip(&self.mesh.tet_volumes)
            .map(|(d, v)| d / v)
            .collect()
    }

    /// `max_T |(D2 u)_T| / |T|`.
    pub fn max_divergence(&self, u: &[f64]) -> f64 {
        self.divergence_density(u)
            .iter()
            .fold(0.0, |m, d| m.max(d.abs()))
    }
}
