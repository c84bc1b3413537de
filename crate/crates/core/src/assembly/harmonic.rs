use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fe_spaces::Discretization;
use crate::linalg::SparseMatrix;

use super::bc::{BoundaryConditionSpec, BoundaryPartition, FlowCondition, VorticityCondition};

/// Meshes up to this many tets get the dense rank checks in debug builds.
const DEBUG_RANK_CHECK_TETS: usize = 48;

/// M3-orthonormal basis of the discrete harmonic 3-forms (possibly empty).
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpace {
    pub basis: Vec<Vec<f64>>,
}

impl HarmonicSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `n_tets x dim` matrix with the basis vectors as columns.
    pub fn matrix(&self, n_tets: usize) -> SparseMatrix {
        let mut entries = Vec::new();
        for (j, b) in self.basis.iter().enumerate() {
            entries.extend(b.iter().enumerate().map(|(i, &v)| (i, j, v)));
        }
        SparseMatrix::from_triplets(n_tets, self.dim(), entries)
    }
}

/// Harmonic 3-forms for the given boundary conditions: the constants when the
/// normal velocity is essential on the whole boundary, nothing otherwise.
pub fn build_harmonic_space(
    disc: &Discretization,
    bc: &BoundaryConditionSpec,
) -> Result<HarmonicSpace> {
    let part = bc.partition(&disc.mesh)?;
    let space = if part.essential_faces.len() == disc.mesh.boundary_faces.len() {
        let scale = disc.mesh.total_volume().sqrt();
        HarmonicSpace {
            basis: vec![disc.mesh.tet_volumes.iter().map(|v| v / scale).collect()],
        }
    } else {
        HarmonicSpace { basis: Vec::new() }
    };
    if cfg!(debug_assertions) && disc.mesh.num_tets() <= DEBUG_RANK_CHECK_TETS {
        let by_rank = harmonic_3_dimension(disc, &part);
        if by_rank != space.dim() {
            return Err(Error::InvalidMesh(format!(
                "harmonic 3-forms: rank count {by_rank}, constructed {}",
                space.dim()
            )));
        }
        // essential vorticity next to a natural pressure does not form a complex
        let complex = !bc.regions.iter().any(|r| {
            matches!(
                (&r.vorticity, &r.flow),
                (VorticityCondition::Essential(_), FlowCondition::Natural(_))
            )
        });
        let h2 = if complex {
            harmonic_2_dimension(disc, &part)
        } else {
            0
        };
        if h2 != 0 {
            return Err(Error::InvalidMesh(format!(
                "domain carries {h2} discrete harmonic 2-forms"
            )));
        }
    }
    Ok(space)
}

fn free_faces(disc: &Discretization, part: &BoundaryPartition) -> Vec<usize> {
    let mut fixed = vec![false; disc.v2.ndof];
    for &(f, _) in &part.essential_faces {
        fixed[f] = true;
    }
    (0..disc.v2.ndof).filter(|&f| !fixed[f]).collect()
}

fn free_edges(disc: &Discretization, part: &BoundaryPartition) -> Vec<usize> {
    let mut fixed = vec![false; disc.v1.ndof];
    for &(e, _) in &part.essential_edges {
        fixed[e] = true;
    }
    (0..disc.v1.ndof).filter(|&e| !fixed[e]).collect()
}

fn dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.triplets() {
        d[(i, j)] = v;
    }
    d
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let tol = sv.max() * 1e-10 * (m.nrows().max(m.ncols()) as f64);
    sv.iter().filter(|&&s| s > tol).count()
}

/// `dim V3 - rank(D2 restricted to free faces)`, by dense SVD.
pub fn harmonic_3_dimension(disc: &Discretization, part: &BoundaryPartition) -> usize {
    let cells: Vec<usize> = (0..disc.v3.ndof).collect();
    let d2 = dense(&disc.d2.submatrix(&cells, &free_faces(disc, part)));
    disc.v3.ndof - numerical_rank(&d2)
}

/// Dimension of `{c : D2 c = 0, c M2-orthogonal to D1 (free edges)}` over free faces.
pub fn harmonic_2_dimension(disc: &Discretization, part: &BoundaryPartition) -> usize {
    let faces = free_faces(disc, part);
    let edges = free_edges(disc, part);
    let cells: Vec<usize> = (0..disc.v3.ndof).collect();
    let d1t_m2 = disc
        .d1
        .transpose()
        .matmul(&disc.m2)
        .expect("compatible shapes");
    let top = dense(&disc.d2.submatrix(&cells, &faces));
    let bottom = dense(&d1t_m2.submatrix(&edges, &faces));
    let mut stacked = DMatrix::zeros(top.nrows() + bottom.nrows(), faces.len());
    stacked.rows_mut(0, top.nrows()).copy_from(&top);
    stacked
        .rows_mut(top.nrows(), bottom.nrows())
        .copy_from(&bottom);
    faces.len() - numerical_rank(&stacked)
}

/// Harmonic 3-form dimension computed by rank, for any boundary conditions.
pub fn harmonic_dimension_by_rank(
    disc: &Discretization,
    bc: &BoundaryConditionSpec,
) -> Result<usize> {
    Ok(harmonic_3_dimension(disc, &bc.partition(&disc.mesh)?))
}
