use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, TripletBuilder};
use crate::mesh::{SimplicialMesh3, FACE_EDGE_SIGNS};
use crate::quadrature::QuadratureRule;

use super::whitney::TetFrame;
use super::{FormDegree, FormSpace};

/// Signed incidence matrix of the exterior derivative from `from` to `to`.
pub fn derivative_matrix(
    from: &FormSpace,
    to: &FormSpace,
    mesh: &SimplicialMesh3,
) -> Result<SparseMatrix> {
    from.check_mesh(mesh)?;
    to.check_mesh(mesh)?;
    if from.degree.next() != Some(to.degree) {
        return Err(Error::InvalidArgument(format!(
            "no derivative from {}-forms to {}-forms",
            from.degree.as_usize(),
            to.degree.as_usize()
        )));
    }
    let mut b = TripletBuilder::with_capacity(to.ndof, from.ndof, 4 * to.ndof);
    match from.degree {
        FormDegree::One => {
            for (f, edges) in mesh.face_edges.iter().enumerate() {
                for (e, s) in edges.iter().zip(FACE_EDGE_SIGNS) {
                    b.push(f, *e, s as f64);
                }
            }
        }
        FormDegree::Two => {
            for (t, faces) in mesh.tet_faces.iter().enumerate() {
                for (i, &f) in faces.iter().enumerate() {
                    b.push(t, f, mesh.face_sign_in_tet(t, i) as f64);
                }
            }
        }
        FormDegree::Three => unreachable!("checked above"),
    }
    Ok(b.finalize())
}

/// Largest entry of `hi * lo` computed in integer arithmetic. Fails if either
/// matrix has a non-integer entry.
pub fn integer_composition_defect(hi: &SparseMatrix, lo: &SparseMatrix) -> Result<i64> {
    if hi.ncols() != lo.nrows() {
        return Err(Error::Dimension(format!(
            "{}x{} times {}x{}",
            hi.nrows(),
            hi.ncols(),
            lo.nrows(),
            lo.ncols()
        )));
    }
    let as_int = |v: f64| -> Result<i64> {
        if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
            return Err(Error::InvalidArgument(format!(
                "incidence entry {v} is not an integer"
            )));
        }
        Ok(v as i64)
    };
    let mut acc = vec![0i64; lo.ncols()];
    let mut touched = Vec::new();
    let mut worst = 0i64;
    for i in 0..hi.nrows() {
        for (k, a) in hi.row(i) {
            let a = as_int(a)?;
            for (j, b) in lo.row(k) {
                if acc[j] == 0 {
                    touched.push(j);
                }
                acc[j] += a * as_int(b)?;
            }
        }
        for &j in &touched {
            worst = worst.max(acc[j].abs());
            acc[j] = 0;
        }
        touched.clear();
    }
    Ok(worst)
}

/// Galerkin mass matrix `M[i, j] = (psi_i, psi_j)` of the Whitney basis.
pub fn mass_matrix(
    space: &FormSpace,
    mesh: &SimplicialMesh3,
    quad: &QuadratureRule,
) -> Result<SparseMatrix> {
    space.check_mesh(mesh)?;
    if space.degree == FormDegree::Three {
        let diag: Vec<f64> = mesh.tet_volumes.iter().map(|v| 1.0 / v).collect();
        return Ok(SparseMatrix::from_diagonal(&diag));
    }
    if quad.exactness_degree < 2 {
        return Err(Error::Config(format!(
            "mass matrix needs quadrature exact to degree 2, got {}",
            quad.exactness_degree
        )));
    }
    let nloc = if space.degree == FormDegree::One {
        6
    } else {
        4
    };
    let mut b =
        TripletBuilder::with_capacity(space.ndof, space.ndof, nloc * nloc * mesh.num_tets());
    for t in 0..mesh.num_tets() {
        let fr = TetFrame::new(mesh, t);
        let mut local = [[0.0; 6]; 6];
        for (lam, &w) in quad.points.iter().zip(&quad.weights) {
            let w = fr.weight(w);
            let vals: Vec<_> = match space.degree {
                FormDegree::One => fr.edge_basis(lam).to_vec(),
                _ => fr.face_basis(lam).to_vec(),
            };
            for i in 0..nloc {
                for j in 0..nloc {
                    local[i][j] += w * vals[i].dot(&vals[j]);
                }
            }
        }
        let dofs: &[usize] = match space.degree {
            FormDegree::One => &mesh.tet_edges[t],
            _ => &mesh.tet_faces[t],
        };
        for i in 0..nloc {
            for j in 0..nloc {
                b.push(dofs[i], dofs[j], local[i][j]);
            }
        }
    }
    Ok(b.finalize())
}
