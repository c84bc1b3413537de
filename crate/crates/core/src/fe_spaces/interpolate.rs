use crate::error::{Error, Result};
use crate::fields::{ScalarField, Vec3, VectorField};
use crate::mesh::SimplicialMesh3;
use crate::quadrature::{LineRule, QuadratureRule, TriangleRule};

use super::whitney::TetFrame;
use super::{FormCoefficients, FormDegree, FormSpace};

/// Circulation `int_e v . t` of a field along edge `e` (3-point Gauss).
pub fn edge_circulation(mesh: &SimplicialMesh3, field: &VectorField, e: usize, t: f64) -> f64 {
    let [a, b] = mesh.edges[e];
    let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
    let tangent = pb - pa;
    let line = LineRule::gauss(3);
    line.points
        .iter()
        .zip(&line.weights)
        .map(|(&s, &w)| w * field(&(pa + s * tangent), t).dot(&tangent))
        .sum()
}

/// Flux `int_f v . n` of a field through face `f` along its canonical normal.
pub fn face_flux(mesh: &SimplicialMesh3, field: &VectorField, f: usize, t: f64) -> f64 {
    let [a, b, c] = mesh.face_points(f);
    let normal = 0.5 * mesh.face_area_normal(f);
    let tri = TriangleRule::degree5();
    tri.points
        .iter()
        .zip(&tri.weights)
        .map(|(q, &w)| w * field(&(q[0] * a + q[1] * b + q[2] * c), t).dot(&normal))
        .sum()
}

/// Canonical interpolation of a vector proxy at time `t`: edge circulations
/// for 1-forms, face fluxes for 2-forms.
pub fn interpolate_vector(
    space: &FormSpace,
    field: &VectorField,
    mesh: &SimplicialMesh3,
    t: f64,
) -> Result<FormCoefficients> {
    space.check_mesh(mesh)?;
    let values = match space.degree {
        FormDegree::One => (0..mesh.num_edges())
            .map(|e| edge_circulation(mesh, field, e, t))
            .collect(),
        FormDegree::Two => (0..mesh.num_faces())
            .map(|f| face_flux(mesh, field, f, t))
            .collect(),
        FormDegree::Three => {
            return Err(Error::InvalidArgument(
                "3-forms are interpolated from scalar fields".into(),
            ))
        }
    };
    space.coefficients(values)
}

/// Cell integrals of a scalar density at time `t`.
pub fn interpolate_scalar(
    space: &FormSpace,
    field: &ScalarField,
    mesh: &SimplicialMesh3,
    quad: &QuadratureRule,
    t: f64,
) -> Result<FormCoefficients> {
    space.check_mesh(mesh)?;
    if space.degree != FormDegree::Three {
        return Err(Error::InvalidArgument(
            "scalar fields interpolate into 3-forms only".into(),
        ));
    }
    let values = (0..mesh.num_tets())
        .map(|c| {
            let vol = mesh.tet_volumes[c];
            quad.points
                .iter()
                .zip(&quad.weights)
                .map(|(lam, &w)| 6.0 * vol * w * field(&mesh.tet_point(c, lam), t))
                .sum()
        })
        .collect();
    space.coefficients(values)
}

fn check_tet(mesh: &SimplicialMesh3, tet: usize) -> Result<()> {
    if tet >= mesh.num_tets() {
        return Err(Error::InvalidArgument(format!(
            "tet {tet} out of range ({} tets)",
            mesh.num_tets()
        )));
    }
    Ok(())
}

/// Value of a discrete 1- or 2-form at barycentric point `lambda` of `tet`.
pub fn evaluate_vector(
    coeffs: &FormCoefficients,
    mesh: &SimplicialMesh3,
    tet: usize,
    lambda: &[f64; 4],
) -> Result<Vec3> {
    check_tet(mesh, tet)?;
    let fr = TetFrame::new(mesh, tet);
    let v = &coeffs.values;
    Ok(match coeffs.degree {
        FormDegree::One => {
            let basis = fr.edge_basis(lambda);
            mesh.tet_edges[tet]
                .iter()
                .zip(&basis)
                .map(|(&e, b)| v[e] * b)
                .sum()
        }
        FormDegree::Two => {
            let basis = fr.face_basis(lambda);
            mesh.tet_faces[tet]
                .iter()
                .zip(&basis)
                .map(|(&f, b)| v[f] * b)
                .sum()
        }
        FormDegree::Three => {
            return Err(Error::InvalidArgument("3-forms evaluate to scalars".into()))
        }
    })
}

/// Pointwise density of a discrete 3-form, `c_T / |T|`.
pub fn evaluate_scalar(
    coeffs: &FormCoefficients,
    mesh: &SimplicialMesh3,
    tet: usize,
) -> Result<f64> {
    check_tet(mesh, tet)?;
    if coeffs.degree != FormDegree::Three {
        return Err(Error::InvalidArgument(
            "only 3-forms evaluate to scalars".into(),
        ));
    }
    Ok(coeffs.values[tet] / mesh.tet_volumes[tet])
}

/// Constant derivative of a discrete form on `tet`: the curl of a 1-form as a
/// vector, or the divergence of a 2-form in the first component.
pub fn evaluate_derivative(
    coeffs: &FormCoefficients,
    mesh: &SimplicialMesh3,
    tet: usize,
) -> Result<Vec3> {
    check_tet(mesh, tet)?;
    let fr = TetFrame::new(mesh, tet);
    let v = &coeffs.values;
    Ok(match coeffs.degree {
        FormDegree::One => mesh.tet_edges[tet]
            .iter()
            .zip(&fr.edge_curls())
            .map(|(&e, c)| v[e] * c)
            .sum(),
        FormDegree::Two => {
            let div: f64 = mesh.tet_faces[tet]
                .iter()
                .zip(&fr.face_divs())
                .map(|(&f, d)| v[f] * d)
                .sum();
            Vec3::new(div, 0.0, 0.0)
        }
        FormDegree::Three => {
            return Err(Error::InvalidArgument("3-forms have no derivative".into()))
        }
    })
}

/// Value of a discrete 1- or 2-form at every tet barycenter.
pub fn cell_average_vector(coeffs: &FormCoefficients, mesh: &SimplicialMesh3) -> Result<Vec<Vec3>> {
    (0..mesh.num_tets())
        .map(|t| evaluate_vector(coeffs, mesh, t, &[0.25; 4]))
        .collect()
}
