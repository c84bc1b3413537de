use crate::error::{Error, Result};
use crate::fields::{ScalarField, Vec3, VectorField};
use crate::mesh::SimplicialMesh3;
use crate::quadrature::QuadratureRule;

use super::whitney::TetFrame;
use super::{FormCoefficients, FormDegree};

/// Derivative of an exact field matching the form degree: curl for 1-forms,
/// divergence for 2-forms.
#[derive(Clone, Copy)]
pub enum ExactDerivative<'a> {
    Curl(&'a VectorField),
    Divergence(&'a ScalarField),
}

/// Absolute errors of a discrete field and the norms of the exact field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    /// L2 norm of the derivative error (curl or divergence).
    pub derivative: f64,
    pub exact_l2: f64,
    pub exact_derivative: f64,
}

impl ErrorNorms {
    /// `||e|| + ||d e||`, the H(curl) or H(div) error.
    pub fn graph(&self) -> f64 {
        self.l2 + self.derivative
    }

    pub fn exact_graph(&self) -> f64 {
        self.exact_l2 + self.exact_derivative
    }

    pub fn relative_l2(&self) -> Result<f64> {
        guarded(self.l2, self.exact_l2, "L2")
    }

    pub fn relative_graph(&self) -> Result<f64> {
        guarded(self.graph(), self.exact_graph(), "graph")
    }

    /// Relative errors where the exact norm is nonzero, absolute otherwise.
    pub fn relative_or_absolute(&self) -> (f64, f64) {
        (
            self.relative_l2().unwrap_or(self.l2),
            self.relative_graph().unwrap_or(self.graph()),
        )
    }
}

fn guarded(err: f64, norm: f64, what: &str) -> Result<f64> {
    if norm <= f64::MIN_POSITIVE {
        return Err(Error::ZeroNorm(format!("exact {what} norm is zero")));
    }
    Ok(err / norm)
}

/// L2 and graph-norm errors of a discrete 1- or 2-form against an exact field at time `t`.
pub fn error_norms(
    coeffs: &FormCoefficients,
    exact: &VectorField,
    exact_derivative: ExactDerivative<'_>,
    mesh: &SimplicialMesh3,
    quad: &QuadratureRule,
    t: f64,
) -> Result<ErrorNorms> {
    let v = &coeffs.values;
    let (mut e0, mut ed, mut n0, mut nd) = (0.0, 0.0, 0.0, 0.0);
    for c in 0..mesh.num_tets() {
        let fr = TetFrame::new(mesh, c);
        let dh = match (coeffs.degree, exact_derivative) {
            (FormDegree::One, ExactDerivative::Curl(_)) => mesh.tet_edges[c]
                .iter()
                .zip(&fr.edge_curls())
                .map(|(&e, k)| v[e] * k)
                .sum(),
            (FormDegree::Two, ExactDerivative::Divergence(_)) => {
                let d: f64 = mesh.tet_faces[c]
                    .iter()
                    .zip(&fr.face_divs())
                    .map(|(&f, k)| v[f] * k)
                    .sum();
                Vec3::new(d, 0.0, 0.0)
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "derivative kind does not match a {}-form",
                    coeffs.degree.as_usize()
                )))
            }
        };
        for (lam, &w) in quad.points.iter().zip(&quad.weights) {
            let w = fr.weight(w);
            let x = mesh.tet_point(c, lam);
            let uh: Vec3 = match coeffs.degree {
                FormDegree::One => mesh.tet_edges[c]
                    .iter()
                    .zip(&fr.edge_basis(lam))
                    .map(|(&e, b)| v[e] * b)
                    .sum(),
                _ => mesh.tet_faces[c]
                    .iter()
                    .zip(&fr.face_basis(lam))
                    .map(|(&f, b)| v[f] * b)
                    .sum(),
            };
            let u = exact(&x, t);
            e0 += w * (u - uh).norm_squared();
            n0 += w * u.norm_squared();
            match exact_derivative {
                ExactDerivative::Curl(curl) => {
                    let k = curl(&x, t);
                    ed += w * (k - dh).norm_squared();
                    nd += w * k.norm_squared();
                }
                ExactDerivative::Divergence(div) => {
                    let k = div(&x, t);
                    ed += w * (k - dh.x).powi(2);
                    nd += w * k * k;
                }
            }
        }
    }
    Ok(ErrorNorms {
        l2: e0.sqrt(),
        derivative: ed.sqrt(),
        exact_l2: n0.sqrt(),
        exact_derivative: nd.sqrt(),
    })
}

/// L2 error of a discrete 3-form against a scalar density.
pub fn scalar_error_norm(
    coeffs: &FormCoefficients,
    exact: &ScalarField,
    mesh: &SimplicialMesh3,
    quad: &QuadratureRule,
    t: f64,
) -> Result<ErrorNorms> {
    if coeffs.degree != FormDegree::Three {
        return Err(Error::InvalidArgument("scalar errors need a 3-form".into()));
    }
    let (mut e0, mut n0) = (0.0, 0.0);
    for c in 0..mesh.num_tets() {
        let vol = mesh.tet_volumes[c];
        let ph = coeffs.values[c] / vol;
        for (lam, &w) in quad.points.iter().zip(&quad.weights) {
            let p = exact(&mesh.tet_point(c, lam), t);
            e0 += 6.0 * vol * w * (p - ph).powi(2);
            n0 += 6.0 * vol * w * p * p;
        }
    }
    Ok(ErrorNorms {
        l2: e0.sqrt(),
        derivative: 0.0,
        exact_l2: n0.sqrt(),
        exact_derivative: 0.0,
    })
}
