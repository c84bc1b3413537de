use crate::error::{Error, Result};
use crate::fe_spaces::{Discretization, FormCoefficients, FormDegree, TetFrame};
use crate::fields::{ScalarField, Vec3, VectorField};
use crate::linalg::{SparseMatrix, TripletBuilder};
use crate::mesh::{SimplicialMesh3, TET_FACES};
use crate::quadrature::{QuadratureRule, TriangleRule};

use super::bc::{BoundaryConditionSpec, BoundaryPartition, FlowCondition, VorticityCondition};

/// `<f, psi2_i>` for every face basis function.
pub fn load_vector(disc: &Discretization, f: &VectorField, t: f64) -> Vec<f64> {
    let mesh = &disc.mesh;
    let mut out = vec![0.0; disc.v2.ndof];
    for c in 0..mesh.num_tets() {
        let fr = TetFrame::new(mesh, c);
        let mut local = [0.0; 4];
        for (lam, &w) in disc.load_quad.points.iter().zip(&disc.load_quad.weights) {
            let fx = f(&mesh.tet_point(c, lam), t);
            let w = fr.weight(w);
            for (l, psi) in local.iter_mut().zip(fr.face_basis(lam)) {
                *l += w * fx.dot(&psi);
            }
        }
        for (&face, l) in mesh.tet_faces[c].iter().zip(local) {
            out[face] += l;
        }
    }
    out
}

/// `<f3, psi3_T> = int_T f3 / |T|` for every cell.
pub fn scalar_load_vector(disc: &Discretization, f3: &ScalarField, t: f64) -> Vec<f64> {
    let mesh = &disc.mesh;
    let q = &disc.load_quad;
    (0..mesh.num_tets())
        .map(|c| {
            q.points
                .iter()
                .zip(&q.weights)
                .map(|(lam, &w)| 6.0 * w * f3(&mesh.tet_point(c, lam), t))
                .sum()
        })
        .collect()
}

/// Right-hand-side contributions of the natural boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalBoundaryTerms {
    /// `int (g x psi1_i) . n` over natural-vorticity faces, for the edge row.
    pub edge_rhs: Vec<f64>,
    /// `-int h psi2_i . n` over natural-pressure faces, for the face row.
    pub face_rhs: Vec<f64>,
}

/// Natural terms at time `t`. The left-hand-side terms `-int (g x tau) . n`
/// and `int h v . n` appear here already moved to the right-hand side.
pub fn assemble_natural_bc(
    disc: &Discretization,
    bc: &BoundaryConditionSpec,
    part: &BoundaryPartition,
    t: f64,
) -> NaturalBoundaryTerms {
    let mesh = &disc.mesh;
    let tri = TriangleRule::degree5();
    let mut edge_rhs = vec![0.0; disc.v1.ndof];
    let mut face_rhs = vec![0.0; disc.v2.ndof];
    for &f in &mesh.boundary_faces {
        let region = &bc.regions[part.face_region[f].expect("boundary face has a region")];
        let g = match &region.vorticity {
            VorticityCondition::Natural(g) => Some(g),
            VorticityCondition::Essential(_) => None,
        };
        let h = match &region.flow {
            FlowCondition::Natural(h) => Some(h),
            FlowCondition::Essential(_) => None,
        };
        if g.is_none() && h.is_none() {
            continue;
        }
        let c = mesh.face_tets[f].0;
        let local = mesh.tet_faces[c]
            .iter()
            .position(|&x| x == f)
            .expect("incident face");
        let [a, b, d] = TET_FACES[local];
        let fr = TetFrame::new(mesh, c);
        let normal = mesh.outward_normal(f);
        let area = mesh.face_area(f);
        for (q, &w) in tri.points.iter().zip(&tri.weights) {
            let mut lam = [0.0; 4];
            lam[a] = q[0];
            lam[b] = q[1];
            lam[d] = q[2];
            let x = mesh.tet_point(c, &lam);
            let w = w * area;
            if let Some(g) = g {
                let gx = g(&x, t);
                for (&e, psi) in mesh.tet_edges[c].iter().zip(fr.edge_basis(&lam)) {
                    edge_rhs[e] += w * gx.cross(&psi).dot(&normal);
                }
            }
            if let Some(h) = h {
                let hx = h(&x, t);
                for (&face, psi) in mesh.tet_faces[c].iter().zip(fr.face_basis(&lam)) {
                    face_rhs[face] -= w * hx * psi.dot(&normal);
                }
            }
        }
    }
    NaturalBoundaryTerms { edge_rhs, face_rhs }
}

/// Linearized convection blocks, both mapping into the face test space:
/// `A3[i, j] = theta int (psi1_j x u_prev) . psi2_i` and
/// `A5[i, j] = (1 - theta) int (omega_prev x psi2_j) . psi2_i`.
pub fn assemble_convection(
    mesh: &SimplicialMesh3,
    omega_prev: &FormCoefficients,
    u_prev: &FormCoefficients,
    theta: f64,
    quad: &QuadratureRule,
) -> Result<(SparseMatrix, SparseMatrix)> {
    if omega_prev.degree != FormDegree::One || u_prev.degree != FormDegree::Two {
        return Err(Error::InvalidArgument(
            "convection needs a 1-form and a 2-form".into(),
        ));
    }
    if omega_prev.mesh_id() != mesh.id() || u_prev.mesh_id() != mesh.id() {
        return Err(Error::InvalidArgument(
            "frozen fields live on a different mesh".into(),
        ));
    }
    if quad.exactness_degree < 3 {
        return Err(Error::Config(format!(
            "convection needs quadrature of degree 3, got {}",
            quad.exactness_degree
        )));
    }
    let (nf, ne) = (mesh.num_faces(), mesh.num_edges());
    let mut a3 = TripletBuilder::with_capacity(nf, ne, 24 * mesh.num_tets());
    let mut a5 = TripletBuilder::with_capacity(nf, nf, 16 * mesh.num_tets());
    let (wv, uv) = (&omega_prev.values, &u_prev.values);
    for c in 0..mesh.num_tets() {
        let fr = TetFrame::new(mesh, c);
        let edges = &mesh.tet_edges[c];
        let faces = &mesh.tet_faces[c];
        let mut l3 = [[0.0; 6]; 4];
        let mut l5 = [[0.0; 4]; 4];
        for (lam, &w) in quad.points.iter().zip(&quad.weights) {
            let w = fr.weight(w);
            let eb = fr.edge_basis(lam);
            let fb = fr.face_basis(lam);
            let u: Vec3 = faces.iter().zip(&fb).map(|(&f, b)| uv[f] * b).sum();
            let om: Vec3 = edges.iter().zip(&eb).map(|(&e, b)| wv[e] * b).sum();
            for i in 0..4 {
                for j in 0..6 {
                    l3[i][j] += w * eb[j].cross(&u).dot(&fb[i]);
                }
                for j in 0..4 {
                    l5[i][j] += w * om.cross(&fb[j]).dot(&fb[i]);
                }
            }
        }
        for i in 0..4 {
            for j in 0..6 {
                if theta != 0.0 {
                    a3.push(faces[i], edges[j], theta * l3[i][j]);
                }
            }
            for j in 0..4 {
                if theta != 1.0 {
                    a5.push(faces[i], faces[j], (1.0 - theta) * l5[i][j]);
                }
            }
        }
    }
    Ok((a3.finalize(), a5.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::box_side;
    use crate::fe_spaces::interpolate_vector;
    use crate::fields::{constant_vector, scalar_field, vector_field, zero_scalar, zero_vector};
    use crate::mesh::{build_box_mesh, Point3};

    fn disc(n: usize) -> Discretization {
        Discretization::new(build_box_mesh(n, n, n, Point3::zeros(), Point3::repeat(1.0)).unwrap())
            .unwrap()
    }

    #[test]
    fn zero_frozen_fields_give_zero_blocks() {
        let d = disc(2);
        let (a3, a5) =
            assemble_convection(&d.mesh, &d.v1.zeros(), &d.v2.zeros(), 0.5, &d.quad).unwrap();
        assert_eq!(a3.max_abs(), 0.0);
        assert_eq!(a5.max_abs(), 0.0);
        let u = interpolate_vector(&d.v2, &constant_vector(Vec3::x()), &d.mesh, 0.0).unwrap();
        let (a3, _) = assemble_convection(&d.mesh, &d.v1.zeros(), &u, 0.0, &d.quad).unwrap();
        assert_eq!(a3.max_abs(), 0.0);
    }

    #[test]
    fn convection_is_linear_in_frozen_fields() {
        let d = disc(2);
        let f1 = vector_field(|x, _| Vec3::new(x.y, x.z * x.z, 1.0 - x.x));
        let f2 = vector_field(|x, _| Vec3::new(x.x * x.y, -x.z, 0.5));
        let u1 = interpolate_vector(&d.v2, &f1, &d.mesh, 0.0).unwrap();
        let u2 = interpolate_vector(&d.v2, &f2, &d.mesh, 0.0).unwrap();
        let w1 = interpolate_vector(&d.v1, &f1, &d.mesh, 0.0).unwrap();
        let w2 = interpolate_vector(&d.v1, &f2, &d.mesh, 0.0).unwrap();
        let (alpha, beta) = (0.7, -1.3);
        let mix = |a: &FormCoefficients, b: &FormCoefficients| {
            let mut c = a.clone();
            for (x, y) in c.values.iter_mut().zip(&b.values) {
                *x = alpha * *x + beta * y;
            }
            c
        };
        let (a3_1, a5_1) = assemble_convection(&d.mesh, &w1, &u1, 0.5, &d.quad).unwrap();
        let (a3_2, a5_2) = assemble_convection(&d.mesh, &w2, &u2, 0.5, &d.quad).unwrap();
        let (a3_m, a5_m) =
            assemble_convection(&d.mesh, &mix(&w1, &w2), &mix(&u1, &u2), 0.5, &d.quad).unwrap();
        let e3 = a3_m
            .add(1.0, &a3_1.add(alpha, &a3_2, beta).unwrap(), -1.0)
            .unwrap();
        let e5 = a5_m
            .add(1.0, &a5_1.add(alpha, &a5_2, beta).unwrap(), -1.0)
            .unwrap();
        assert!(e3.max_abs() < 1e-13 * (1.0 + a3_m.max_abs()));
        assert!(e5.max_abs() < 1e-13 * (1.0 + a5_m.max_abs()));
    }

    #[test]
    fn zero_natural_data_gives_zero() {
        let d = disc(1);
        let bc = BoundaryConditionSpec::uniform(
            VorticityCondition::Natural(zero_vector()),
            FlowCondition::Natural(zero_scalar()),
        );
        let part = bc.partition(&d.mesh).unwrap();
        let terms = assemble_natural_bc(&d, &bc, &part, 0.0);
        assert!(terms
            .edge_rhs
            .iter()
            .chain(&terms.face_rhs)
            .all(|&v| v == 0.0));
    }

    /// `h = 1` on the top side: each top face contributes minus its outward flux
    /// of its own basis function, which is exactly -1.
    #[test]
    fn unit_pressure_on_one_side() {
        let d = disc(1);
        let bc = BoundaryConditionSpec::default()
            .with_region(
                "top",
                box_side(2, true),
                VorticityCondition::Essential(zero_vector()),
                FlowCondition::Natural(scalar_field(|_, _| 1.0)),
            )
            .with_region(
                "rest",
                |_: &Point3, n: &Point3| n.z < 0.5,
                VorticityCondition::Essential(zero_vector()),
                FlowCondition::Essential(zero_vector()),
            );
        let part = bc.partition(&d.mesh).unwrap();
        let terms = assemble_natural_bc(&d, &bc, &part, 0.0);
        let mut top = 0;
        for f in 0..d.v2.ndof {
            let on_top = d.mesh.is_boundary_face(f) && d.mesh.outward_normal(f).z > 0.5;
            if on_top {
                top += 1;
                let expected = -(d.mesh.boundary_face_sign(f) as f64);
                assert!((terms.face_rhs[f] - expected).abs() < 1e-14);
            } else {
                assert!(terms.face_rhs[f].abs() < 1e-14);
            }
        }
        assert_eq!(top, 2);
    }

    #[test]
    fn load_of_discrete_field_is_mass_times_coefficients() {
        let d = disc(2);
        let c = constant_vector(Vec3::new(0.3, 0.0, 1.0));
        let load = load_vector(&d, &c, 0.0);
        let u = interpolate_vector(&d.v2, &c, &d.mesh, 0.0).unwrap();
        for (a, b) in load.iter().zip(d.m2.mul_vec(&u.values)) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(load_vector(&d, &zero_vector(), 0.0)
            .iter()
            .all(|&v| v == 0.0));
    }
}
