//! Lowest-order Whitney bases on a single tetrahedron, as vector proxies.
//!
//! Local edges follow [`TET_EDGES`] and local faces follow [`TET_FACES`]. Since
//! tets store their vertices in ascending order, every local edge and face is
//! already in canonical orientation, so local and global bases agree in sign.

use crate::fields::Vec3;
use crate::mesh::{SimplicialMesh3, TET_EDGES, TET_FACES};

/// Geometry of one tet needed to evaluate its Whitney bases.
#[derive(Debug, Clone, Copy)]
pub struct TetFrame {
    pub grads: [Vec3; 4],
    pub volume: f64,
}

impl TetFrame {
    pub fn new(mesh: &SimplicialMesh3, t: usize) -> Self {
        TetFrame {
            grads: mesh.bary_gradients(t),
            volume: mesh.tet_volumes[t],
        }
    }

    /// `lambda_a grad lambda_b - lambda_b grad lambda_a` for each local edge.
    pub fn edge_basis(&self, lambda: &[f64; 4]) -> [Vec3; 6] {
        let g = &self.grads;
        TET_EDGES.map(|[a, b]| lambda[a] * g[b] - lambda[b] * g[a])
    }

    /// Constant curls `2 grad lambda_a x grad lambda_b`.
    pub fn edge_curls(&self) -> [Vec3; 6] {
        let g = &self.grads;
        TET_EDGES.map(|[a, b]| 2.0 * g[a].cross(&g[b]))
    }

    /// `2 (lambda_a grad lambda_b x grad lambda_c + cyclic)` for each local face.
    pub fn face_basis(&self, lambda: &[f64; 4]) -> [Vec3; 4] {
        let g = &self.grads;
        TET_FACES.map(|[a, b, c]| {
            2.0 * (lambda[a] * g[b].cross(&g[c])
                + lambda[b] * g[c].cross(&g[a])
                + lambda[c] * g[a].cross(&g[b]))
        })
    }

    /// Constant divergences `6 grad lambda_a . (grad lambda_b x grad lambda_c)`.
    pub fn face_divs(&self) -> [f64; 4] {
        let g = &self.grads;
        TET_FACES.map(|[a, b, c]| 6.0 * g[a].dot(&g[b].cross(&g[c])))
    }

    /// Physical quadrature weight for a reference weight.
    pub fn weight(&self, reference_weight: f64) -> f64 {
        6.0 * self.volume * reference_weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_box_mesh, Point3};
    use crate::quadrature::{LineRule, TriangleRule};

    fn mesh() -> SimplicialMesh3 {
        build_box_mesh(1, 1, 1, Point3::zeros(), Point3::new(1.0, 2.0, 0.5)).unwrap()
    }

    #[test]
    fn edge_basis_has_unit_circulation_on_its_edge() {
        let m = mesh();
        let line = LineRule::gauss(3);
        for t in 0..m.num_tets() {
            let fr = TetFrame::new(&m, t);
            let p = m.tet_points(t);
            for (e, &[a, b]) in TET_EDGES.iter().enumerate() {
                for (f, &[c, d]) in TET_EDGES.iter().enumerate() {
                    let mut circ = 0.0;
                    for (&s, &w) in line.points.iter().zip(&line.weights) {
                        let mut lam = [0.0; 4];
                        lam[c] = 1.0 - s;
                        lam[d] = s;
                        circ += w * fr.edge_basis(&lam)[e].dot(&(p[d] - p[c]));
                    }
                    let expected = if e == f { 1.0 } else { 0.0 };
                    assert!(
                        (circ - expected).abs() < 1e-13,
                        "tet {t} edge {a}{b} on {c}{d}: {circ}"
                    );
                }
            }
        }
    }

    #[test]
    fn face_basis_has_unit_flux_on_its_face() {
        let m = mesh();
        let tri = TriangleRule::degree5();
        for t in 0..m.num_tets() {
            let fr = TetFrame::new(&m, t);
            let p = m.tet_points(t);
            for i in 0..4 {
                for (j, &[a, b, c]) in TET_FACES.iter().enumerate() {
                    let normal = 0.5 * (p[b] - p[a]).cross(&(p[c] - p[a]));
                    let mut flux = 0.0;
                    for (q, &w) in tri.points.iter().zip(&tri.weights) {
                        let mut lam = [0.0; 4];
                        lam[a] = q[0];
                        lam[b] = q[1];
                        lam[c] = q[2];
                        flux += w * fr.face_basis(&lam)[i].dot(&normal);
                    }
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (flux - expected).abs() < 1e-13,
                        "tet {t} face {i} on {j}: {flux}"
                    );
                }
            }
        }
    }

    #[test]
    fn divergence_integrates_to_outward_orientation() {
        let m = mesh();
        for t in 0..m.num_tets() {
            let fr = TetFrame::new(&m, t);
            for (i, d) in fr.face_divs().iter().enumerate() {
                let integral = d * fr.volume;
                assert!((integral - m.face_sign_in_tet(t, i) as f64).abs() < 1e-13);
            }
        }
    }
}
