//! Oriented tetrahedral meshes with their full 0/1/2/3-skeleton.
//!
//! Every simplex is stored with its vertex indices sorted ascending, and that
//! ordering *is* its orientation. Local sub-simplices of a tetrahedron therefore
//! always carry the same orientation as the global simplex they map to; the
//! only non-trivial sign is the one relating a tetrahedron's vertex order to the
//! ambient orientation of R^3 (see [`SimplicialMesh3::tet_signs`]).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;

/// Local edges of a sorted tetrahedron, as pairs of local vertex positions.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local faces of a sorted tetrahedron. Face `i` is the one opposite vertex `i`.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Local edges of a sorted triangle `[a, b, c]`: `(a,b)`, `(a,c)`, `(b,c)`.
pub const FACE_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

/// Incidence of the face edges in the oriented boundary `[b,c] - [a,c] + [a,b]`.
pub const FACE_EDGE_SIGNS: [i8; 3] = [1, -1, 1];

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone)]
pub struct SimplicialMesh3 {
    id: u64,
    pub vertices: Vec<Point3>,
    pub tets: Vec<[usize; 4]>,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<[usize; 3]>,
    pub tet_edges: Vec<[usize; 6]>,
    pub tet_faces: Vec<[usize; 4]>,
    pub face_edges: Vec<[usize; 3]>,
    /// The one or two tetrahedra incident to each face.
    pub face_tets: Vec<(usize, Option<usize>)>,
    /// +1 when the ascending vertex order of the tet is positively oriented in R^3.
    pub tet_signs: Vec<i8>,
    pub tet_volumes: Vec<f64>,
    pub boundary_faces: Vec<usize>,
    pub boundary_edges: Vec<usize>,
    pub boundary_vertices: Vec<usize>,
}

impl SimplicialMesh3 {
    /// Builds the full skeleton from vertex coordinates and tetrahedra given in any
    /// vertex order.
    pub fn from_tets(vertices: Vec<Point3>, tets: Vec<[usize; 4]>) -> Result<Self> {
        if tets.is_empty() {
            return Err(Error::InvalidMesh("mesh has no tetrahedra".into()));
        }
        let nv = vertices.len();
        let mut sorted = Vec::with_capacity(tets.len());
        for (t, tet) in tets.iter().enumerate() {
            let mut s = *tet;
            s.sort_unstable();
            if s[3] >= nv {
                return Err(Error::InvalidMesh(format!(
                    "tet {t} references vertex {} of {nv}",
                    s[3]
                )));
            }
            if s[0] == s[1] || s[1] == s[2] || s[2] == s[3] {
                return Err(Error::InvalidMesh(format!("tet {t} has repeated vertices")));
            }
            sorted.push(s);
        }
        let tets = sorted;

        let mut edge_set: Vec<[usize; 2]> = tets
            .iter()
            .flat_map(|t| TET_EDGES.iter().map(move |&[a, b]| [t[a], t[b]]))
            .collect();
        edge_set.sort_unstable();
        edge_set.dedup();
        let edge_index: HashMap<[usize; 2], usize> =
            edge_set.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        let mut face_set: Vec<[usize; 3]> = tets
            .iter()
            .flat_map(|t| TET_FACES.iter().map(move |&[a, b, c]| [t[a], t[b], t[c]]))
            .collect();
        face_set.sort_unstable();
        face_set.dedup();
        let face_index: HashMap<[usize; 3], usize> =
            face_set.iter().enumerate().map(|(i, &f)| (f, i)).collect();

        let tet_edges: Vec<[usize; 6]> = tets
            .iter()
            .map(|t| TET_EDGES.map(|[a, b]| edge_index[&[t[a], t[b]]]))
            .collect();
        let tet_faces: Vec<[usize; 4]> = tets
            .iter()
            .map(|t| TET_FACES.map(|[a, b, c]| face_index[&[t[a], t[b], t[c]]]))
            .collect();
        let face_edges: Vec<[usize; 3]> = face_set
            .iter()
            .map(|f| FACE_EDGES.map(|[a, b]| edge_index[&[f[a], f[b]]]))
            .collect();

        let mut face_tets: Vec<(usize, Option<usize>)> = vec![(usize::MAX, None); face_set.len()];
        for (t, faces) in tet_faces.iter().enumerate() {
            for &f in faces {
                let entry = &mut face_tets[f];
                if entry.0 == usize::MAX {
                    entry.0 = t;
                } else if entry.1.is_none() {
                    entry.1 = Some(t);
                } else {
                    return Err(Error::InvalidMesh(format!(
                        "face {f} shared by more than two tets"
                    )));
                }
            }
        }

        let mut tet_signs = Vec::with_capacity(tets.len());
        let mut tet_volumes = Vec::with_capacity(tets.len());
        for (t, tet) in tets.iter().enumerate() {
            let [p0, p1, p2, p3] = tet.map(|v| vertices[v]);
            let det = (p1 - p0).cross(&(p2 - p0)).dot(&(p3 - p0));
            let scale = (p1 - p0).norm() * (p2 - p0).norm() * (p3 - p0).norm();
            if det.abs() <= 1e-13 * scale {
                return Err(Error::InvalidMesh(format!("tet {t} is degenerate")));
            }
            tet_signs.push(if det > 0.0 { 1 } else { -1 });
            tet_volumes.push(det.abs() / 6.0);
        }

        let mut mesh = SimplicialMesh3 {
            id: NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed),
            vertices,
            tets,
            edges: edge_set,
            faces: face_set,
            tet_edges,
            tet_faces,
            face_edges,
            face_tets,
            tet_signs,
            tet_volumes,
            boundary_faces: Vec::new(),
            boundary_edges: Vec::new(),
            boundary_vertices: Vec::new(),
        };
        let (bf, be, bv) = boundary_skeleton(&mesh);
        mesh.boundary_faces = bf;
        mesh.boundary_edges = be;
        mesh.boundary_vertices = bv;
        Ok(mesh)
    }

    /// Identity of this mesh instance; spaces and coefficient vectors remember it.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    /// `V - E + F - T`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
            - self.num_tets() as i64
    }

    pub fn tet_points(&self, t: usize) -> [Point3; 4] {
        self.tets[t].map(|v| self.vertices[v])
    }

    pub fn face_points(&self, f: usize) -> [Point3; 3] {
        self.faces[f].map(|v| self.vertices[v])
    }

    /// Maps barycentric coordinates in tet `t` to a physical point.
    pub fn tet_point(&self, t: usize, bary: &[f64; 4]) -> Point3 {
        let p = self.tet_points(t);
        p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2] + p[3] * bary[3]
    }

    /// Gradients of the four barycentric coordinates of tet `t`.
    pub fn bary_gradients(&self, t: usize) -> [Point3; 4] {
        let [p0, p1, p2, p3] = self.tet_points(t);
        let (e1, e2, e3) = (p1 - p0, p2 - p0, p3 - p0);
        let det = e1.cross(&e2).dot(&e3);
        let g1 = e2.cross(&e3) / det;
        let g2 = e3.cross(&e1) / det;
        let g3 = e1.cross(&e2) / det;
        [-(g1 + g2 + g3), g1, g2, g3]
    }

    /// Oriented area normal `(b - a) x (c - a)` of face `f`, with length twice the area.
    pub fn face_area_normal(&self, f: usize) -> Point3 {
        let [a, b, c] = self.face_points(f);
        (b - a).cross(&(c - a))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_area_normal(f).norm()
    }

    /// +1 if the canonical normal of face `f` points out of tet `t`, -1 otherwise.
    pub fn face_sign_in_tet(&self, t: usize, local_face: usize) -> i8 {
        // boundary of [v0 v1 v2 v3] is sum_i (-1)^i [.. omit i ..]
        let parity = if local_face.is_multiple_of(2) { 1 } else { -1 };
        parity * self.tet_signs[t]
    }

    /// +1 if the canonical normal of boundary face `f` is the outward normal.
    pub fn boundary_face_sign(&self, f: usize) -> i8 {
        let t = self.face_tets[f].0;
        let local = self.tet_faces[t]
            .iter()
            .position(|&g| g == f)
            .expect("face is incident to its tet");
        self.face_sign_in_tet(t, local)
    }

    /// Unit outward normal of a boundary face.
    pub fn outward_normal(&self, f: usize) -> Point3 {
        let n = self.face_area_normal(f).normalize();
        n * self.boundary_face_sign(f) as f64
    }

    pub fn face_centroid(&self, f: usize) -> Point3 {
        let [a, b, c] = self.face_points(f);
        (a + b + c) / 3.0
    }

    pub fn total_volume(&self) -> f64 {
        self.tet_volumes.iter().sum()
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.face_tets[f].1.is_none()
    }

    /// Checks the structural invariants of a conforming, positively measured mesh.
    pub fn validate(&self) -> Result<()> {
        if self.tet_volumes.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidMesh("non-positive tet volume".into()));
        }
        for (f, &(a, b)) in self.face_tets.iter().enumerate() {
            if a == usize::MAX {
                return Err(Error::InvalidMesh(format!("face {f} has no incident tet")));
            }
            if b == Some(a) {
                return Err(Error::InvalidMesh(format!("face {f} repeated in tet {a}")));
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty mesh file".into(),
        })?;
        let header = header?;
        let mut tok = header.split_whitespace();
        if tok.next() != Some("tetmesh") {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected `tetmesh <V> <T>` header".into(),
            });
        }
        let parse_count = |s: Option<&str>| -> Result<usize> {
            s.and_then(|s| s.parse().ok()).ok_or(Error::Parse {
                line: line_no,
                msg: "bad count in header".into(),
            })
        };
        let nv = parse_count(tok.next())?;
        let nt = parse_count(tok.next())?;

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines.next().ok_or(Error::Parse {
                line: line_no,
                msg: "missing vertex lines".into(),
            })?;
            let l = l?;
            let v: Vec<f64> = l
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: ln,
                    msg: e.to_string(),
                })?;
            if v.len() != 3 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "expected `x y z`".into(),
                });
            }
            vertices.push(Point3::new(v[0], v[1], v[2]));
        }
        let mut tets = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines.next().ok_or(Error::Parse {
                line: line_no,
                msg: "missing tet lines".into(),
            })?;
            let l = l?;
            let v: Vec<usize> = l
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: ln,
                    msg: e.to_string(),
                })?;
            if v.len() != 4 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "expected `v0 v1 v2 v3`".into(),
                });
            }
            tets.push([v[0], v[1], v[2], v[3]]);
        }
        Self::from_tets(vertices, tets)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::new();
        writeln!(s, "tetmesh {} {}", self.num_vertices(), self.num_tets()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:e} {:e} {:e}", v.x, v.y, v.z).unwrap();
        }
        for t in &self.tets {
            writeln!(s, "{} {} {} {}", t[0], t[1], t[2], t[3]).unwrap();
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_text(std::io::BufReader::new(f))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_text(std::io::BufWriter::new(f))
    }
}

/// Kuhn subdivision of an `nx x ny x nz` box into `6 nx ny nz` tetrahedra.
pub fn build_box_mesh(
    nx: usize,
    ny: usize,
    nz: usize,
    lo: Point3,
    hi: Point3,
) -> Result<SimplicialMesh3> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidArgument(format!(
            "cell counts must be positive, got ({nx},{ny},{nz})"
        )));
    }
    if !(hi.x > lo.x && hi.y > lo.y && hi.z > lo.z) {
        return Err(Error::InvalidArgument("box extents are degenerate".into()));
    }
    let vid = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                let s = Point3::new(
                    i as f64 / nx as f64,
                    j as f64 / ny as f64,
                    k as f64 / nz as f64,
                );
                vertices.push(lo + (hi - lo).component_mul(&s));
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut tet = [vid(c[0], c[1], c[2]), 0, 0, 0];
                    for (step, &axis) in perm.iter().enumerate() {
                        c[axis] += 1;
                        tet[step + 1] = vid(c[0], c[1], c[2]);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    SimplicialMesh3::from_tets(vertices, tets)
}

/// Boundary faces (one incident tet) and the edges and vertices they touch, each sorted.
pub fn boundary_skeleton(mesh: &SimplicialMesh3) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let faces: Vec<usize> = (0..mesh.num_faces())
        .filter(|&f| mesh.is_boundary_face(f))
        .collect();
    let mut edges: Vec<usize> = faces.iter().flat_map(|&f| mesh.face_edges[f]).collect();
    edges.sort_unstable();
    edges.dedup();
    let mut verts: Vec<usize> = faces.iter().flat_map(|&f| mesh.faces[f]).collect();
    verts.sort_unstable();
    verts.dedup();
    (faces, edges, verts)
}

/// Largest tet diameter, i.e. the longest edge.
pub fn mesh_size(mesh: &SimplicialMesh3) -> f64 {
    mesh.edges
        .iter()
        .map(|&[a, b]| (mesh.vertices[a] - mesh.vertices[b]).norm())
        .fold(0.0, f64::max)
}
