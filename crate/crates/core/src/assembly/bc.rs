use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fe_spaces::{edge_circulation, face_flux};
use crate::fields::{ScalarField, VectorField};
use crate::mesh::{Point3, SimplicialMesh3};

/// Condition on the tangential part of the boundary.
#[derive(Clone)]
pub enum VorticityCondition {
    /// `omega x n` imposed through the edge circulations of this vorticity field.
    Essential(VectorField),
    /// `u x n` imposed weakly; the field is the velocity whose tangential trace is used.
    Natural(VectorField),
}

/// Condition on the normal velocity or the pressure.
#[derive(Clone)]
pub enum FlowCondition {
    /// `u . n` imposed through the face fluxes of this velocity field.
    Essential(VectorField),
    /// `p = h` imposed weakly (Bernoulli pressure).
    Natural(ScalarField),
}

/// Predicate on a boundary face, given its centroid and unit outward normal.
pub type FaceSelector = Arc<dyn Fn(&Point3, &Point3) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct BoundaryRegion {
    pub name: String,
    pub selector: FaceSelector,
    pub vorticity: VorticityCondition,
    pub flow: FlowCondition,
}

impl fmt::Debug for BoundaryRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.vorticity {
            VorticityCondition::Essential(_) => "essential",
            VorticityCondition::Natural(_) => "natural",
        };
        let p = match self.flow {
            FlowCondition::Essential(_) => "essential",
            FlowCondition::Natural(_) => "natural",
        };
        f.debug_struct("BoundaryRegion")
            .field("name", &self.name)
            .field("vorticity", &v)
            .field("flow", &p)
            .finish()
    }
}

/// Boundary conditions as a list of regions that must partition the boundary.
#[derive(Debug, Clone, Default)]
pub struct BoundaryConditionSpec {
    pub regions: Vec<BoundaryRegion>,
}

impl BoundaryConditionSpec {
    /// One region covering the whole boundary.
    pub fn uniform(vorticity: VorticityCondition, flow: FlowCondition) -> Self {
        BoundaryConditionSpec {
            regions: vec![BoundaryRegion {
                name: "boundary".into(),
                selector: Arc::new(|_, _| true),
                vorticity,
                flow,
            }],
        }
    }

    /// `omega x n = 0` and `u . n = 0` everywhere.
    pub fn homogeneous_essential() -> Self {
        Self::uniform(
            VorticityCondition::Essential(crate::fields::zero_vector()),
            FlowCondition::Essential(crate::fields::zero_vector()),
        )
    }

    pub fn with_region(
        mut self,
        name: impl Into<String>,
        selector: impl Fn(&Point3, &Point3) -> bool + Send + Sync + 'static,
        vorticity: VorticityCondition,
        flow: FlowCondition,
    ) -> Self {
        self.regions.push(BoundaryRegion {
            name: name.into(),
            selector: Arc::new(selector),
            vorticity,
            flow,
        });
        self
    }

    /// Assigns every boundary face to exactly one region.
    pub fn partition(&self, mesh: &SimplicialMesh3) -> Result<BoundaryPartition> {
        let mut face_region: Vec<Option<usize>> = vec![None; mesh.num_faces()];
        for &f in &mesh.boundary_faces {
            let c = mesh.face_centroid(f);
            let n = mesh.outward_normal(f);
            let mut hit: Option<usize> = None;
            for (r, region) in self.regions.iter().enumerate() {
                if (region.selector)(&c, &n) {
                    if let Some(prev) = hit {
                        return Err(Error::Config(format!(
                            "boundary face {f} lies in regions `{}` and `{}`",
                            self.regions[prev].name, region.name
                        )));
                    }
                    hit = Some(r);
                }
            }
            match hit {
                Some(r) => face_region[f] = Some(r),
                None => {
                    return Err(Error::Config(format!(
                        "boundary face {f} at {c:?} is in no region"
                    )))
                }
            }
        }
        let mut essential_edges = Vec::new();
        let mut edge_seen = vec![false; mesh.num_edges()];
        let mut essential_faces = Vec::new();
        for &f in &mesh.boundary_faces {
            let r = face_region[f].expect("assigned above");
            if let VorticityCondition::Essential(_) = self.regions[r].vorticity {
                for &e in &mesh.face_edges[f] {
                    if !edge_seen[e] {
                        edge_seen[e] = true;
                        essential_edges.push((e, r));
                    }
                }
            }
            if let FlowCondition::Essential(_) = self.regions[r].flow {
                essential_faces.push((f, r));
            }
        }
        essential_edges.sort_unstable();
        Ok(BoundaryPartition {
            face_region,
            essential_edges,
            essential_faces,
        })
    }

    pub fn flow_essential_everywhere(&self, mesh: &SimplicialMesh3) -> Result<bool> {
        let part = self.partition(mesh)?;
        Ok(part.essential_faces.len() == mesh.boundary_faces.len())
    }
}

/// Region membership of boundary faces and the constrained dofs it implies.
#[derive(Debug, Clone)]
pub struct BoundaryPartition {
    /// Region index of each boundary face, `None` for interior faces.
    pub face_region: Vec<Option<usize>>,
    /// Boundary edges touching an essential-vorticity face, with the region supplying data.
    pub essential_edges: Vec<(usize, usize)>,
    /// Boundary faces with essential normal velocity, sorted.
    pub essential_faces: Vec<(usize, usize)>,
}

impl BoundaryPartition {
    /// Edge circulations of the essential vorticity data at time `t`.
    pub fn vorticity_values(
        &self,
        bc: &BoundaryConditionSpec,
        mesh: &SimplicialMesh3,
        t: f64,
    ) -> Vec<(usize, f64)> {
        self.essential_edges
            .iter()
            .map(|&(e, r)| match &bc.regions[r].vorticity {
                VorticityCondition::Essential(w) => (e, edge_circulation(mesh, w, e, t)),
                VorticityCondition::Natural(_) => {
                    unreachable!("essential edges come from essential regions")
                }
            })
            .collect()
    }

    /// Face fluxes of the essential velocity data at time `t`.
    ///
    /// When the whole boundary is flow-essential the outward fluxes are shifted
    /// by an area-weighted constant so that they sum to zero, the discrete
    /// compatibility condition for a divergence-free velocity.
    pub fn flux_values(
        &self,
        bc: &BoundaryConditionSpec,
        mesh: &SimplicialMesh3,
        t: f64,
    ) -> Vec<(usize, f64)> {
        let mut values: Vec<(usize, f64)> = self
            .essential_faces
            .iter()
            .map(|&(f, r)| match &bc.regions[r].flow {
                FlowCondition::Essential(u) => (f, face_flux(mesh, u, f, t)),
                FlowCondition::Natural(_) => {
                    unreachable!("essential faces come from essential regions")
                }
            })
            .collect();
        if self.essential_faces.len() == mesh.boundary_faces.len() && !values.is_empty() {
            let mut net = 0.0;
            let mut area = 0.0;
            for &(f, v) in &values {
                net += mesh.boundary_face_sign(f) as f64 * v;
                area += mesh.face_area(f);
            }
            let shift = net / area;
            for (f, v) in values.iter_mut() {
                *v -= mesh.boundary_face_sign(*f) as f64 * mesh.face_area(*f) * shift;
            }
        }
        values
    }
}

/// Selector for the side of an axis-aligned box: `axis` in 0..3, `upper` picks `x_axis = hi`.
pub fn box_side(
    axis: usize,
    upper: bool,
) -> impl Fn(&Point3, &Point3) -> bool + Send + Sync + Clone {
    move |_, n: &Point3| {
        let s = if upper { 1.0 } else { -1.0 };
        (n[axis] - s).abs() < 1e-8
    }
}
