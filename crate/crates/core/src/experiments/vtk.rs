use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fe_spaces::{cell_average_vector, Discretization, FormCoefficients};
use crate::fields::Vec3;
use crate::mesh::SimplicialMesh3;

/// Per-cell data written to a VTK file.
#[derive(Debug, Clone, PartialEq)]
pub enum CellData {
    Scalar(Vec<f64>),
    Vector(Vec<Vec3>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VtkField {
    pub name: String,
    pub data: CellData,
}

impl VtkField {
    pub fn scalar(name: impl Into<String>, values: Vec<f64>) -> Self {
        VtkField {
            name: name.into(),
            data: CellData::Scalar(values),
        }
    }

    pub fn vector(name: impl Into<String>, values: Vec<Vec3>) -> Self {
        VtkField {
            name: name.into(),
            data: CellData::Vector(values),
        }
    }

    fn len(&self) -> usize {
        match &self.data {
            CellData::Scalar(v) => v.len(),
            CellData::Vector(v) => v.len(),
        }
    }
}

/// Velocity and vorticity evaluated at cell barycenters, pressure density and
/// divergence density.
pub fn solution_fields(
    disc: &Discretization,
    omega: &FormCoefficients,
    u: &FormCoefficients,
    p: &FormCoefficients,
) -> Result<Vec<VtkField>> {
    let mesh = &disc.mesh;
    let pressure = p
        .values
        .iter()
        .zip(&mesh.tet_volumes)
        .map(|(c, v)| c / v)
        .collect();
    Ok(vec![
        VtkField::vector("velocity", cell_average_vector(u, mesh)?),
        VtkField::vector("vorticity", cell_average_vector(omega, mesh)?),
        VtkField::scalar("pressure", pressure),
        VtkField::scalar("divergence", disc.divergence_density(&u.values)),
    ])
}

/// Legacy ASCII unstructured grid with tetrahedral cells (type 10) and cell data.
pub fn write_vtk<W: Write>(
    mut w: W,
    mesh: &SimplicialMesh3,
    title: &str,
    fields: &[VtkField],
) -> Result<()> {
    for f in fields {
        if f.len() != mesh.num_tets() {
            return Err(Error::Dimension(format!(
                "field `{}` has {} values for {} cells",
                f.name,
                f.len(),
                mesh.num_tets()
            )));
        }
        if f.name.is_empty() || f.name.contains(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "VTK array name `{}` must be a single word",
                f.name
            )));
        }
    }
    let title = title
        .lines()
        .next()
        .unwrap_or("")
        .chars()
        .take(255)
        .collect::<String>();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.num_vertices())?;
    for p in &mesh.vertices {
        writeln!(w, "{:e} {:e} {:e}", p.x, p.y, p.z)?;
    }
    let nt = mesh.num_tets();
    writeln!(w, "CELLS {} {}", nt, 5 * nt)?;
    for t in &mesh.tets {
        writeln!(w, "4 {} {} {} {}", t[0], t[1], t[2], t[3])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "10")?;
    }
    if !fields.is_empty() {
        writeln!(w, "CELL_DATA {nt}")?;
    }
    for f in fields {
        match &f.data {
            CellData::Scalar(v) => {
                writeln!(w, "SCALARS {} double 1", f.name)?;
                writeln!(w, "LOOKUP_TABLE default")?;
                for x in v {
                    writeln!(w, "{x:e}")?;
                }
            }
            CellData::Vector(v) => {
                writeln!(w, "VECTORS {} double", f.name)?;
                for x in v {
                    writeln!(w, "{:e} {:e} {:e}", x.x, x.y, x.z)?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn export_vtk(
    path: impl AsRef<Path>,
    mesh: &SimplicialMesh3,
    title: &str,
    fields: &[VtkField],
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path)
        .map_err(|e| Error::from(e).context(path.display().to_string()))?;
    write_vtk(std::io::BufWriter::new(file), mesh, title, fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe_spaces::interpolate_vector;
    use crate::fields::constant_vector;
    use crate::mesh::{build_box_mesh, Point3};

    #[test]
    fn constant_velocity_in_every_cell() {
        let d = Discretization::new(
            build_box_mesh(2, 1, 1, Point3::zeros(), Point3::repeat(1.0)).unwrap(),
        )
        .unwrap();
        let u = interpolate_vector(
            &d.v2,
            &constant_vector(Vec3::new(1.0, 0.0, 0.0)),
            &d.mesh,
            0.0,
        )
        .unwrap();
        let fields = solution_fields(&d, &d.v1.zeros(), &u, &d.v3.zeros()).unwrap();
        match &fields[0].data {
            CellData::Vector(v) => {
                for x in v {
                    assert!((x - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-13);
                }
            }
            _ => panic!("velocity should be a vector field"),
        }
        let mut buf = Vec::new();
        write_vtk(&mut buf, &d.mesh, "t", &fields).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("CELL_TYPES 12\n"));
        assert!(text.contains("VECTORS velocity double\n"));
    }

    #[test]
    fn rejects_bad_fields() {
        let m = build_box_mesh(1, 1, 1, Point3::zeros(), Point3::repeat(1.0)).unwrap();
        let short = VtkField::scalar("p", vec![0.0; 2]);
        assert!(matches!(
            write_vtk(Vec::new(), &m, "t", &[short]),
            Err(Error::Dimension(_))
        ));
        let spaced = VtkField::scalar("two words", vec![0.0; 6]);
        assert!(write_vtk(Vec::new(), &m, "t", &[spaced]).is_err());
    }
}
