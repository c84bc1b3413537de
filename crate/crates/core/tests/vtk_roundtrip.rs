use vtkio::model::{Attribute, CellType, DataSet, ElementType, Piece, VertexNumbers};
use vtkio::Vtk;

use feec_ns::assembly::{BoundaryConditionSpec, BoundarySetup, FlowCondition, VorticityCondition};
use feec_ns::experiments::{box_mesh, export_vtk, solution_fields, CellData};
use feec_ns::fe_spaces::Discretization;
use feec_ns::fields::StokesMms;
use feec_ns::solver::solve_stokes;

#[test]
fn solution_file_parses_with_an_independent_reader() {
    let d = Discretization::new(box_mesh(2, 0.0, 1.0).unwrap()).unwrap();
    let bc = BoundaryConditionSpec::uniform(
        VorticityCondition::Essential(StokesMms::vorticity_field()),
        FlowCondition::Essential(StokesMms::velocity_field()),
    );
    let setup = BoundarySetup::new(&d, &bc).unwrap();
    let s = solve_stokes(&d, &setup, 1.0, &StokesMms::force(1.0), None).unwrap();
    let fields = solution_fields(&d, &s.omega, &s.u, &s.p).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stokes.vtk");
    export_vtk(&path, &d.mesh, "stokes solution", &fields).unwrap();
    let vtk = Vtk::import(&path).unwrap();
    assert_eq!(vtk.title, "stokes solution");

    let DataSet::UnstructuredGrid { pieces, .. } = vtk.data else {
        panic!("expected an unstructured grid")
    };
    let Piece::Inline(piece) = &pieces[0] else {
        panic!("expected inline piece data")
    };

    let points: Vec<f64> = piece.points.clone().cast_into().unwrap();
    assert_eq!(points.len(), 3 * d.mesh.num_vertices());
    for (i, v) in d.mesh.vertices.iter().enumerate() {
        for k in 0..3 {
            assert_eq!(points[3 * i + k], v[k]);
        }
    }

    assert!(piece.cells.types.iter().all(|t| *t == CellType::Tetra));
    assert_eq!(piece.cells.types.len(), d.mesh.num_tets());
    let VertexNumbers::Legacy {
        num_cells,
        vertices,
    } = &piece.cells.cell_verts
    else {
        panic!("expected legacy cells")
    };
    assert_eq!(*num_cells as usize, d.mesh.num_tets());
    for (t, chunk) in d.mesh.tets.iter().zip(vertices.chunks(5)) {
        assert_eq!(chunk[0], 4);
        let ids: Vec<usize> = chunk[1..].iter().map(|&i| i as usize).collect();
        assert_eq!(ids, t.to_vec());
    }

    assert!(piece.data.point.is_empty());
    assert_eq!(piece.data.cell.len(), fields.len());
    for (attr, field) in piece.data.cell.iter().zip(&fields) {
        let Attribute::DataArray(arr) = attr else {
            panic!("unexpected field attribute")
        };
        assert_eq!(arr.name, field.name);
        let values: Vec<f64> = arr.data.clone().cast_into().unwrap();
        match (&arr.elem, &field.data) {
            (ElementType::Scalars { num_comp: 1, .. }, CellData::Scalar(expected)) => {
                assert_eq!(&values, expected);
            }
            (ElementType::Vectors, CellData::Vector(expected)) => {
                let flat: Vec<f64> = expected.iter().flat_map(|v| [v.x, v.y, v.z]).collect();
                assert_eq!(values, flat);
            }
            (elem, _) => panic!("field `{}` read back as {elem:?}", field.name),
        }
    }
}
