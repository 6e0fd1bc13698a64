use std::io::Write;

use super::{GridFunction, PostprocessError};
use crate::elements::Family;
use crate::mesh::Mesh;
use crate::reference::Geometry;

/// Writes a legacy ASCII VTK unstructured grid. Every field is written as
/// cell data sampled at element centers; scalar H1 fields are also written
/// as point data at the vertices.
pub fn write_vtk(
    mut out: impl Write,
    mesh: &Mesh,
    fields: &[(&str, &GridFunction)],
) -> Result<(), PostprocessError> {
    for (_, gf) in fields {
        if !std::ptr::eq(gf.space().mesh(), mesh) && gf.space().mesh() != mesh {
            return Err(PostprocessError::MeshMismatch);
        }
    }
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "finite element fields")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(out, "{:?} {:?} 0", v.x, v.y)?;
    }
    let size: usize = mesh.elements().iter().map(|e| e.vertices.len() + 1).sum();
    writeln!(out, "CELLS {} {}", mesh.num_elements(), size)?;
    for el in mesh.elements() {
        write!(out, "{}", el.vertices.len())?;
        for v in &el.vertices {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.num_elements())?;
    for el in mesh.elements() {
        writeln!(out, "{}", if el.kind == Geometry::Triangle { 5 } else { 9 })?;
    }

    if !fields.is_empty() {
        writeln!(out, "CELL_DATA {}", mesh.num_elements())?;
    }
    for (name, gf) in fields {
        let vector = gf.components() == 2;
        if vector {
            writeln!(out, "VECTORS {name} double")?;
        } else {
            writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default")?;
        }
        for (e, el) in mesh.elements().iter().enumerate() {
            let v = gf.eval(e, el.kind.center())?;
            if vector {
                writeln!(out, "{:?} {:?} 0", v[0], v[1])?;
            } else {
                writeln!(out, "{:?}", v[0])?;
            }
        }
    }

    let nodal: Vec<_> = fields
        .iter()
        .filter(|(_, gf)| gf.space().family() == Family::H1Lagrange && gf.components() == 1)
        .collect();
    if !nodal.is_empty() {
        writeln!(out, "POINT_DATA {}", mesh.num_vertices())?;
        for (name, gf) in nodal {
            writeln!(out, "SCALARS {name}_nodal double 1\nLOOKUP_TABLE default")?;
            // Vertex DOFs are numbered by vertex id.
            for c in &gf.coeffs()[..mesh.num_vertices()] {
                writeln!(out, "{c:?}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::elements::build_space;

    #[test]
    fn writes_points_cells_and_fields() {
        let mesh = Arc::new(Mesh::unit_square(2, 1, Geometry::Quad).unwrap());
        let h1 = Arc::new(build_space(mesh.clone(), Family::H1Lagrange, 1, 1).unwrap());
        let rt = Arc::new(build_space(mesh.clone(), Family::RaviartThomas, 0, 1).unwrap());
        let p = GridFunction::interpolate(h1, &|x| x[0]).unwrap();
        let u = GridFunction::zeros(rt);
        let mut out = Vec::new();
        write_vtk(&mut out, &mesh, &[("p", &p), ("u", &u)]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0"));
        assert!(text.contains("POINTS 6 double"));
        assert!(text.contains("CELLS 2 10"));
        assert!(text.contains("POINT_DATA 6"));
        assert!(text.contains("CELL_DATA 2"));
        assert!(text.contains("VECTORS u double"));
    }

    #[test]
    fn foreign_mesh_is_rejected() {
        let mesh = Arc::new(Mesh::unit_square(1, 1, Geometry::Quad).unwrap());
        let other = Mesh::unit_square(2, 1, Geometry::Quad).unwrap();
        let h1 = Arc::new(build_space(mesh, Family::H1Lagrange, 1, 1).unwrap());
        let p = GridFunction::zeros(h1);
        assert!(write_vtk(Vec::new(), &other, &[("p", &p)]).is_err());
    }
}
