//! Reader and writer for the Gmsh MSH 2.2 ASCII subset used by this crate.
//!
//! Supported: `$MeshFormat` (exactly "2.2 0 8"), `$Nodes`, `$Elements` with
//! element types 1 (2-node line, skipped — topology comes from cells),
//! 2 (triangle), and 3 (quadrangle). Physical/geometric tags are ignored;
//! the boundary is inferred topologically. Unknown sections are skipped.

use super::PolygonalMesh;
use crate::error::MeshError;
use nalgebra::Point2;
use std::collections::HashMap;
use std::io::{BufRead, Write};

/// Parses an MSH 2.2 ASCII stream into a mesh.
pub fn load_msh(reader: impl std::io::Read) -> Result<PolygonalMesh, MeshError> {
    let reader = std::io::BufReader::new(reader);
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line?);
    }
    let mut vertices: Vec<Point2<f64>> = Vec::new();
    let mut id_map: HashMap<usize, usize> = HashMap::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut saw_format = false;

    let parse = |line: usize, msg: &str| MeshError::Parse { line: line + 1, msg: msg.into() };

    let mut i = 0;
    while i < lines.len() {
        let section = lines[i].trim();
        if section.is_empty() {
            i += 1;
            continue;
        }
        if !section.starts_with('$') {
            return Err(parse(i, &format!("expected a section marker, got {section:?}")));
        }
        match section {
            "$MeshFormat" => {
                let header = lines.get(i + 1).map(|s| s.trim()).unwrap_or("");
                if header != "2.2 0 8" {
                    return Err(MeshError::BadHeader(header.to_string()));
                }
                saw_format = true;
                i = end_of_section(&lines, i, "$EndMeshFormat").ok_or_else(|| {
                    parse(i, "unterminated $MeshFormat section")
                })?;
            }
            "$Nodes" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| parse(i + 1, "expected node count"))?;
                for k in 0..count {
                    let line_no = i + 2 + k;
                    let line = lines.get(line_no).ok_or_else(|| parse(line_no, "missing node"))?;
                    let mut it = line.split_whitespace();
                    let id: usize = next_num(&mut it, line_no, "node id")?;
                    let x: f64 = next_num(&mut it, line_no, "x")?;
                    let y: f64 = next_num(&mut it, line_no, "y")?;
                    let z: f64 = next_num(&mut it, line_no, "z")?;
                    if z.abs() > 1e-12 {
                        return Err(MeshError::NonPlanarNode { id, z });
                    }
                    id_map.insert(id, vertices.len());
                    vertices.push(Point2::new(x, y));
                }
                i = end_of_section(&lines, i, "$EndNodes")
                    .ok_or_else(|| parse(i, "unterminated $Nodes section"))?;
            }
            "$Elements" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| parse(i + 1, "expected element count"))?;
                for k in 0..count {
                    let line_no = i + 2 + k;
                    let line =
                        lines.get(line_no).ok_or_else(|| parse(line_no, "missing element"))?;
                    let mut it = line.split_whitespace();
                    let id: usize = next_num(&mut it, line_no, "element id")?;
                    let etype: usize = next_num(&mut it, line_no, "element type")?;
                    let ntags: usize = next_num(&mut it, line_no, "tag count")?;
                    for _ in 0..ntags {
                        let _: i64 = next_num(&mut it, line_no, "tag")?;
                    }
                    let nnodes = match etype {
                        1 => 2, // embedded line: carries no cell topology
                        2 => 3,
                        3 => 4,
                        _ => return Err(MeshError::UnsupportedElement { id, etype }),
                    };
                    let mut nodes = Vec::with_capacity(nnodes);
                    for _ in 0..nnodes {
                        let nid: usize = next_num(&mut it, line_no, "node reference")?;
                        let idx = *id_map.get(&nid).ok_or_else(|| {
                            parse(line_no, &format!("element {id} references unknown node {nid}"))
                        })?;
                        nodes.push(idx);
                    }
                    if etype != 1 {
                        cells.push(nodes);
                    }
                }
                i = end_of_section(&lines, i, "$EndElements")
                    .ok_or_else(|| parse(i, "unterminated $Elements section"))?;
            }
            other => {
                // Skip unknown sections ($PhysicalNames, ...).
                let end = format!("$End{}", &other[1..]);
                i = end_of_section(&lines, i, &end)
                    .ok_or_else(|| parse(i, &format!("unterminated {other} section")))?;
            }
        }
        i += 1;
    }
    if !saw_format {
        return Err(MeshError::BadHeader(String::new()));
    }
    PolygonalMesh::from_cells(vertices, cells)
}

fn end_of_section(lines: &[String], start: usize, end_marker: &str) -> Option<usize> {
    (start + 1..lines.len()).find(|&j| lines[j].trim() == end_marker)
}

fn next_num<T: std::str::FromStr>(
    it: &mut std::str::SplitWhitespace,
    line: usize,
    what: &str,
) -> Result<T, MeshError> {
    it.next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| MeshError::Parse { line: line + 1, msg: format!("expected {what}") })
}

/// Writes a triangle/quad mesh in MSH 2.2 ASCII (round-trips with [`load_msh`]).
pub fn write_msh(mesh: &PolygonalMesh, mut out: impl Write) -> Result<(), MeshError> {
    for (k, cell) in mesh.cells().iter().enumerate() {
        if cell.len() > 4 {
            return Err(MeshError::UnsupportedCellShape { cell: k, nvertices: cell.len() });
        }
    }
    writeln!(out, "$MeshFormat\n2.2 0 8\n$EndMeshFormat")?;
    writeln!(out, "$Nodes\n{}", mesh.vertices().len())?;
    for (i, p) in mesh.vertices().iter().enumerate() {
        writeln!(out, "{} {:.17e} {:.17e} 0", i + 1, p.x, p.y)?;
    }
    writeln!(out, "$EndNodes")?;
    writeln!(out, "$Elements\n{}", mesh.n_cells())?;
    for (k, cell) in mesh.cells().iter().enumerate() {
        let etype = if cell.len() == 3 { 2 } else { 3 };
        let nodes: Vec<String> = cell.iter().map(|v| (v + 1).to_string()).collect();
        writeln!(out, "{} {} 2 0 0 {}", k + 1, etype, nodes.join(" "))?;
    }
    writeln!(out, "$EndElements")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_lshape_triangular, generate_structured_quad};

    const TWO_TRIS: &str = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
3
1 1 2 0 1 1 2
2 2 2 0 1 1 2 3
3 2 2 0 1 1 3 4
$EndElements
";

    #[test]
    fn loads_two_triangle_square() {
        let m = load_msh(TWO_TRIS.as_bytes()).unwrap();
        assert_eq!(m.n_cells(), 2);
        assert_eq!(m.interior_edges().len(), 1);
        assert_eq!(m.boundary_edges().len(), 4);
    }

    #[test]
    fn rejects_bad_header() {
        let bad = TWO_TRIS.replace("2.2 0 8", "4.1 0 8");
        assert!(matches!(load_msh(bad.as_bytes()), Err(MeshError::BadHeader(h)) if h == "4.1 0 8"));
    }

    #[test]
    fn rejects_unsupported_element_type() {
        // Element type 4 = tetrahedron.
        let bad = TWO_TRIS.replace("2 2 2 0 1 1 2 3", "2 4 2 0 1 1 2 3 4");
        assert!(matches!(
            load_msh(bad.as_bytes()),
            Err(MeshError::UnsupportedElement { id: 2, etype: 4 })
        ));
    }

    #[test]
    fn rejects_nonzero_z() {
        let bad = TWO_TRIS.replace("3 1 1 0", "3 1 1 0.5");
        assert!(matches!(load_msh(bad.as_bytes()), Err(MeshError::NonPlanarNode { id: 3, .. })));
    }

    #[test]
    fn rejects_non_manifold_edge() {
        // A duplicated triangle makes edge (1,3) incident to three cells.
        let bad = TWO_TRIS
            .replace("$Elements\n3", "$Elements\n4")
            .replace("3 2 2 0 1 1 3 4", "3 2 2 0 1 1 3 4\n4 2 2 0 1 1 3 4");
        assert!(matches!(load_msh(bad.as_bytes()), Err(MeshError::NonManifoldEdge { .. })));
    }

    #[test]
    fn round_trip_preserves_topology() {
        for mesh in [generate_lshape_triangular(2).unwrap(), generate_structured_quad(3).unwrap()] {
            let mut buf = Vec::new();
            write_msh(&mesh, &mut buf).unwrap();
            let back = load_msh(buf.as_slice()).unwrap();
            assert_eq!(mesh.cells(), back.cells());
            assert_eq!(mesh.vertices().len(), back.vertices().len());
            assert_eq!(mesh.interior_edges().len(), back.interior_edges().len());
            assert_eq!(mesh.boundary_edges().len(), back.boundary_edges().len());
            for (a, b) in mesh.vertices().iter().zip(back.vertices()) {
                assert_eq!(a, b, "coordinates survive the {:.17e} round trip", a.x);
            }
        }
    }

    #[test]
    fn skips_unknown_sections() {
        let with_names = TWO_TRIS.replace(
            "$Nodes",
            "$PhysicalNames\n1\n2 1 \"domain\"\n$EndPhysicalNames\n$Nodes",
        );
        assert_eq!(load_msh(with_names.as_bytes()).unwrap().n_cells(), 2);
    }
}
