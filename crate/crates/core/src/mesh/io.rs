use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Cell, Mesh, Point};
use crate::error::{Result, VemError};

/// On-disk JSON layout of a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<Vec<usize>>,
    pub cells: Vec<CellEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellEntry {
    pub faces: Vec<usize>,
    pub signs: Vec<i8>,
}

impl From<&Mesh> for MeshFile {
    fn from(mesh: &Mesh) -> Self {
        let d = mesh.dimension();
        MeshFile {
            dimension: d,
            vertices: mesh
                .vertices()
                .iter()
                .map(|v| v.iter().take(d).copied().collect())
                .collect(),
            faces: mesh.faces().to_vec(),
            cells: mesh
                .cells()
                .iter()
                .map(|c| CellEntry {
                    faces: c.faces.clone(),
                    signs: c.signs.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<MeshFile> for Mesh {
    type Error = VemError;

    fn try_from(file: MeshFile) -> Result<Mesh> {
        let d = file.dimension;
        let mut vertices = Vec::with_capacity(file.vertices.len());
        for (i, v) in file.vertices.iter().enumerate() {
            if v.len() != d {
                return Err(VemError::InvalidMesh(format!(
                    "vertex {i} has {} coordinates, expected {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(VemError::InvalidMesh(format!("vertex {i} is not finite")));
            }
            vertices.push(Point::new(v[0], v[1], if d == 3 { v[2] } else { 0.0 }));
        }
        let cells = file
            .cells
            .into_iter()
            .map(|c| Cell {
                faces: c.faces,
                signs: c.signs,
            })
            .collect();
        Mesh::new(d, vertices, file.faces, cells)
    }
}

impl Mesh {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MeshFile::from(self)).expect("mesh serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Mesh> {
        let file: MeshFile = serde_json::from_str(text)?;
        Mesh::try_from(file)
    }
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let text = fs::read_to_string(path)?;
    Mesh::from_json(&text)
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, mesh.to_json())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{generate_mesh, MeshKind};
    use super::*;

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        for kind in [
            MeshKind::QuadStructured,
            MeshKind::Voronoi2d,
            MeshKind::TetStructured,
        ] {
            let m = generate_mesh(kind, 3, 5).unwrap();
            let path = dir.path().join(format!("{kind}.json"));
            write_mesh(&m, &path).unwrap();
            let r = read_mesh(&path).unwrap();
            assert_eq!(m.vertices(), r.vertices());
            assert_eq!(m.faces(), r.faces());
            assert_eq!(m.cells(), r.cells());
            assert_eq!(m.to_json(), r.to_json());
        }
    }

    #[test]
    fn schema_is_as_documented() {
        let m = generate_mesh(MeshKind::TriStructured, 1, 0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["dimension"], 2);
        assert_eq!(v["vertices"][0].as_array().unwrap().len(), 2);
        assert_eq!(v["faces"][0].as_array().unwrap().len(), 2);
        assert!(v["cells"][0]["faces"].is_array());
        assert!(v["cells"][0]["signs"].is_array());
    }

    #[test]
    fn face_in_three_cells_is_a_connectivity_error() {
        let text = r#"{"dimension":2,
            "vertices":[[0,0],[1,0],[0.5,1],[0.5,-1],[2,0.5]],
            "faces":[[0,1],[1,2],[2,0],[1,3],[3,0]],
            "cells":[{"faces":[0,1,2],"signs":[1,1,1]},
                     {"faces":[0,3,4],"signs":[-1,1,1]},
                     {"faces":[0,1,3],"signs":[1,-1,-1]}]}"#;
        assert!(matches!(
            Mesh::from_json(text),
            Err(VemError::Connectivity(_))
        ));
    }

    #[test]
    fn empty_cell_list_is_a_validation_error() {
        let text = r#"{"dimension":2,"vertices":[[0,0]],"faces":[],"cells":[]}"#;
        assert!(matches!(
            Mesh::from_json(text),
            Err(VemError::InvalidMesh(_))
        ));
    }

    #[test]
    fn garbage_is_a_json_error() {
        assert!(matches!(
            Mesh::from_json("{\"dimension\": 2,"),
            Err(VemError::Json(_))
        ));
    }

    #[test]
    fn decimal_coordinates_round_trip_bit_exactly() {
        let text = r#"{"dimension":2,"vertices":[[0.1,0.2],[1.3,0.2],[0.7,0.9]],"faces":[[0,1],[1,2],[2,0]],"cells":[{"faces":[0,1,2],"signs":[1,1,1]}]}"#;
        let m = Mesh::from_json(text).unwrap();
        assert_eq!(m.to_json(), text);
    }
}
