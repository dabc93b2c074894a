//! Polytopal meshes in two and three dimensions.
//!
//! A mesh is stored as vertices, faces (edges in 2D) given as vertex loops,
//! and cells given as lists of faces with an orientation sign. A sign of `+1`
//! means the face's own normal points out of the cell. Every interior face is
//! shared by exactly two cells with opposite signs.
//!
//! Geometry (centroids, diameters, measures, normals) is computed once when the
//! mesh is built and cached; meshes are immutable afterwards.

mod generate;
mod geometry;
mod io;
mod regularity;
mod voronoi;

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Result, VemError};

pub use generate::{generate_mesh, MeshKind};
pub use geometry::{compute_entity_summaries, CellGeometry, FaceGeometry, MeshGeometry};
pub use io::{read_mesh, write_mesh, MeshFile};
pub use regularity::{check_regularity, CellRegularity, RegularityReport, StarVerdict};

pub type Point = Vector3<f64>;

/// Relative tolerance for coplanarity of 3D face vertices.
pub const PLANARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub faces: Vec<usize>,
    pub signs: Vec<i8>,
}

impl Cell {
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    dimension: usize,
    vertices: Vec<Point>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Cell>,
    face_cells: Vec<Vec<usize>>,
    geometry: MeshGeometry,
}

impl Mesh {
    /// Builds a mesh from raw arrays and validates topology and geometry.
    pub fn new(
        dimension: usize,
        vertices: Vec<Point>,
        faces: Vec<Vec<usize>>,
        cells: Vec<Cell>,
    ) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(VemError::InvalidMesh(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        if vertices.is_empty() {
            return Err(VemError::InvalidMesh("vertex list is empty".into()));
        }
        if cells.is_empty() {
            return Err(VemError::InvalidMesh("cell list is empty".into()));
        }
        if dimension == 2 && vertices.iter().any(|v| v.z != 0.0) {
            return Err(VemError::InvalidMesh(
                "2D vertices must have a zero third coordinate".into(),
            ));
        }
        for (fi, face) in faces.iter().enumerate() {
            if dimension == 2 && face.len() != 2 {
                return Err(VemError::InvalidMesh(format!(
                    "2D face {fi} must have exactly 2 vertices, has {}",
                    face.len()
                )));
            }
            if dimension == 3 && face.len() < 3 {
                return Err(VemError::InvalidMesh(format!(
                    "3D face {fi} must have at least 3 vertices"
                )));
            }
            if let Some(&v) = face.iter().find(|&&v| v >= vertices.len()) {
                return Err(VemError::InvalidMesh(format!(
                    "face {fi} references vertex {v} out of range"
                )));
            }
            let mut sorted = face.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != face.len() {
                return Err(VemError::InvalidMesh(format!("face {fi} repeats a vertex")));
            }
        }

        let mut face_cells = vec![Vec::new(); faces.len()];
        for (ci, cell) in cells.iter().enumerate() {
            let min_faces = dimension + 1;
            if cell.faces.len() < min_faces {
                return Err(VemError::InvalidMesh(format!(
                    "cell {ci} has {} faces, needs at least {min_faces}",
                    cell.faces.len()
                )));
            }
            if cell.faces.len() != cell.signs.len() {
                return Err(VemError::InvalidMesh(format!(
                    "cell {ci}: {} faces but {} signs",
                    cell.faces.len(),
                    cell.signs.len()
                )));
            }
            if cell.signs.iter().any(|&s| s != 1 && s != -1) {
                return Err(VemError::InvalidMesh(format!(
                    "cell {ci}: orientation signs must be +1 or -1"
                )));
            }
            for &f in &cell.faces {
                if f >= faces.len() {
                    return Err(VemError::InvalidMesh(format!(
                        "cell {ci} references face {f} out of range"
                    )));
                }
                if face_cells[f].contains(&ci) {
                    return Err(VemError::Connectivity(format!(
                        "cell {ci} references face {f} twice"
                    )));
                }
                face_cells[f].push(ci);
            }
        }
        for (fi, incident) in face_cells.iter().enumerate() {
            match incident.len() {
                0 => {
                    return Err(VemError::Connectivity(format!(
                        "face {fi} is not referenced by any cell"
                    )))
                }
                1 => {}
                2 => {
                    let s0 = sign_of(&cells[incident[0]], fi);
                    let s1 = sign_of(&cells[incident[1]], fi);
                    if s0 == s1 {
                        return Err(VemError::Connectivity(format!(
                            "interior face {fi} has equal orientation signs in cells {} and {}",
                            incident[0], incident[1]
                        )));
                    }
                }
                n => {
                    return Err(VemError::Connectivity(format!(
                        "face {fi} is referenced by {n} cells (non-manifold)"
                    )))
                }
            }
        }
        if dimension == 3 {
            for (ci, cell) in cells.iter().enumerate() {
                check_closed_surface(ci, cell, &faces)?;
            }
        }

        let geometry = geometry::compute(dimension, &vertices, &faces, &cells)?;
        Ok(Self {
            dimension,
            vertices,
            faces,
            cells,
            face_cells,
            geometry,
        })
    }

    /// Builds a 2D mesh from polygons given as vertex loops of either orientation.
    pub fn from_polygons(vertices: &[[f64; 2]], polygons: &[Vec<usize>]) -> Result<Self> {
        let points: Vec<Point> = vertices
            .iter()
            .map(|v| Point::new(v[0], v[1], 0.0))
            .collect();
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        let mut cells = Vec::with_capacity(polygons.len());
        for poly in polygons {
            if let Some(&v) = poly.iter().find(|&&v| v >= points.len()) {
                return Err(VemError::InvalidMesh(format!(
                    "polygon vertex {v} out of range"
                )));
            }
            let mut area2 = 0.0;
            for i in 0..poly.len() {
                let a = points[poly[i]];
                let b = points[poly[(i + 1) % poly.len()]];
                area2 += a.x * b.y - b.x * a.y;
            }
            let lp: Vec<usize> = if area2 < 0.0 {
                poly.iter().rev().copied().collect()
            } else {
                poly.clone()
            };
            let mut cell = Cell {
                faces: Vec::with_capacity(lp.len()),
                signs: Vec::with_capacity(lp.len()),
            };
            for i in 0..lp.len() {
                let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                let key = (a.min(b), a.max(b));
                let fi = *edge_index.entry(key).or_insert_with(|| {
                    faces.push(vec![a, b]);
                    faces.len() - 1
                });
                cell.faces.push(fi);
                cell.signs.push(if faces[fi][0] == a { 1 } else { -1 });
            }
            cells.push(cell);
        }
        Mesh::new(2, points, faces, cells)
    }

    /// Builds a 3D mesh from polyhedra given as lists of face loops.
    ///
    /// Loops may have either orientation; each is turned outward using the
    /// vertex average of its cell, so cells must be star-shaped with respect
    /// to that point.
    pub fn from_polyhedra(vertices: &[[f64; 3]], polyhedra: &[Vec<Vec<usize>>]) -> Result<Self> {
        let points: Vec<Point> = vertices
            .iter()
            .map(|v| Point::new(v[0], v[1], v[2]))
            .collect();
        let mut face_index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        let mut cells = Vec::with_capacity(polyhedra.len());
        for poly in polyhedra {
            let mut all: Vec<usize> = poly.iter().flatten().copied().collect();
            if let Some(&v) = all.iter().find(|&&v| v >= points.len()) {
                return Err(VemError::InvalidMesh(format!(
                    "polyhedron vertex {v} out of range"
                )));
            }
            all.sort_unstable();
            all.dedup();
            let center = all.iter().map(|&v| points[v]).sum::<Point>() / all.len() as f64;
            let mut cell = Cell {
                faces: Vec::with_capacity(poly.len()),
                signs: Vec::with_capacity(poly.len()),
            };
            for lp in poly {
                let normal = newell_normal(lp.iter().map(|&v| &points[v]));
                let fc = lp.iter().map(|&v| points[v]).sum::<Point>() / lp.len() as f64;
                let outward: Vec<usize> = if normal.dot(&(fc - center)) < 0.0 {
                    lp.iter().rev().copied().collect()
                } else {
                    lp.clone()
                };
                let mut key = outward.clone();
                key.sort_unstable();
                let fi = *face_index.entry(key).or_insert_with(|| {
                    faces.push(outward.clone());
                    faces.len() - 1
                });
                cell.faces.push(fi);
                cell.signs
                    .push(if same_cyclic_orientation(&faces[fi], &outward) {
                        1
                    } else {
                        -1
                    });
            }
            cells.push(cell);
        }
        Mesh::new(3, points, faces, cells)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Cells incident to a face (one for boundary faces, two otherwise).
    pub fn face_cells(&self, face: usize) -> &[usize] {
        &self.face_cells[face]
    }

    pub fn is_boundary_face(&self, face: usize) -> bool {
        self.face_cells[face].len() == 1
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| self.is_boundary_face(f))
    }

    pub fn geometry(&self) -> &MeshGeometry {
        &self.geometry
    }

    /// Maximum cell diameter.
    pub fn h_max(&self) -> f64 {
        self.geometry
            .cells
            .iter()
            .map(|c| c.diameter)
            .fold(0.0, f64::max)
    }

    /// Mean cell diameter.
    pub fn h_mean(&self) -> f64 {
        self.geometry.cells.iter().map(|c| c.diameter).sum::<f64>() / self.num_cells() as f64
    }

    /// Outward unit normal of the `local`-th face of `cell`.
    pub fn outward_normal(&self, cell: usize, local: usize) -> Point {
        let c = &self.cells[cell];
        self.geometry.faces[c.faces[local]].normal * f64::from(c.signs[local])
    }

    /// Returns a copy with the cells listed in a different order.
    pub fn permute_cells(&self, order: &[usize]) -> Result<Mesh> {
        if order.len() != self.cells.len() {
            return Err(VemError::InvalidInput("permutation length mismatch".into()));
        }
        let cells = order.iter().map(|&i| self.cells[i].clone()).collect();
        Mesh::new(
            self.dimension,
            self.vertices.clone(),
            self.faces.clone(),
            cells,
        )
    }
}

fn sign_of(cell: &Cell, face: usize) -> i8 {
    let pos = cell.faces.iter().position(|&f| f == face).unwrap();
    cell.signs[pos]
}

/// Each directed edge of an outward-oriented closed surface appears exactly
/// once, and its reverse exactly once.
fn check_closed_surface(ci: usize, cell: &Cell, faces: &[Vec<usize>]) -> Result<()> {
    let mut directed: HashMap<(usize, usize), i32> = HashMap::new();
    for (&f, &s) in cell.faces.iter().zip(&cell.signs) {
        let lp = &faces[f];
        let n = lp.len();
        for i in 0..n {
            let (a, b) = (lp[i], lp[(i + 1) % n]);
            let (a, b) = if s > 0 { (a, b) } else { (b, a) };
            *directed.entry((a, b)).or_default() += 1;
        }
    }
    for (&(a, b), &count) in &directed {
        if count != 1 || directed.get(&(b, a)) != Some(&1) {
            return Err(VemError::Connectivity(format!(
                "cell {ci} boundary is not a closed, consistently oriented surface at edge ({a}, {b})"
            )));
        }
    }
    Ok(())
}

/// Newell's formula; the returned vector is twice the vector area.
pub(crate) fn newell_normal<'a>(pts: impl Iterator<Item = &'a Point> + Clone) -> Point {
    let v: Vec<&Point> = pts.collect();
    let n = v.len();
    let mut normal = Point::zeros();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        normal.x += (a.y - b.y) * (a.z + b.z);
        normal.y += (a.z - b.z) * (a.x + b.x);
        normal.z += (a.x - b.x) * (a.y + b.y);
    }
    normal
}

fn same_cyclic_orientation(a: &[usize], b: &[usize]) -> bool {
    let n = a.len();
    let start = b.iter().position(|&v| v == a[0]).unwrap();
    b[(start + 1) % n] == a[1]
}
