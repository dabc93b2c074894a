use super::{newell_normal, Cell, Mesh, Point, PLANARITY_TOL};
use crate::error::{Result, VemError};

/// Centroid, diameter, measure and local frame of one face (edge in 2D).
///
/// `normal` is the unit normal induced by the face's own vertex order; the
/// tangents span the face plane and, together with the centroid and the
/// diameter, define the face's scaled monomials. In 2D only `tangents[0]` is
/// meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceGeometry {
    pub centroid: Point,
    pub diameter: f64,
    pub measure: f64,
    pub normal: Point,
    pub tangents: [Point; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub centroid: Point,
    pub diameter: f64,
    pub measure: f64,
    /// Counter-clockwise vertex loop (2D cells only; empty in 3D).
    pub vertex_loop: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshGeometry {
    pub faces: Vec<FaceGeometry>,
    pub cells: Vec<CellGeometry>,
}

/// Geometric summaries of every face and cell of a mesh.
pub fn compute_entity_summaries(mesh: &Mesh) -> Result<MeshGeometry> {
    compute(
        mesh.dimension(),
        mesh.vertices(),
        mesh.faces(),
        mesh.cells(),
    )
}

pub(super) fn compute(
    dim: usize,
    vertices: &[Point],
    faces: &[Vec<usize>],
    cells: &[Cell],
) -> Result<MeshGeometry> {
    let faces_geo = faces
        .iter()
        .enumerate()
        .map(|(fi, f)| face_geometry(dim, fi, vertices, f))
        .collect::<Result<Vec<_>>>()?;
    let cells_geo = cells
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            if dim == 2 {
                polygon_geometry(ci, c, vertices, faces)
            } else {
                polyhedron_geometry(ci, c, vertices, faces)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeshGeometry {
        faces: faces_geo,
        cells: cells_geo,
    })
}

fn diameter(points: impl Iterator<Item = Point> + Clone) -> f64 {
    let pts: Vec<Point> = points.collect();
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    d
}

fn face_geometry(
    dim: usize,
    fi: usize,
    vertices: &[Point],
    face: &[usize],
) -> Result<FaceGeometry> {
    if dim == 2 {
        let a = vertices[face[0]];
        let b = vertices[face[1]];
        let len = (b - a).norm();
        if len <= 0.0 || !len.is_finite() {
            return Err(VemError::Degenerate {
                kind: "face",
                id: fi,
                detail: "zero-length edge".into(),
            });
        }
        let t = (b - a) / len;
        return Ok(FaceGeometry {
            centroid: (a + b) * 0.5,
            diameter: len,
            measure: len,
            normal: Point::new(t.y, -t.x, 0.0),
            tangents: [t, Point::zeros()],
        });
    }

    let pts: Vec<Point> = face.iter().map(|&v| vertices[v]).collect();
    let nv = newell_normal(pts.iter());
    let nlen = nv.norm();
    let h = diameter(pts.iter().copied());
    if nlen <= 1e-300 || h <= 0.0 {
        return Err(VemError::Degenerate {
            kind: "face",
            id: fi,
            detail: "zero-area face".into(),
        });
    }
    let normal = nv / nlen;
    let p0 = pts[0];
    for p in &pts {
        if ((p - p0).dot(&normal)).abs() > PLANARITY_TOL * h {
            return Err(VemError::InvalidMesh(format!(
                "face {fi} is not planar (offset {:.3e}, diameter {h:.3e})",
                (p - p0).dot(&normal).abs()
            )));
        }
    }
    let mut area = 0.0;
    let mut moment = Point::zeros();
    for i in 1..pts.len() - 1 {
        let a = (pts[i] - p0).cross(&(pts[i + 1] - p0)).dot(&normal) * 0.5;
        area += a;
        moment += (p0 + pts[i] + pts[i + 1]) * (a / 3.0);
    }
    if area <= 0.0 {
        return Err(VemError::Degenerate {
            kind: "face",
            id: fi,
            detail: "non-positive face area".into(),
        });
    }
    let e1 = pts[1] - p0;
    let t1 = (e1 - normal * e1.dot(&normal)).normalize();
    let t2 = normal.cross(&t1);
    Ok(FaceGeometry {
        centroid: moment / area,
        diameter: h,
        measure: area,
        normal,
        tangents: [t1, t2],
    })
}

fn polygon_geometry(
    ci: usize,
    cell: &Cell,
    vertices: &[Point],
    faces: &[Vec<usize>],
) -> Result<CellGeometry> {
    // Chain the directed edges into a single loop.
    let directed: Vec<(usize, usize)> = cell
        .faces
        .iter()
        .zip(&cell.signs)
        .map(|(&f, &s)| {
            let (a, b) = (faces[f][0], faces[f][1]);
            if s > 0 {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    let n = directed.len();
    let mut lp = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut cur = directed[0];
    used[0] = true;
    lp.push(cur.0);
    for _ in 1..n {
        let next = directed
            .iter()
            .enumerate()
            .find(|(i, e)| !used[*i] && e.0 == cur.1);
        match next {
            Some((i, &e)) => {
                used[i] = true;
                lp.push(e.0);
                cur = e;
            }
            None => {
                return Err(VemError::Connectivity(format!(
                    "cell {ci} edges do not form a single closed loop"
                )))
            }
        }
    }
    if cur.1 != lp[0] {
        return Err(VemError::Connectivity(format!(
            "cell {ci} boundary loop is not closed"
        )));
    }

    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = vertices[lp[i]];
        let b = vertices[lp[(i + 1) % n]];
        let cr = a.x * b.y - b.x * a.y;
        area2 += cr;
        cx += (a.x + b.x) * cr;
        cy += (a.y + b.y) * cr;
    }
    if area2 <= 0.0 {
        return Err(VemError::Degenerate {
            kind: "cell",
            id: ci,
            detail: format!(
                "non-positive area {:.3e} (check orientation signs)",
                area2 / 2.0
            ),
        });
    }
    Ok(CellGeometry {
        centroid: Point::new(cx / (3.0 * area2), cy / (3.0 * area2), 0.0),
        diameter: diameter(lp.iter().map(|&v| vertices[v])),
        measure: area2 / 2.0,
        vertex_loop: lp,
    })
}

fn polyhedron_geometry(
    ci: usize,
    cell: &Cell,
    vertices: &[Point],
    faces: &[Vec<usize>],
) -> Result<CellGeometry> {
    let mut all: Vec<usize> = cell
        .faces
        .iter()
        .flat_map(|&f| faces[f].iter().copied())
        .collect();
    all.sort_unstable();
    all.dedup();
    let reference = vertices[all[0]];
    let mut volume = 0.0;
    let mut moment = Point::zeros();
    for (&f, &s) in cell.faces.iter().zip(&cell.signs) {
        let mut lp: Vec<Point> = faces[f].iter().map(|&v| vertices[v]).collect();
        if s < 0 {
            lp.reverse();
        }
        for i in 1..lp.len() - 1 {
            let (a, b, c) = (lp[0], lp[i], lp[i + 1]);
            let v = (a - reference).dot(&(b - reference).cross(&(c - reference))) / 6.0;
            volume += v;
            moment += (reference + a + b + c) * (v / 4.0);
        }
    }
    if volume <= 0.0 {
        return Err(VemError::Degenerate {
            kind: "cell",
            id: ci,
            detail: format!("non-positive volume {volume:.3e} (check orientation signs)"),
        });
    }
    Ok(CellGeometry {
        centroid: moment / volume,
        diameter: diameter(all.iter().map(|&v| vertices[v])),
        measure: volume,
        vertex_loop: Vec::new(),
    })
}
