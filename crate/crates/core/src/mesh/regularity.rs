//! Shape-regularity checks: every face is comparable to its cell, and every
//! cell is star-shaped with respect to a ball of comparable radius.

use serde::Serialize;

use super::{Mesh, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarVerdict {
    /// Convex cell; star-shaped with respect to an interior ball for certain.
    ExactConvex,
    /// Non-convex cell for which a visibility center was found by sampling.
    Heuristic,
    /// No candidate center sees the whole boundary.
    NotStarShaped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellRegularity {
    pub cell: usize,
    /// Smallest h_e / h_K over the faces of the cell.
    pub min_face_ratio: f64,
    pub star: StarVerdict,
    /// Radius of the best star ball found, divided by h_K.
    pub rho_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub rho_min: f64,
    /// Maximum cell diameter.
    pub h: f64,
    pub cells: Vec<CellRegularity>,
    pub failing_cells: Vec<usize>,
    pub pass: bool,
}

/// Checks face-to-cell ratios against `rho_min` and classifies every cell's
/// star-shapedness. A cell fails when a face ratio is below `rho_min` or no
/// star center was found; the star radius estimate is reported for
/// information.
pub fn check_regularity(mesh: &Mesh, rho_min: f64) -> RegularityReport {
    let geo = mesh.geometry();
    let cells: Vec<CellRegularity> = mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(ci, cell)| {
            let hk = geo.cells[ci].diameter;
            let min_face_ratio = cell
                .faces
                .iter()
                .map(|&f| geo.faces[f].diameter / hk)
                .fold(f64::INFINITY, f64::min);
            let planes: Vec<(Point, Point)> = (0..cell.num_faces())
                .map(|l| {
                    (
                        geo.faces[cell.faces[l]].centroid,
                        mesh.outward_normal(ci, l),
                    )
                })
                .collect();
            let (star, rho_estimate) = star_shape(mesh, ci, &planes, hk);
            CellRegularity {
                cell: ci,
                min_face_ratio,
                star,
                rho_estimate,
            }
        })
        .collect();
    let failing_cells: Vec<usize> = cells
        .iter()
        .filter(|c| c.min_face_ratio < rho_min || c.star == StarVerdict::NotStarShaped)
        .map(|c| c.cell)
        .collect();
    RegularityReport {
        rho_min,
        h: mesh.h_max(),
        pass: failing_cells.is_empty(),
        cells,
        failing_cells,
    }
}

/// Signed distance from `p` to the closest face plane (positive inside all).
fn inner_radius(p: &Point, planes: &[(Point, Point)]) -> f64 {
    planes
        .iter()
        .map(|(c, n)| (c - p).dot(n))
        .fold(f64::INFINITY, f64::min)
}

fn star_shape(mesh: &Mesh, ci: usize, planes: &[(Point, Point)], hk: f64) -> (StarVerdict, f64) {
    let geo = mesh.geometry();
    let cell = &mesh.cells()[ci];
    let centroid = geo.cells[ci].centroid;

    // Convex iff every vertex of the cell lies on the inner side of every face plane.
    let mut verts: Vec<usize> = cell
        .faces
        .iter()
        .flat_map(|&f| mesh.faces()[f].iter().copied())
        .collect();
    verts.sort_unstable();
    verts.dedup();
    let tol = 1e-12 * hk;
    let convex = planes.iter().all(|(c, n)| {
        verts
            .iter()
            .all(|&v| (mesh.vertices()[v] - c).dot(n) <= tol)
    });

    // The kernel of a polygon is the intersection of the inner half-planes of
    // its edges, so a point with positive inner radius sees the whole boundary
    // and the ball of that radius lies in the kernel.
    let mut best = inner_radius(&centroid, planes);
    let sample_grid = 8;
    if mesh.dimension() == 2 {
        let pts = &geo.cells[ci].vertex_loop;
        let (mut lo, mut hi) = (
            Point::repeat(f64::INFINITY),
            Point::repeat(f64::NEG_INFINITY),
        );
        for &v in pts {
            lo = lo.inf(&mesh.vertices()[v]);
            hi = hi.sup(&mesh.vertices()[v]);
        }
        for i in 1..sample_grid {
            for j in 1..sample_grid {
                let p = Point::new(
                    lo.x + (hi.x - lo.x) * i as f64 / sample_grid as f64,
                    lo.y + (hi.y - lo.y) * j as f64 / sample_grid as f64,
                    0.0,
                );
                best = best.max(inner_radius(&p, planes));
            }
        }
    }
    let rho = (best / hk).max(0.0);
    let verdict = if best <= 0.0 {
        StarVerdict::NotStarShaped
    } else if convex {
        StarVerdict::ExactConvex
    } else {
        StarVerdict::Heuristic
    };
    (verdict, rho)
}
