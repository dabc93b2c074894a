use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::voronoi::{self, P2};
use super::Mesh;
use crate::error::{Result, VemError};

/// Mesh families covering the unit square or the unit cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshKind {
    TriStructured,
    QuadStructured,
    QuadDistorted,
    HexagonDominant,
    Voronoi2d,
    CubeStructured,
    TetStructured,
}

impl MeshKind {
    pub const ALL: [MeshKind; 7] = [
        MeshKind::TriStructured,
        MeshKind::QuadStructured,
        MeshKind::QuadDistorted,
        MeshKind::HexagonDominant,
        MeshKind::Voronoi2d,
        MeshKind::CubeStructured,
        MeshKind::TetStructured,
    ];

    pub fn dimension(self) -> usize {
        match self {
            MeshKind::CubeStructured | MeshKind::TetStructured => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeshKind::TriStructured => "tri-structured",
            MeshKind::QuadStructured => "quad-structured",
            MeshKind::QuadDistorted => "quad-distorted",
            MeshKind::HexagonDominant => "hexagon-dominant",
            MeshKind::Voronoi2d => "voronoi-2d",
            MeshKind::CubeStructured => "cube-structured",
            MeshKind::TetStructured => "tet-structured",
        }
    }
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshKind {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        MeshKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                VemError::InvalidInput(format!(
                    "unknown mesh kind '{s}' (expected one of: {})",
                    MeshKind::ALL.map(|k| k.name()).join(", ")
                ))
            })
    }
}

/// Largest accepted resolution per dimension; keeps generated meshes desk-sized.
const MAX_RES_2D: usize = 512;
const MAX_RES_3D: usize = 64;

/// Generates a mesh of the unit square or unit cube.
///
/// `resolution` is the number of subdivisions per axis (structured kinds),
/// the seed count per axis (`voronoi-2d`, which uses `resolution²` seeds) or
/// the number of hexagons across (`hexagon-dominant`). The seed only affects
/// `quad-distorted` and `voronoi-2d`; output is deterministic for a fixed seed.
pub fn generate_mesh(kind: MeshKind, resolution: usize, seed: u64) -> Result<Mesh> {
    let max = if kind.dimension() == 2 {
        MAX_RES_2D
    } else {
        MAX_RES_3D
    };
    if resolution == 0 || resolution > max {
        return Err(VemError::UnsupportedKind {
            kind: kind.to_string(),
            resolution,
            detail: format!(
                "resolution must lie in 1..={max} for a {}D mesh",
                kind.dimension()
            ),
        });
    }
    match kind {
        MeshKind::QuadStructured => quads(resolution, None),
        MeshKind::QuadDistorted => quads(resolution, Some(seed)),
        MeshKind::TriStructured => triangles(resolution),
        MeshKind::HexagonDominant => hexagons(resolution),
        MeshKind::Voronoi2d => voronoi_mesh(resolution, seed),
        MeshKind::CubeStructured => cubes(resolution),
        MeshKind::TetStructured => tets(resolution),
    }
}

fn grid_vertices(n: usize) -> Vec<[f64; 2]> {
    let h = 1.0 / n as f64;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push([i as f64 * h, j as f64 * h]);
        }
    }
    v
}

fn quads(n: usize, distort_seed: Option<u64>) -> Result<Mesh> {
    let mut v = grid_vertices(n);
    if let Some(seed) = distort_seed {
        // Interior vertices move by at most 0.2 h per coordinate, which keeps
        // every quadrilateral strictly convex.
        let h = 1.0 / n as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for j in 1..n {
            for i in 1..n {
                let p = &mut v[j * (n + 1) + i];
                p[0] += rng.gen_range(-0.2..0.2) * h;
                p[1] += rng.gen_range(-0.2..0.2) * h;
            }
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut polys = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            polys.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::from_polygons(&v, &polys)
}

fn triangles(n: usize) -> Result<Mesh> {
    let v = grid_vertices(n);
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut polys = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            polys.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            polys.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::from_polygons(&v, &polys)
}

/// Voronoi tessellation of a triangular lattice: regular-looking hexagons in
/// the interior, clipped pentagons and quadrilaterals along the boundary.
fn hexagons(n: usize) -> Result<Mesh> {
    let dx = 1.0 / n as f64;
    let rows = ((2.0 / 3f64.sqrt()) * n as f64).round().max(1.0) as usize;
    let dy = 1.0 / rows as f64;
    let mut seeds: Vec<P2> = Vec::new();
    for j in 0..rows {
        let y = (j as f64 + 0.5) * dy;
        if j % 2 == 0 {
            for i in 0..n {
                seeds.push([(i as f64 + 0.5) * dx, y]);
            }
        } else {
            for i in 1..n {
                seeds.push([i as f64 * dx, y]);
            }
            if n == 1 {
                seeds.push([0.5, y]);
            }
        }
    }
    let cells = voronoi::clipped_cells(&seeds);
    let (verts, loops) = voronoi::weld(&cells, 0.0);
    Mesh::from_polygons(&verts, &loops)
}

/// Random seeds, one Lloyd step, Voronoi cells clipped to the square. Edges
/// shorter than a tenth of the nominal seed spacing are collapsed.
fn voronoi_mesh(n: usize, seed: u64) -> Result<Mesh> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds: Vec<P2> = (0..n * n)
        .map(|_| [rng.gen::<f64>(), rng.gen::<f64>()])
        .collect();
    let cells = voronoi::clipped_cells(&seeds);
    for (s, c) in seeds.iter_mut().zip(&cells) {
        *s = voronoi::polygon_centroid(c);
    }
    let cells = voronoi::clipped_cells(&seeds);
    let (verts, loops) = voronoi::weld(&cells, 0.1 / n as f64);
    if let Some(ci) = loops.iter().position(|l| l.len() < 3) {
        return Err(VemError::UnsupportedKind {
            kind: MeshKind::Voronoi2d.to_string(),
            resolution: n,
            detail: format!("cell {ci} collapsed during edge cleanup (seed {seed})"),
        });
    }
    Mesh::from_polygons(&verts, &loops)
}

fn grid_vertices_3d(n: usize) -> Vec<[f64; 3]> {
    let h = 1.0 / n as f64;
    let mut v = Vec::with_capacity((n + 1).pow(3));
    for l in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                v.push([i as f64 * h, j as f64 * h, l as f64 * h]);
            }
        }
    }
    v
}

/// Corner ids of the cube at (i, j, l), indexed by the bit pattern x + 2y + 4z.
fn cube_corners(n: usize, i: usize, j: usize, l: usize) -> [usize; 8] {
    let id = |a: usize, b: usize, c: usize| (c * (n + 1) + b) * (n + 1) + a;
    let mut out = [0; 8];
    for (bits, o) in out.iter_mut().enumerate() {
        *o = id(i + (bits & 1), j + ((bits >> 1) & 1), l + ((bits >> 2) & 1));
    }
    out
}

fn cubes(n: usize) -> Result<Mesh> {
    let v = grid_vertices_3d(n);
    let mut cells = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = cube_corners(n, i, j, l);
                cells.push(vec![
                    vec![c[0], c[2], c[3], c[1]],
                    vec![c[4], c[5], c[7], c[6]],
                    vec![c[0], c[1], c[5], c[4]],
                    vec![c[2], c[6], c[7], c[3]],
                    vec![c[0], c[4], c[6], c[2]],
                    vec![c[1], c[3], c[7], c[5]],
                ]);
            }
        }
    }
    Mesh::from_polyhedra(&v, &cells)
}

/// Six tetrahedra per cube sharing the main diagonal; face diagonals match
/// between neighbouring cubes.
fn tets(n: usize) -> Result<Mesh> {
    const PATHS: [[usize; 4]; 6] = [
        [0, 1, 3, 7],
        [0, 1, 5, 7],
        [0, 2, 3, 7],
        [0, 2, 6, 7],
        [0, 4, 5, 7],
        [0, 4, 6, 7],
    ];
    let v = grid_vertices_3d(n);
    let mut cells = Vec::with_capacity(6 * n * n * n);
    for l in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = cube_corners(n, i, j, l);
                for p in PATHS {
                    let t = p.map(|b| c[b]);
                    cells.push(vec![
                        vec![t[1], t[2], t[3]],
                        vec![t[0], t[2], t[3]],
                        vec![t[0], t[1], t[3]],
                        vec![t[0], t[1], t[2]],
                    ]);
                }
            }
        }
    }
    Mesh::from_polyhedra(&v, &cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_counts() {
        let q = generate_mesh(MeshKind::QuadStructured, 2, 0).unwrap();
        assert_eq!((q.num_cells(), q.num_faces(), q.num_vertices()), (4, 12, 9));
        let t = generate_mesh(MeshKind::TriStructured, 1, 0).unwrap();
        assert_eq!((t.num_cells(), t.num_faces(), t.num_vertices()), (2, 5, 4));
        let c = generate_mesh(MeshKind::CubeStructured, 2, 0).unwrap();
        assert_eq!(
            (c.num_cells(), c.num_faces(), c.num_vertices()),
            (8, 36, 27)
        );
        let tt = generate_mesh(MeshKind::TetStructured, 1, 0).unwrap();
        assert_eq!(tt.num_cells(), 6);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in MeshKind::ALL {
            assert_eq!(k.name().parse::<MeshKind>().unwrap(), k);
        }
        assert!("pentagons".parse::<MeshKind>().is_err());
    }

    #[test]
    fn zero_resolution_is_rejected() {
        assert!(matches!(
            generate_mesh(MeshKind::TriStructured, 0, 0),
            Err(VemError::UnsupportedKind { .. })
        ));
        assert!(generate_mesh(MeshKind::CubeStructured, 1000, 0).is_err());
    }

    #[test]
    fn random_kinds_are_deterministic() {
        for kind in [MeshKind::Voronoi2d, MeshKind::QuadDistorted] {
            let a = generate_mesh(kind, 6, 42).unwrap();
            let b = generate_mesh(kind, 6, 42).unwrap();
            assert_eq!(a.vertices(), b.vertices());
            assert_eq!(a.cells(), b.cells());
            let c = generate_mesh(kind, 6, 43).unwrap();
            assert_ne!(a.vertices(), c.vertices());
        }
    }

    #[test]
    fn hexagon_mesh_is_mostly_hexagons() {
        let m = generate_mesh(MeshKind::HexagonDominant, 6, 0).unwrap();
        let hexes = m.cells().iter().filter(|c| c.num_faces() == 6).count();
        assert!(hexes * 2 > m.num_cells(), "{hexes} of {}", m.num_cells());
    }

    #[test]
    fn voronoi_sizes() {
        for n in [1, 2, 4, 8, 16, 32] {
            let m = generate_mesh(MeshKind::Voronoi2d, n, 1).unwrap();
            assert_eq!(m.num_cells(), n * n);
        }
    }
}
