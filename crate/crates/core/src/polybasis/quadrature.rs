//! Quadrature on edges, polygons, polygonal faces and polyhedra.
//!
//! Edges use Gauss-Legendre rules. Polygons and 3D faces are split into a fan
//! of triangles around their centroid; polyhedra into tetrahedra joining the
//! cell centroid to the fan triangles of every face. Triangles and
//! tetrahedra use collapsed (Duffy) tensor Gauss-Legendre rules, so any
//! exactness degree is available.

use std::sync::OnceLock;

use crate::error::{Result, VemError};
use crate::mesh::{Mesh, Point};

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Polynomials of total degree up to this value are integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

const MAX_GAUSS_POINTS: usize = 64;

/// Gauss-Legendre nodes and weights on [0, 1] with `n` points.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static TABLE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    assert!(
        (1..=MAX_GAUSS_POINTS).contains(&n),
        "unsupported Gauss rule size {n}"
    );
    &TABLE.get_or_init(|| (0..=MAX_GAUSS_POINTS).map(compute_gauss_legendre).collect())[n]
}

/// Newton iteration on the Legendre recurrence, mapped from [-1, 1] to [0, 1].
fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = (1.0 - z) / 2.0;
        x[n - 1 - i] = (1.0 + z) / 2.0;
        w[i] = wi / 2.0;
        w[n - 1 - i] = wi / 2.0;
    }
    (x, w)
}

/// Barycentric-free reference rule on the triangle (0,0), (1,0), (0,1).
fn reference_triangle(degree: usize) -> Vec<([f64; 2], f64)> {
    let n = (degree + 3) / 2;
    let (x, w) = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let u = x[i];
            out.push(([u, x[j] * (1.0 - u)], w[i] * w[j] * (1.0 - u)));
        }
    }
    out
}

fn reference_tet(degree: usize) -> Vec<([f64; 3], f64)> {
    let n = (degree + 4) / 2;
    let (x, w) = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let (u, v, t) = (x[i], x[j], x[l]);
                out.push((
                    [u, v * (1.0 - u), t * (1.0 - u) * (1.0 - v)],
                    w[i] * w[j] * w[l] * (1.0 - u) * (1.0 - u) * (1.0 - v),
                ));
            }
        }
    }
    out
}

/// Gauss-Legendre rule on the segment `a`-`b`.
pub fn segment_rule(a: &Point, b: &Point, degree: usize) -> QuadratureRule {
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    let len = (b - a).norm();
    QuadratureRule {
        points: x.iter().map(|&t| a + (b - a) * t).collect(),
        weights: w.iter().map(|&wi| wi * len).collect(),
        degree,
    }
}

/// Rule on a triangle; `signed_measure` carries the (possibly negative) area.
fn push_triangle(
    rule: &mut QuadratureRule,
    reference: &[([f64; 2], f64)],
    a: &Point,
    b: &Point,
    c: &Point,
    area: f64,
) {
    for (xi, w) in reference {
        rule.points.push(a + (b - a) * xi[0] + (c - a) * xi[1]);
        rule.weights.push(w * 2.0 * area);
    }
}

fn push_tet(rule: &mut QuadratureRule, reference: &[([f64; 3], f64)], v: [&Point; 4], volume: f64) {
    for (xi, w) in reference {
        rule.points
            .push(v[0] + (v[1] - v[0]) * xi[0] + (v[2] - v[0]) * xi[1] + (v[3] - v[0]) * xi[2]);
        rule.weights.push(w * 6.0 * volume);
    }
}

/// Rule on a single triangle.
pub fn triangle_rule(a: &Point, b: &Point, c: &Point, degree: usize) -> QuadratureRule {
    let mut rule = QuadratureRule {
        points: Vec::new(),
        weights: Vec::new(),
        degree,
    };
    let area = (b - a).cross(&(c - a)).norm() / 2.0;
    push_triangle(&mut rule, &reference_triangle(degree), a, b, c, area);
    rule
}

/// Rule on one face of the mesh (an edge in 2D).
pub fn quadrature_on_face(mesh: &Mesh, face: usize, degree: usize) -> Result<QuadratureRule> {
    let verts = &mesh.faces()[face];
    let pts = mesh.vertices();
    if mesh.dimension() == 2 {
        return Ok(segment_rule(&pts[verts[0]], &pts[verts[1]], degree));
    }
    let g = &mesh.geometry().faces[face];
    let reference = reference_triangle(degree);
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(reference.len() * verts.len()),
        weights: Vec::with_capacity(reference.len() * verts.len()),
        degree,
    };
    for i in 0..verts.len() {
        let (a, b) = (&pts[verts[i]], &pts[verts[(i + 1) % verts.len()]]);
        let area = (a - g.centroid).cross(&(b - g.centroid)).dot(&g.normal) / 2.0;
        if area <= 0.0 {
            return Err(VemError::Degenerate {
                kind: "face",
                id: face,
                detail: "face is not star-shaped with respect to its centroid".into(),
            });
        }
        push_triangle(&mut rule, &reference, &g.centroid, a, b, area);
    }
    Ok(rule)
}

/// Rule on one cell: centroid fan of triangles (2D) or tetrahedra (3D).
pub fn quadrature_on_cell(mesh: &Mesh, cell: usize, degree: usize) -> Result<QuadratureRule> {
    let g = &mesh.geometry().cells[cell];
    let pts = mesh.vertices();
    let xk = g.centroid;
    if mesh.dimension() == 2 {
        let lp = &g.vertex_loop;
        let reference = reference_triangle(degree);
        let mut rule = QuadratureRule {
            points: Vec::with_capacity(reference.len() * lp.len()),
            weights: Vec::with_capacity(reference.len() * lp.len()),
            degree,
        };
        for i in 0..lp.len() {
            let (a, b) = (&pts[lp[i]], &pts[lp[(i + 1) % lp.len()]]);
            let area = ((a.x - xk.x) * (b.y - xk.y) - (b.x - xk.x) * (a.y - xk.y)) / 2.0;
            if area <= 0.0 {
                return Err(VemError::NotCentroidStar { cell });
            }
            push_triangle(&mut rule, &reference, &xk, a, b, area);
        }
        return Ok(rule);
    }

    let reference = reference_tet(degree);
    let c = &mesh.cells()[cell];
    let mut rule = QuadratureRule {
        points: Vec::new(),
        weights: Vec::new(),
        degree,
    };
    for (&f, &s) in c.faces.iter().zip(&c.signs) {
        let xe = mesh.geometry().faces[f].centroid;
        let mut lp: Vec<usize> = mesh.faces()[f].clone();
        if s < 0 {
            lp.reverse();
        }
        for i in 0..lp.len() {
            let (a, b) = (&pts[lp[i]], &pts[lp[(i + 1) % lp.len()]]);
            let vol = (xe - xk).dot(&(a - xk).cross(&(b - xk))) / 6.0;
            if vol <= 0.0 {
                return Err(VemError::NotCentroidStar { cell });
            }
            push_tet(&mut rule, &reference, [&xk, &xe, a, b], vol);
        }
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, MeshKind};
    use crate::polybasis::enumerate_multi_indices;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn gauss_legendre_integrates_to_degree() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for p in 0..2 * n {
                let q: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn unit_edge_degree_three_uses_two_points() {
        let r = segment_rule(&Point::zeros(), &Point::new(1.0, 0.0, 0.0), 3);
        assert_eq!(r.len(), 2);
        assert!((r.total_weight() - 1.0).abs() < 1e-15);
    }

    /// ∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    #[test]
    fn triangle_exactness() {
        for q in 0..=14 {
            let r = triangle_rule(
                &Point::zeros(),
                &Point::new(1.0, 0.0, 0.0),
                &Point::new(0.0, 1.0, 0.0),
                q,
            );
            for m in enumerate_multi_indices(2, q) {
                let s = m.exponents();
                let exact = factorial(s[0]) * factorial(s[1]) / factorial(s[0] + s[1] + 2);
                let got = r.integrate(|p| p.x.powi(s[0] as i32) * p.y.powi(s[1] as i32));
                assert!((got - exact).abs() <= 1e-12 * exact, "q={q} s={s:?}");
            }
        }
    }

    /// ∫ x^a y^b z^c over the reference tetrahedron = a! b! c! / (a + b + c + 3)!
    #[test]
    fn tet_exactness() {
        for q in 0..=10 {
            let mut r = QuadratureRule {
                points: vec![],
                weights: vec![],
                degree: q,
            };
            let v = [
                Point::zeros(),
                Point::new(1.0, 0.0, 0.0),
                Point::new(0.0, 1.0, 0.0),
                Point::new(0.0, 0.0, 1.0),
            ];
            push_tet(
                &mut r,
                &reference_tet(q),
                [&v[0], &v[1], &v[2], &v[3]],
                1.0 / 6.0,
            );
            for m in enumerate_multi_indices(3, q) {
                let s = m.exponents();
                let exact = factorial(s[0]) * factorial(s[1]) * factorial(s[2])
                    / factorial(s[0] + s[1] + s[2] + 3);
                let got = r.integrate(|p| {
                    p.x.powi(s[0] as i32) * p.y.powi(s[1] as i32) * p.z.powi(s[2] as i32)
                });
                assert!((got - exact).abs() <= 1e-12 * exact, "q={q} s={s:?}");
            }
        }
    }

    /// ∫ over [0,1]^d of x^a y^b (z^c) = Π 1/(s_i + 1)
    #[test]
    fn cell_rules_on_unit_square_and_cube() {
        for (kind, dim) in [(MeshKind::QuadStructured, 2), (MeshKind::CubeStructured, 3)] {
            let m = generate_mesh(kind, 1, 0).unwrap();
            for q in 0..=8 {
                let r = quadrature_on_cell(&m, 0, q).unwrap();
                assert!((r.total_weight() - 1.0).abs() < 1e-13);
                for mi in enumerate_multi_indices(dim, q) {
                    let s = mi.exponents();
                    let exact: f64 = s.iter().map(|&e| 1.0 / (e as f64 + 1.0)).product();
                    let got = r.integrate(|p| (0..dim).map(|j| p[j].powi(s[j] as i32)).product());
                    assert!(
                        (got - exact).abs() <= 1e-12 * exact,
                        "{kind:?} q={q} s={s:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn unit_square_first_moment() {
        let m = generate_mesh(MeshKind::QuadStructured, 1, 0).unwrap();
        for q in 1..6 {
            let r = quadrature_on_cell(&m, 0, q).unwrap();
            assert!((r.integrate(|p| p.x) - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn regular_hexagon_area() {
        let verts: Vec<[f64; 2]> = (0..6)
            .map(|i| {
                let t = std::f64::consts::PI / 3.0 * i as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let m = Mesh::from_polygons(&verts, &[(0..6).collect()]).unwrap();
        let r = quadrature_on_cell(&m, 0, 4).unwrap();
        let exact = 3.0 * 3f64.sqrt() / 2.0;
        assert!((r.total_weight() - exact).abs() < 1e-13 * exact);
        assert!((r.total_weight() - 2.598076).abs() < 1e-6);
    }

    #[test]
    fn face_rules_sum_to_face_measure() {
        let m = generate_mesh(MeshKind::TetStructured, 2, 0).unwrap();
        for f in 0..m.num_faces() {
            let r = quadrature_on_face(&m, f, 5).unwrap();
            let meas = m.geometry().faces[f].measure;
            assert!((r.total_weight() - meas).abs() < 1e-13 * meas);
        }
    }

    #[test]
    fn non_star_cell_is_rejected() {
        // Thin L-shape whose centroid lies outside the short arm's visibility.
        let m = Mesh::from_polygons(
            &[
                [0.0, 0.0],
                [3.0, 0.0],
                [3.0, 0.2],
                [0.2, 0.2],
                [0.2, 3.0],
                [0.0, 3.0],
            ],
            &[vec![0, 1, 2, 3, 4, 5]],
        )
        .unwrap();
        assert!(matches!(
            quadrature_on_cell(&m, 0, 2),
            Err(VemError::NotCentroidStar { cell: 0 })
        ));
    }
}
