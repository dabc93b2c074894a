use super::multi_index::{enumerate_multi_indices, index_of, monomial_count, MultiIndex};
use crate::error::{Result, VemError};
use crate::mesh::{Mesh, Point};

/// Scaled monomials `((x - center) / scale)^s`, `|s| <= degree`.
///
/// A cell basis uses the ambient coordinates. A face basis uses in-plane
/// coordinates `(x - center) . t_a / scale` along the face tangents, so it has
/// one variable on 2D edges and two on 3D faces.
#[derive(Debug, Clone)]
pub struct ScaledMonomialBasis {
    center: Point,
    scale: f64,
    degree: usize,
    vars: usize,
    /// In-plane axes of a face basis; `None` for a cell basis.
    frame: Option<FaceFrame>,
    indices: Vec<MultiIndex>,
}

#[derive(Debug, Clone)]
struct FaceFrame {
    tangents: [Point; 2],
    normal: Point,
}

impl ScaledMonomialBasis {
    pub fn new_cell(center: Point, scale: f64, dim: usize, degree: usize) -> Self {
        ScaledMonomialBasis {
            center,
            scale,
            degree,
            vars: dim,
            frame: None,
            indices: enumerate_multi_indices(dim, degree),
        }
    }

    pub fn new_face(
        center: Point,
        scale: f64,
        tangents: [Point; 2],
        normal: Point,
        dim: usize,
        degree: usize,
    ) -> Self {
        ScaledMonomialBasis {
            center,
            scale,
            degree,
            vars: dim - 1,
            frame: Some(FaceFrame { tangents, normal }),
            indices: enumerate_multi_indices(dim - 1, degree),
        }
    }

    /// Basis attached to a cell of the mesh.
    pub fn cell(mesh: &Mesh, cell: usize, degree: usize) -> Self {
        let g = &mesh.geometry().cells[cell];
        Self::new_cell(g.centroid, g.diameter, mesh.dimension(), degree)
    }

    /// Basis attached to a face of the mesh, in the face's own frame.
    pub fn face(mesh: &Mesh, face: usize, degree: usize) -> Self {
        let g = &mesh.geometry().faces[face];
        Self::new_face(
            g.centroid,
            g.diameter,
            g.tangents,
            g.normal,
            mesh.dimension(),
            degree,
        )
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn is_face(&self) -> bool {
        self.frame.is_some()
    }

    /// Face tangents (face bases only).
    pub fn tangents(&self) -> Option<[Point; 2]> {
        self.frame.as_ref().map(|f| f.tangents)
    }

    /// Scaled local coordinates of `x`, without any plane check.
    pub fn local_coords(&self, x: &Point) -> [f64; 3] {
        let d = (x - self.center) / self.scale;
        match &self.frame {
            None => [d.x, d.y, d.z],
            Some(f) => [d.dot(&f.tangents[0]), d.dot(&f.tangents[1]), 0.0],
        }
    }

    /// Local coordinates of a point that must lie on the face plane.
    pub fn checked_local_coords(&self, x: &Point) -> Result<[f64; 3]> {
        if let Some(f) = &self.frame {
            if self.vars == 2 {
                let off = (x - self.center).dot(&f.normal);
                if off.abs() > 1e-10 * self.scale {
                    return Err(VemError::InvalidInput(format!(
                        "point is {off:.3e} off the face plane"
                    )));
                }
            }
        }
        Ok(self.local_coords(x))
    }

    fn powers(&self, y: &[f64; 3]) -> [Vec<f64>; 3] {
        let mut p: [Vec<f64>; 3] = Default::default();
        for (v, pv) in p.iter_mut().enumerate().take(self.vars) {
            pv.reserve(self.degree + 1);
            pv.push(1.0);
            for e in 1..=self.degree {
                let prev = pv[e - 1];
                pv.push(prev * y[v]);
            }
        }
        p
    }

    /// Values of all members at `x`.
    pub fn eval_all(&self, x: &Point) -> Vec<f64> {
        let y = self.local_coords(x);
        let p = self.powers(&y);
        self.indices
            .iter()
            .map(|m| {
                m.exponents()
                    .iter()
                    .enumerate()
                    .map(|(v, &e)| p[v][e])
                    .product()
            })
            .collect()
    }

    /// Value of one member at `x`.
    pub fn eval(&self, index: &MultiIndex, x: &Point) -> f64 {
        let y = self.local_coords(x);
        index
            .exponents()
            .iter()
            .enumerate()
            .map(|(v, &e)| y[v].powi(e as i32))
            .product()
    }

    /// Ambient gradients of all members of a cell basis at `x`.
    pub fn gradient_all(&self, x: &Point) -> Vec<Point> {
        assert!(
            self.frame.is_none(),
            "gradients are only available for cell bases"
        );
        let y = self.local_coords(x);
        let p = self.powers(&y);
        let pw = |v: usize, e: usize| if v < self.vars { p[v][e] } else { 1.0 };
        self.indices
            .iter()
            .map(|m| {
                let s = m.exponents();
                let mut g = Point::zeros();
                for j in 0..self.vars {
                    if s[j] == 0 {
                        continue;
                    }
                    let mut val = s[j] as f64 / self.scale;
                    for (v, &e) in s.iter().enumerate() {
                        val *= if v == j { pw(v, e - 1) } else { pw(v, e) };
                    }
                    g[j] = val;
                }
                g
            })
            .collect()
    }

    /// Ambient gradient of one member of a cell basis.
    pub fn eval_gradient(&self, index: &MultiIndex, x: &Point) -> Point {
        self.gradient_all(x)[index.position()]
    }

    /// Laplacian of member `index` expanded in the same family:
    /// `Δ m_s = Σ_j s_j (s_j - 1) / h² · m_{s - 2 e_j}`.
    /// Returns `(position in the degree-(|s|-2) enumeration, coefficient)` pairs.
    pub fn laplacian_terms(&self, index: &MultiIndex) -> Vec<(usize, f64)> {
        let s = index.exponents();
        let h2 = self.scale * self.scale;
        let mut out = Vec::new();
        for j in 0..s.len() {
            if s[j] >= 2 {
                let mut t = s.to_vec();
                t[j] -= 2;
                out.push((index_of(&t), (s[j] * (s[j] - 1)) as f64 / h2));
            }
        }
        out
    }

    /// Pointwise Laplacian of one member of a cell basis.
    pub fn eval_laplacian(&self, index: &MultiIndex, x: &Point) -> f64 {
        let lower = enumerate_multi_indices(self.vars, self.degree.saturating_sub(2));
        self.laplacian_terms(index)
            .into_iter()
            .map(|(pos, c)| c * self.eval(&lower[pos], x))
            .sum()
    }

    /// Number of members of degree at most `degree` in this family.
    pub fn count_up_to(&self, degree: usize) -> usize {
        monomial_count(self.vars, degree)
    }
}
