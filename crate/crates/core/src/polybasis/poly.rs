//! Dense polynomials in scaled-monomial coordinates, used to restrict cell
//! monomials exactly onto face planes.

use super::monomial::ScaledMonomialBasis;
use super::multi_index::{enumerate_multi_indices, index_of, monomial_count};

/// Polynomial in `vars` variables with graded-lex coefficients up to `degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    vars: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn zero(vars: usize, degree: usize) -> Self {
        Poly {
            vars,
            degree,
            coeffs: vec![0.0; monomial_count(vars, degree)],
        }
    }

    pub fn constant(vars: usize, c: f64) -> Self {
        Poly {
            vars,
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// `c0 + Σ_a lin[a] y_a`.
    pub fn affine(c0: f64, lin: &[f64]) -> Self {
        let mut p = Poly::zero(lin.len(), 1);
        p.coeffs[0] = c0;
        p.coeffs[1..].copy_from_slice(lin);
        p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.vars, other.vars);
        let mut out = Poly::zero(self.vars, self.degree + other.degree);
        let a_idx = enumerate_multi_indices(self.vars, self.degree);
        let b_idx = enumerate_multi_indices(other.vars, other.degree);
        let mut e = [0usize; 3];
        for (i, a) in a_idx.iter().enumerate() {
            let ca = self.coeffs[i];
            if ca == 0.0 {
                continue;
            }
            for (j, b) in b_idx.iter().enumerate() {
                let cb = other.coeffs[j];
                if cb == 0.0 {
                    continue;
                }
                for (v, ev) in e.iter_mut().enumerate().take(self.vars) {
                    *ev = a.exponents()[v] + b.exponents()[v];
                }
                out.coeffs[index_of(&e[..self.vars])] += ca * cb;
            }
        }
        out
    }

    /// Coefficients padded or truncated to `degree`. Truncation drops terms,
    /// so callers only use it when the dropped coefficients vanish.
    pub fn coefficients_up_to(&self, degree: usize) -> Vec<f64> {
        let n = monomial_count(self.vars, degree);
        let mut out = vec![0.0; n];
        let m = n.min(self.coeffs.len());
        out[..m].copy_from_slice(&self.coeffs[..m]);
        out
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        enumerate_multi_indices(self.vars, self.degree)
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| {
                c * m
                    .exponents()
                    .iter()
                    .enumerate()
                    .map(|(v, &e)| y[v].powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Every member of the cell basis, restricted to the face plane and written
/// as a polynomial in the face basis variables.
///
/// On the face, `x = x_e + h_e Σ_a ξ_a t_a`, so each scaled cell coordinate
/// `(x_j - x_K,j)/h_K` is affine in `ξ`; products of its powers give the
/// restriction exactly.
pub fn restrict_to_face(cell: &ScaledMonomialBasis, face: &ScaledMonomialBasis) -> Vec<Poly> {
    let fv = face.vars();
    let tangents = face.tangents().expect("face basis required");
    let offset = (face.center() - cell.center()) / cell.scale();
    let ratio = face.scale() / cell.scale();
    let dim = cell.vars();
    let degree = cell.degree();

    // powers[j][p] = (scaled cell coordinate j)^p as a face polynomial
    let powers: Vec<Vec<Poly>> = (0..dim)
        .map(|j| {
            let lin: Vec<f64> = (0..fv).map(|a| ratio * tangents[a][j]).collect();
            let base = Poly::affine(offset[j], &lin);
            let mut pw = vec![Poly::constant(fv, 1.0)];
            for p in 1..=degree {
                pw.push(pw[p - 1].mul(&base));
            }
            pw
        })
        .collect();

    cell.indices()
        .iter()
        .map(|m| {
            let s = m.exponents();
            let mut acc = powers[0][s[0]].clone();
            for j in 1..dim {
                acc = acc.mul(&powers[j][s[j]]);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, MeshKind};

    #[test]
    fn product_of_affine_forms() {
        // (1 + 2y)(3 - y) = 3 + 5y - 2y²
        let p = Poly::affine(1.0, &[2.0]).mul(&Poly::affine(3.0, &[-1.0]));
        assert_eq!(p.coeffs(), &[3.0, 5.0, -2.0]);
    }

    #[test]
    fn restriction_matches_pointwise_evaluation() {
        for (kind, res) in [
            (MeshKind::Voronoi2d, 3),
            (MeshKind::TetStructured, 1),
            (MeshKind::CubeStructured, 2),
        ] {
            let mesh = generate_mesh(kind, res, 3).unwrap();
            for (ci, cell) in mesh.cells().iter().enumerate().take(4) {
                let cb = ScaledMonomialBasis::cell(&mesh, ci, 4);
                for &f in &cell.faces {
                    let fb = ScaledMonomialBasis::face(&mesh, f, 4);
                    let polys = restrict_to_face(&cb, &fb);
                    // sample points on the face: vertex/centroid blends
                    let c = mesh.geometry().faces[f].centroid;
                    for &v in &mesh.faces()[f] {
                        let x = c * 0.3 + mesh.vertices()[v] * 0.7;
                        let y = fb.local_coords(&x);
                        let direct = cb.eval_all(&x);
                        for (p, d) in polys.iter().zip(&direct) {
                            assert!((p.eval(&y[..fb.vars()]) - d).abs() < 1e-13, "{kind:?}");
                        }
                    }
                }
            }
        }
    }
}
