use nalgebra::{DMatrix, DVector};

use super::monomial::ScaledMonomialBasis;
use super::quadrature::{quadrature_on_cell, quadrature_on_face, QuadratureRule};
use crate::error::{Result, VemError};
use crate::mesh::{Mesh, Point};

/// Mass matrix `∫ m_i m_j` and moments `∫ f m_i` of a basis under a rule.
pub fn mass_and_moments(
    basis: &ScaledMonomialBasis,
    rule: &QuadratureRule,
    f: impl Fn(&Point) -> f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = basis.len();
    let mut mass = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (p, &w) in rule.points.iter().zip(&rule.weights) {
        let v = basis.eval_all(p);
        let fv = f(p);
        for i in 0..n {
            rhs[i] += w * fv * v[i];
            for j in 0..=i {
                mass[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            mass[(j, i)] = mass[(i, j)];
        }
    }
    (mass, rhs)
}

/// Solves the mass system for the projection coefficients.
pub fn project_with_rule(
    basis: &ScaledMonomialBasis,
    rule: &QuadratureRule,
    f: impl Fn(&Point) -> f64,
) -> Result<DVector<f64>> {
    let (mass, rhs) = mass_and_moments(basis, rule, f);
    let chol = mass.cholesky().ok_or_else(|| {
        VemError::Singular("polynomial mass matrix is not positive definite".into())
    })?;
    Ok(chol.solve(&rhs))
}

/// L² projection of `f` onto the scaled monomials of degree `degree` on a
/// face. The rule is exact to degree `2 * degree + extra_degree`.
pub fn l2_project_onto_face_polys(
    mesh: &Mesh,
    face: usize,
    degree: usize,
    extra_degree: usize,
    f: impl Fn(&Point) -> f64,
) -> Result<DVector<f64>> {
    let basis = ScaledMonomialBasis::face(mesh, face, degree);
    let rule = quadrature_on_face(mesh, face, 2 * degree + extra_degree)?;
    project_with_rule(&basis, &rule, f)
}

/// Cell counterpart of [`l2_project_onto_face_polys`].
pub fn l2_project_onto_cell_polys(
    mesh: &Mesh,
    cell: usize,
    degree: usize,
    extra_degree: usize,
    f: impl Fn(&Point) -> f64,
) -> Result<DVector<f64>> {
    let basis = ScaledMonomialBasis::cell(mesh, cell, degree);
    let rule = quadrature_on_cell(mesh, cell, 2 * degree + extra_degree)?;
    project_with_rule(&basis, &rule, f)
}
