use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::assembly::Assembled;
use crate::error::Result;
use crate::mesh::{Mesh, Point};
use crate::polybasis::{quadrature_on_cell, ScaledMonomialBasis};

use super::ManufacturedProblem;

/// Extra quadrature degree for error integrals of non-polynomial data.
const ERROR_EXTRA_DEGREE: usize = 4;

/// Per-cell squared errors of the projected discrete solution.
#[derive(Debug, Clone, Copy, Default)]
pub struct CellErrors {
    pub energy2: f64,
    pub l2_2: f64,
    /// Squared gradient error of the best cellwise polynomial fit.
    pub best2: f64,
    pub grad_norm2: f64,
    pub u_norm2: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ErrorNorms {
    /// `(Σ_K ‖∇u − ∇Π u_h‖²)^{1/2}`
    pub energy: f64,
    /// `(Σ_K ‖u − Π u_h‖²)^{1/2}`
    pub l2: f64,
    /// Best approximation of `∇u` by cellwise gradients of degree-k polynomials.
    pub best_energy: f64,
    pub grad_norm: f64,
    pub u_norm: f64,
}

fn cell_errors(
    mesh: &Mesh,
    assembled: &Assembled,
    values: &DVector<f64>,
    problem: &ManufacturedProblem,
    cell: usize,
) -> Result<CellErrors> {
    let el = &assembled.elements[cell];
    let k = el.order();
    let map = assembled.dofmap.local_to_global(mesh, cell);
    let local = DVector::from_iterator(map.len(), map.iter().map(|&g| values[g]));
    let coeffs = el.project(&local);
    let basis = ScaledMonomialBasis::cell(mesh, cell, k);
    let rule = quadrature_on_cell(mesh, cell, 2 * k + ERROR_EXTRA_DEGREE)?;

    let n = basis.len();
    let mut stiff = DMatrix::<f64>::zeros(n - 1, n - 1);
    let mut rhs = DVector::<f64>::zeros(n - 1);
    let mut out = CellErrors::default();
    let mut samples: Vec<(f64, Point, Vec<Point>)> = Vec::with_capacity(rule.len());
    for (p, &w) in rule.points.iter().zip(&rule.weights) {
        let vals = basis.eval_all(p);
        let grads = basis.gradient_all(p);
        let uh: f64 = vals.iter().zip(coeffs.iter()).map(|(v, c)| v * c).sum();
        let guh: Point = grads.iter().zip(coeffs.iter()).map(|(g, c)| g * *c).sum();
        let u = problem.u(p);
        let gu = problem.gradient(p);
        out.energy2 += w * (gu - guh).norm_squared();
        out.l2_2 += w * (u - uh).powi(2);
        out.grad_norm2 += w * gu.norm_squared();
        out.u_norm2 += w * u * u;
        for i in 1..n {
            rhs[i - 1] += w * gu.dot(&grads[i]);
            for j in 1..n {
                stiff[(i - 1, j - 1)] += w * grads[i].dot(&grads[j]);
            }
        }
        samples.push((w, gu, grads));
    }
    if n > 1 {
        let best = stiff
            .cholesky()
            .map(|c| c.solve(&rhs))
            .unwrap_or_else(|| DVector::zeros(n - 1));
        for (w, gu, grads) in samples {
            let g: Point = grads[1..]
                .iter()
                .zip(best.iter())
                .map(|(g, c)| g * *c)
                .sum();
            out.best2 += w * (gu - g).norm_squared();
        }
    }
    Ok(out)
}

/// Error norms of `Π u_h` against the exact solution. Cells are processed in
/// parallel and summed in cell order.
pub fn error_norms(
    mesh: &Mesh,
    assembled: &Assembled,
    values: &DVector<f64>,
    problem: &ManufacturedProblem,
) -> Result<ErrorNorms> {
    let per_cell: Vec<CellErrors> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| cell_errors(mesh, assembled, values, problem, c))
        .collect::<Result<_>>()?;
    let mut t = CellErrors::default();
    for c in &per_cell {
        t.energy2 += c.energy2;
        t.l2_2 += c.l2_2;
        t.best2 += c.best2;
        t.grad_norm2 += c.grad_norm2;
        t.u_norm2 += c.u_norm2;
    }
    Ok(ErrorNorms {
        energy: t.energy2.sqrt(),
        l2: t.l2_2.sqrt(),
        best_energy: t.best2.sqrt(),
        grad_norm: t.grad_norm2.sqrt(),
        u_norm: t.u_norm2.sqrt(),
    })
}

/// Broken energy error of the projected solution.
pub fn energy_error(
    mesh: &Mesh,
    assembled: &Assembled,
    values: &DVector<f64>,
    problem: &ManufacturedProblem,
) -> Result<f64> {
    Ok(error_norms(mesh, assembled, values, problem)?.energy)
}

/// L² error of the projected solution.
pub fn l2_error(
    mesh: &Mesh,
    assembled: &Assembled,
    values: &DVector<f64>,
    problem: &ManufacturedProblem,
) -> Result<f64> {
    Ok(error_norms(mesh, assembled, values, problem)?.l2)
}
