//! Manufactured solutions, error norms, patch tests and convergence studies.

mod convergence;
mod errors;
mod problems;

use nalgebra::DVector;
use serde::Serialize;

use crate::assembly::{
    apply_dirichlet, assemble, build_dof_map, interpolate, solve, Assembled, Solution, SolverChoice,
};
use crate::element::StabilizationChoice;
use crate::error::{Result, VemError};
use crate::mesh::Mesh;

pub use convergence::{
    fit_rate, run_convergence, ConvergenceLevel, ConvergenceOptions, ConvergenceReport, RateCheck,
};
pub use errors::{energy_error, error_norms, l2_error, ErrorNorms};
pub use problems::{ExactSolution, ManufacturedProblem, Polynomial, PROBLEM_NAMES};

/// Assembles and solves the problem with `f = -Δu` and `g = u`.
pub fn solve_manufactured(
    mesh: &Mesh,
    order: usize,
    problem: &ManufacturedProblem,
    stab: &StabilizationChoice,
    solver: SolverChoice,
) -> Result<(Assembled, Solution)> {
    if problem.dimension != mesh.dimension() {
        return Err(VemError::InvalidInput(format!(
            "problem '{}' is {}D but the mesh is {}D",
            problem.name,
            problem.dimension,
            mesh.dimension()
        )));
    }
    let dofmap = build_dof_map(mesh, order)?;
    let constraints = apply_dirichlet(mesh, &dofmap, |x| problem.u(x))?;
    let assembled = assemble(mesh, &dofmap, stab, |x| problem.forcing(x), constraints)?;
    let solution = solve(&assembled.system, solver)?;
    Ok((assembled, solution))
}

#[derive(Debug, Clone, Serialize)]
pub struct PatchTestReport {
    pub order: usize,
    pub degree: usize,
    pub max_dof_error: f64,
    /// Largest DoF magnitude of the exact polynomial.
    pub dof_scale: f64,
    pub energy_error: f64,
    pub l2_error: f64,
}

impl PatchTestReport {
    /// Max DoF error relative to the polynomial's DoF magnitude (at least 1).
    pub fn scaled_error(&self) -> f64 {
        self.max_dof_error / self.dof_scale.max(1.0)
    }
}

/// Solves with a polynomial exact solution of degree ≤ k and compares the
/// computed DoFs against the polynomial's own DoFs.
pub fn run_patch_test(
    mesh: &Mesh,
    order: usize,
    p: &Polynomial,
    stab: &StabilizationChoice,
) -> Result<PatchTestReport> {
    if p.degree() > order {
        return Err(VemError::InvalidInput(format!(
            "patch polynomial has degree {} above the order {order}",
            p.degree()
        )));
    }
    let problem = ManufacturedProblem::polynomial(p.clone());
    let (assembled, solution) =
        solve_manufactured(mesh, order, &problem, stab, SolverChoice::Auto)?;
    let exact: DVector<f64> = interpolate(mesh, &assembled.dofmap, 2 * order, |x| p.eval(x))?;
    let norms = error_norms(mesh, &assembled, &solution.values, &problem)?;
    Ok(PatchTestReport {
        order,
        degree: p.degree(),
        max_dof_error: (&solution.values - &exact).amax(),
        dof_scale: exact.amax(),
        energy_error: norms.energy,
        l2_error: norms.l2,
    })
}

#[cfg(test)]
mod tests;
