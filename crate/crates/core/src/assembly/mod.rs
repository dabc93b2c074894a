//! Global numbering, Dirichlet constraints, assembly and linear solve.
//!
//! Face moments are numbered first, face by face; each face's moments are
//! defined in the face's own frame, so both incident cells refer to the same
//! unknowns. Interior cell moments follow, cell by cell.

mod solution;
mod solver;
mod sparse;

use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::element::{LocalElement, StabilizationChoice, DATA_EXTRA_DEGREE};
use crate::error::{Result, VemError};
use crate::mesh::{Mesh, Point};
use crate::polybasis::{monomial_count, quadrature_on_face, ScaledMonomialBasis};

pub use solution::SolutionFile;
pub use solver::{
    dense_cholesky, pcg, solve_spd, SolveStats, SolverChoice, CG_ITERATION_FACTOR, CG_TOLERANCE,
    DENSE_LIMIT,
};
pub use sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DofMap {
    pub order: usize,
    pub num_faces: usize,
    pub num_cells: usize,
    pub per_face: usize,
    pub per_cell: usize,
}

impl DofMap {
    pub fn len(&self) -> usize {
        self.num_faces * self.per_face + self.num_cells * self.per_cell
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn face_offset(&self, face: usize) -> usize {
        face * self.per_face
    }

    pub fn cell_offset(&self, cell: usize) -> usize {
        self.num_faces * self.per_face + cell * self.per_cell
    }

    /// Global index of every local DoF of `cell`, in local order.
    pub fn local_to_global(&self, mesh: &Mesh, cell: usize) -> Vec<usize> {
        let mut out =
            Vec::with_capacity(mesh.cells()[cell].num_faces() * self.per_face + self.per_cell);
        for &f in &mesh.cells()[cell].faces {
            out.extend(self.face_offset(f)..self.face_offset(f) + self.per_face);
        }
        out.extend(self.cell_offset(cell)..self.cell_offset(cell) + self.per_cell);
        out
    }
}

pub fn build_dof_map(mesh: &Mesh, order: usize) -> Result<DofMap> {
    if order == 0 {
        return Err(VemError::InvalidInput("order must be ≥ 1".into()));
    }
    let d = mesh.dimension();
    Ok(DofMap {
        order,
        num_faces: mesh.num_faces(),
        num_cells: mesh.num_cells(),
        per_face: monomial_count(d - 1, order - 1),
        per_cell: if order >= 2 {
            monomial_count(d, order - 2)
        } else {
            0
        },
    })
}

/// Prescribed values of constrained global DoFs.
pub type Constraints = BTreeMap<usize, f64>;

/// Constrains every boundary face moment to the corresponding moment of `g`.
pub fn apply_dirichlet(
    mesh: &Mesh,
    dofmap: &DofMap,
    g: impl Fn(&Point) -> f64 + Sync,
) -> Result<Constraints> {
    let faces: Vec<usize> = mesh.boundary_faces().collect();
    let k = dofmap.order;
    let moments: Vec<Vec<f64>> = faces
        .par_iter()
        .map(|&f| {
            let basis = ScaledMonomialBasis::face(mesh, f, k - 1);
            let rule = quadrature_on_face(mesh, f, 2 * k + DATA_EXTRA_DEGREE)?;
            let inv = 1.0 / mesh.geometry().faces[f].measure;
            let mut m = vec![0.0; dofmap.per_face];
            for (p, &w) in rule.points.iter().zip(&rule.weights) {
                let gv = g(p);
                for (a, v) in basis.eval_all(p).iter().enumerate() {
                    m[a] += w * inv * gv * v;
                }
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let mut out = Constraints::new();
    for (&f, m) in faces.iter().zip(moments) {
        for (a, v) in m.into_iter().enumerate() {
            out.insert(dofmap.face_offset(f) + a, v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: DVector<f64>,
    pub constraints: Constraints,
}

/// Result of assembling: the global system plus the local elements, kept for
/// post-processing.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub dofmap: DofMap,
    pub system: LinearSystem,
    pub elements: Vec<LocalElement>,
}

/// Builds all local elements (in parallel, in the ambient rayon pool) and
/// scatters them in cell order.
pub fn assemble(
    mesh: &Mesh,
    dofmap: &DofMap,
    stab: &StabilizationChoice,
    f: impl Fn(&Point) -> f64 + Sync,
    constraints: Constraints,
) -> Result<Assembled> {
    let locals: Vec<(LocalElement, DVector<f64>)> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let el = LocalElement::new(mesh, c, dofmap.order, stab)?;
            let load = el.load(mesh, &f)?;
            Ok((el, load))
        })
        .collect::<Result<_>>()?;

    let n = dofmap.len();
    let mut triplets = Vec::with_capacity(locals.iter().map(|(e, _)| e.m.len()).sum());
    let mut rhs = DVector::zeros(n);
    for (el, load) in &locals {
        let map = dofmap.local_to_global(mesh, el.cell);
        for (i, &gi) in map.iter().enumerate() {
            rhs[gi] += load[i];
            for (j, &gj) in map.iter().enumerate() {
                triplets.push((gi, gj, el.m[(i, j)]));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(n, n, &triplets);
    Ok(Assembled {
        dofmap: dofmap.clone(),
        system: LinearSystem {
            matrix,
            rhs,
            constraints,
        },
        elements: locals.into_iter().map(|(e, _)| e).collect(),
    })
}

/// Full DoF vector and solver statistics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub values: DVector<f64>,
    pub stats: SolveStats,
    pub free: usize,
}

/// Eliminates the constrained DoFs symmetrically and solves for the rest.
pub fn solve(system: &LinearSystem, choice: SolverChoice) -> Result<Solution> {
    let n = system.rhs.len();
    let mut new_index = vec![None; n];
    let mut free = Vec::with_capacity(n);
    for (i, slot) in new_index.iter_mut().enumerate() {
        if !system.constraints.contains_key(&i) {
            *slot = Some(free.len());
            free.push(i);
        }
    }
    let mut fixed = DVector::zeros(n);
    for (&i, &v) in &system.constraints {
        fixed[i] = v;
    }
    let lifted = system.matrix.mul_vec(&fixed);
    let rhs = DVector::from_fn(free.len(), |r, _| system.rhs[free[r]] - lifted[free[r]]);
    let a = system.matrix.submatrix(&free, &new_index);
    let (x, stats) = solve_spd(&a, &rhs, choice)?;
    let mut values = fixed;
    for (r, &i) in free.iter().enumerate() {
        values[i] = x[r];
    }
    Ok(Solution {
        values,
        stats,
        free: free.len(),
    })
}

/// Global DoF vector of an explicit function, cell by cell. Shared faces are
/// written by every incident cell; the values agree because face moments use
/// the face's own basis.
pub fn interpolate(
    mesh: &Mesh,
    dofmap: &DofMap,
    degree: usize,
    f: impl Fn(&Point) -> f64 + Sync,
) -> Result<DVector<f64>> {
    let per_cell: Vec<DVector<f64>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let layout = crate::element::build_dof_layout(mesh, c, dofmap.order);
            crate::element::compute_dofs_of_function(mesh, c, &layout, degree, &f)
        })
        .collect::<Result<_>>()?;
    let mut out = DVector::zeros(dofmap.len());
    for (c, v) in per_cell.iter().enumerate() {
        for (i, g) in dofmap.local_to_global(mesh, c).into_iter().enumerate() {
            out[g] = v[i];
        }
    }
    Ok(out)
}
