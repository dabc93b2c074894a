use serde::{Deserialize, Serialize};

use super::{DofMap, Solution};
use crate::element::LocalElement;

/// Solution output: the global DoF vector, its numbering, and the projected
/// polynomial of every cell in its scaled monomial basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub order: usize,
    pub dimension: usize,
    pub stabilization: String,
    pub dof_map: DofMapDescription,
    pub solver: SolverSummary,
    pub dofs: Vec<f64>,
    pub projections: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DofMapDescription {
    pub total: usize,
    pub num_faces: usize,
    pub per_face: usize,
    pub num_cells: usize,
    pub per_cell: usize,
    /// Face moments occupy `[0, cell_block_start)`, face `f` starting at `f * per_face`.
    pub cell_block_start: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSummary {
    pub method: String,
    pub iterations: usize,
    pub relative_residual: f64,
    pub free_dofs: usize,
}

impl SolutionFile {
    pub fn new(
        dimension: usize,
        stabilization: &str,
        dofmap: &DofMap,
        solution: &Solution,
        elements: &[LocalElement],
        mesh: &crate::mesh::Mesh,
    ) -> Self {
        let projections = elements
            .iter()
            .map(|el| {
                let local = nalgebra::DVector::from_iterator(
                    el.layout.len(),
                    dofmap
                        .local_to_global(mesh, el.cell)
                        .into_iter()
                        .map(|g| solution.values[g]),
                );
                el.project(&local).iter().copied().collect()
            })
            .collect();
        SolutionFile {
            order: dofmap.order,
            dimension,
            stabilization: stabilization.to_string(),
            dof_map: DofMapDescription {
                total: dofmap.len(),
                num_faces: dofmap.num_faces,
                per_face: dofmap.per_face,
                num_cells: dofmap.num_cells,
                per_cell: dofmap.per_cell,
                cell_block_start: dofmap.cell_offset(0),
            },
            solver: SolverSummary {
                method: solution.stats.method.to_string(),
                iterations: solution.stats.iterations,
                relative_residual: solution.stats.residual,
                free_dofs: solution.free,
            },
            dofs: solution.values.iter().copied().collect(),
            projections,
        }
    }
}
