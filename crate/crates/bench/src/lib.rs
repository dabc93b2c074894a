//! Shared fixtures for the benchmarks.

use ncvem_core::analysis::ManufacturedProblem;
use ncvem_core::mesh::generate_mesh;
use ncvem_core::{Mesh, MeshKind};

/// A generated mesh; panics on generator failure, which benchmarks cannot recover from.
pub fn fixture_mesh(kind: MeshKind, res: usize) -> Mesh {
    generate_mesh(kind, res, 0).unwrap_or_else(|e| panic!("{kind} at resolution {res}: {e}"))
}

/// The smooth manufactured problem matching the mesh dimension.
pub fn smooth_problem(dimension: usize) -> ManufacturedProblem {
    let name = if dimension == 3 { "sin3d" } else { "sin2d" };
    ManufacturedProblem::by_name(name).expect("built-in problem")
}
