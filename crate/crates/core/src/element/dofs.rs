use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::Result;
use crate::mesh::{Mesh, Point};
use crate::polybasis::{
    monomial_count, quadrature_on_cell, quadrature_on_face, ScaledMonomialBasis,
};

/// Local numbering of the degrees of freedom of one cell.
///
/// Face moments come first, face by face in the cell's local face order and
/// graded-lex within a face; the cell moments follow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DofLayout {
    pub order: usize,
    pub dimension: usize,
    pub num_faces: usize,
    /// Moments per face: members of the face basis of degree `order - 1`.
    pub per_face: usize,
    /// Interior moments: members of the cell basis of degree `order - 2`.
    pub per_cell: usize,
}

impl DofLayout {
    pub fn new(dimension: usize, num_faces: usize, order: usize) -> Self {
        assert!(order >= 1, "order must be ≥ 1");
        DofLayout {
            order,
            dimension,
            num_faces,
            per_face: monomial_count(dimension - 1, order - 1),
            per_cell: if order >= 2 {
                monomial_count(dimension, order - 2)
            } else {
                0
            },
        }
    }

    pub fn len(&self) -> usize {
        self.num_faces * self.per_face + self.per_cell
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn face_dof(&self, local_face: usize, moment: usize) -> usize {
        local_face * self.per_face + moment
    }

    pub fn cell_dof(&self, moment: usize) -> usize {
        self.num_faces * self.per_face + moment
    }

    /// Dimension of the polynomial space of degree `order` on the cell.
    pub fn num_polys(&self) -> usize {
        monomial_count(self.dimension, self.order)
    }
}

pub fn build_dof_layout(mesh: &Mesh, cell: usize, order: usize) -> DofLayout {
    DofLayout::new(mesh.dimension(), mesh.cells()[cell].num_faces(), order)
}

/// Scaled moments of a set of functions against the face and cell bases.
///
/// `fs` evaluates all functions at once; column `j` of the result holds the
/// DoFs of the `j`-th function. Integrals use rules exact to `degree`.
pub(crate) fn dofs_of_functions(
    mesh: &Mesh,
    cell: usize,
    layout: &DofLayout,
    count: usize,
    degree: usize,
    fs: impl Fn(&Point) -> Vec<f64>,
) -> Result<DMatrix<f64>> {
    let k = layout.order;
    let mut out = DMatrix::zeros(layout.len(), count);
    for (l, &f) in mesh.cells()[cell].faces.iter().enumerate() {
        let basis = ScaledMonomialBasis::face(mesh, f, k - 1);
        let rule = quadrature_on_face(mesh, f, degree)?;
        let inv = 1.0 / mesh.geometry().faces[f].measure;
        for (p, &w) in rule.points.iter().zip(&rule.weights) {
            let m = basis.eval_all(p);
            let v = fs(p);
            for (a, ma) in m.iter().enumerate() {
                let row = layout.face_dof(l, a);
                for (j, vj) in v.iter().enumerate() {
                    out[(row, j)] += w * inv * ma * vj;
                }
            }
        }
    }
    if layout.per_cell > 0 {
        let basis = ScaledMonomialBasis::cell(mesh, cell, k - 2);
        let rule = quadrature_on_cell(mesh, cell, degree)?;
        let inv = 1.0 / mesh.geometry().cells[cell].measure;
        for (p, &w) in rule.points.iter().zip(&rule.weights) {
            let m = basis.eval_all(p);
            let v = fs(p);
            for (a, ma) in m.iter().enumerate() {
                let row = layout.cell_dof(a);
                for (j, vj) in v.iter().enumerate() {
                    out[(row, j)] += w * inv * ma * vj;
                }
            }
        }
    }
    Ok(out)
}

/// DoF vector of an explicit function, with integrals exact to `degree`.
pub fn compute_dofs_of_function(
    mesh: &Mesh,
    cell: usize,
    layout: &DofLayout,
    degree: usize,
    f: impl Fn(&Point) -> f64,
) -> Result<DVector<f64>> {
    let m = dofs_of_functions(mesh, cell, layout, 1, degree, |x| vec![f(x)])?;
    Ok(m.column(0).into_owned())
}

/// `D[i][j]`: the i-th DoF of the j-th cell monomial of degree ≤ k.
pub fn build_d(mesh: &Mesh, cell: usize, layout: &DofLayout) -> Result<DMatrix<f64>> {
    let basis = ScaledMonomialBasis::cell(mesh, cell, layout.order);
    dofs_of_functions(mesh, cell, layout, basis.len(), 2 * layout.order, |x| {
        basis.eval_all(x)
    })
}
