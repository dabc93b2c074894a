//! The local nonconforming virtual element of order `k`.
//!
//! Degrees of freedom are scaled moments: `(1/|e|) ∫_e v m` against the face
//! monomials of degree `k - 1`, and `(1/|K|) ∫_K v m` against the cell
//! monomials of degree `k - 2`. Everything else is linear algebra on the
//! matrices `D` (DoFs of the cell monomials) and `B` (right-hand side of the
//! Ritz projection).

mod dofs;
mod dump;
mod matrices;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, VemError};
use crate::mesh::{Mesh, Point};

pub use dofs::{build_d, build_dof_layout, compute_dofs_of_function, DofLayout};
pub use dump::{dump_element, ElementDump};
pub use matrices::{
    build_b, build_load, build_projector, build_stabilization, build_stiffness, consistency_term,
    Projector, StabilizationChoice,
};

/// Extra quadrature degree for integrals of non-polynomial data.
pub const DATA_EXTRA_DEGREE: usize = 4;

#[derive(Debug, Clone)]
pub struct LocalElement {
    pub cell: usize,
    pub layout: DofLayout,
    pub d: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub projector: Projector,
    pub s: DMatrix<f64>,
    /// Consistency part `Π*ᵀ G̃ Π*` of the stiffness.
    pub m0: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

impl LocalElement {
    pub fn new(mesh: &Mesh, cell: usize, order: usize, stab: &StabilizationChoice) -> Result<Self> {
        if order == 0 {
            return Err(VemError::InvalidInput("order must be ≥ 1".into()));
        }
        let layout = build_dof_layout(mesh, cell, order);
        let d = build_d(mesh, cell, &layout)?;
        let b = build_b(mesh, cell, &layout)?;
        let projector = build_projector(cell, &d, &b)?;
        let s = build_stabilization(mesh, cell, &layout, &d, &projector, stab)?;
        let (m0, m) = build_stiffness(cell, &projector, &s)?;
        Ok(LocalElement {
            cell,
            layout,
            d,
            b,
            projector,
            s,
            m0,
            m,
        })
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn pi(&self) -> &DMatrix<f64> {
        &self.projector.pi
    }

    pub fn pi_star(&self) -> &DMatrix<f64> {
        &self.projector.pi_star
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.projector.g
    }

    pub fn g_tilde(&self) -> &DMatrix<f64> {
        &self.projector.g_tilde
    }

    /// Stabilization part `(I - Π)ᵀ S (I - Π)` of the stiffness.
    pub fn m1(&self) -> DMatrix<f64> {
        &self.m - &self.m0
    }

    /// Load vector for the forcing `f`.
    pub fn load(&self, mesh: &Mesh, f: impl Fn(&Point) -> f64) -> Result<DVector<f64>> {
        build_load(mesh, self.cell, &self.layout, DATA_EXTRA_DEGREE, f)
    }

    /// Coefficients of the projected polynomial in the cell basis.
    pub fn project(&self, dofs: &DVector<f64>) -> DVector<f64> {
        &self.projector.pi_star * dofs
    }

    /// Identity residuals, each relative to the natural scale of its terms.
    pub fn residuals(&self) -> ElementResiduals {
        let n = self.layout.len();
        let dn = self.d.norm();
        let pi_d = (&self.projector.pi * &self.d - &self.d).norm() / dn;
        let ipd = ((DMatrix::identity(n, n) - &self.projector.pi) * &self.d).norm() / dn;
        let gt = self.g_tilde();
        let consistency = (self.d.transpose() * &self.m * &self.d - gt).norm() / gt.norm();
        let mn = self.m.norm();
        let symmetry = (&self.m - self.m.transpose()).norm() / mn;
        let constant = self.d.column(0).into_owned();
        let kernel = (&self.m * &constant).norm() / (mn * constant.norm());
        let eig = sorted_eigenvalues(&self.m);
        let psd = (-eig[0] / mn).max(0.0);
        ElementResiduals {
            pi_d,
            complement_d: ipd,
            consistency,
            symmetry,
            kernel,
            psd,
            second_eigenvalue: eig[1] / mn,
        }
    }

    /// `λ_min / λ_max` of the stiffness on the complement of the constants.
    pub fn spectral_ratio(&self) -> f64 {
        let eig = sorted_eigenvalues(&self.m);
        eig[1] / eig[eig.len() - 1]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ElementResiduals {
    pub pi_d: f64,
    pub complement_d: f64,
    pub consistency: f64,
    pub symmetry: f64,
    pub kernel: f64,
    /// Magnitude of the most negative eigenvalue of `M`, relative to `‖M‖`.
    pub psd: f64,
    /// Second-smallest eigenvalue of `M` relative to `‖M‖`; positive when the
    /// kernel is exactly the constants.
    pub second_eigenvalue: f64,
}

impl ElementResiduals {
    /// Largest identity residual (excluding the kernel-gap indicator).
    pub fn max(&self) -> f64 {
        [
            self.pi_d,
            self.complement_d,
            self.consistency,
            self.symmetry,
            self.kernel,
            self.psd,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}
