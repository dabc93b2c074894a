use log::warn;
use nalgebra::{DMatrix, DVector};

use super::dofs::DofLayout;
use crate::error::{Result, VemError};
use crate::mesh::{Mesh, Point};
use crate::mfd::build_pi_perp;
use crate::polybasis::{
    l2_project_onto_cell_polys, restrict_to_face, MultiIndex, ScaledMonomialBasis,
};

/// How the complement of the polynomial DoF subspace is stabilized.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum StabilizationChoice {
    /// `S = h_K^{d-2} I`.
    #[default]
    VemIdentity,
    /// `S = ρ (I - Π⊥)` with `ρ` the mean diagonal of the consistency term.
    MfdTrace,
    /// A user-supplied symmetric positive semidefinite matrix.
    Custom(DMatrix<f64>),
}

impl std::str::FromStr for StabilizationChoice {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vem-identity" => Ok(Self::VemIdentity),
            "mfd-trace" => Ok(Self::MfdTrace),
            other => Err(VemError::InvalidInput(format!(
                "unknown stabilization '{other}' (expected vem-identity or mfd-trace)"
            ))),
        }
    }
}

impl StabilizationChoice {
    pub fn name(&self) -> &'static str {
        match self {
            Self::VemIdentity => "vem-identity",
            Self::MfdTrace => "mfd-trace",
            Self::Custom(_) => "custom",
        }
    }
}

/// Relative tolerance on the exact face re-expansion of normal derivatives.
const FACE_EXPANSION_TOL: f64 = 1e-10;

/// Row 0 fixes the constant part of the projection; rows `i ≥ 1` hold
/// `∫_K ∇m_i · ∇ψ_j` through integration by parts against the DoFs.
pub fn build_b(mesh: &Mesh, cell: usize, layout: &DofLayout) -> Result<DMatrix<f64>> {
    let k = layout.order;
    let geo = mesh.geometry();
    let area = geo.cells[cell].measure;
    let basis = ScaledMonomialBasis::cell(mesh, cell, k);
    let h = basis.scale();
    let mut b = DMatrix::zeros(basis.len(), layout.len());
    let c = &mesh.cells()[cell];

    if k == 1 {
        for (l, &f) in c.faces.iter().enumerate() {
            b[(0, layout.face_dof(l, 0))] = geo.faces[f].measure;
        }
    } else {
        b[(0, layout.cell_dof(0))] = area;
    }

    // -∫ Δm_i ψ_j: Δm_i is a combination of cell monomials of degree k-2.
    for (i, idx) in basis.indices().iter().enumerate().skip(1) {
        for (pos, coef) in basis.laplacian_terms(idx) {
            b[(i, layout.cell_dof(pos))] -= coef * area;
        }
    }

    // Σ_e ∫_e ∂m_i/∂n ψ_j: each partial derivative of m_i is a scaled
    // monomial of degree ≤ k-1, restricted exactly to the face.
    let lower = ScaledMonomialBasis::new_cell(basis.center(), h, mesh.dimension(), k - 1);
    for (l, &f) in c.faces.iter().enumerate() {
        let fb = ScaledMonomialBasis::face(mesh, f, k - 1);
        let restricted = restrict_to_face(&lower, &fb);
        let n = mesh.outward_normal(cell, l);
        let meas = geo.faces[f].measure;
        for (i, idx) in basis.indices().iter().enumerate().skip(1) {
            let s = idx.exponents();
            let mut coeffs = vec![0.0; layout.per_face];
            for j in 0..mesh.dimension() {
                if s[j] == 0 || n[j] == 0.0 {
                    continue;
                }
                let mut t = s.to_vec();
                t[j] -= 1;
                let factor = s[j] as f64 / h * n[j];
                let poly = restricted[MultiIndex::new(&t).position()].coefficients_up_to(k - 1);
                for (a, pa) in poly.iter().enumerate() {
                    coeffs[a] += factor * pa;
                }
            }
            check_face_expansion(mesh, cell, f, &basis, idx, &n, &fb, &coeffs)?;
            for (a, ca) in coeffs.iter().enumerate() {
                b[(i, layout.face_dof(l, a))] += ca * meas;
            }
        }
    }
    Ok(b)
}

/// Compares the face expansion of `∂m/∂n` with direct evaluation at the
/// face vertices.
#[allow(clippy::too_many_arguments)]
fn check_face_expansion(
    mesh: &Mesh,
    cell: usize,
    face: usize,
    basis: &ScaledMonomialBasis,
    idx: &MultiIndex,
    n: &Point,
    fb: &ScaledMonomialBasis,
    coeffs: &[f64],
) -> Result<()> {
    for &v in &mesh.faces()[face] {
        let x = mesh.vertices()[v];
        let exact = basis.eval_gradient(idx, &x).dot(n);
        let approx: f64 = fb.eval_all(&x).iter().zip(coeffs).map(|(m, c)| m * c).sum();
        let scale = 1.0 / basis.scale();
        if (exact - approx).abs() > FACE_EXPANSION_TOL * scale.max(exact.abs()) {
            return Err(VemError::Element {
                cell,
                detail: format!(
                    "normal derivative expansion residual {:.3e} on face {face}",
                    exact - approx
                ),
            });
        }
    }
    Ok(())
}

/// The Ritz projection in matrix form.
#[derive(Debug, Clone)]
pub struct Projector {
    pub g: DMatrix<f64>,
    /// `G` with its first row zeroed: the monomial stiffness matrix.
    pub g_tilde: DMatrix<f64>,
    /// Maps DoF vectors to coefficients in the cell basis of degree k.
    pub pi_star: DMatrix<f64>,
    /// `D Π*`: the projection expressed back in DoFs.
    pub pi: DMatrix<f64>,
    pub condition: f64,
}

pub fn build_projector(cell: usize, d: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Projector> {
    let g = b * d;
    let sv = g.clone().singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if lo.is_nan() || lo <= f64::EPSILON * hi {
        return Err(VemError::Unisolvence {
            cell,
            detail: "G is singular".into(),
        });
    }
    let condition = hi / lo;
    if condition > 1e12 {
        warn!("cell {cell}: G condition number {condition:.3e} exceeds 1e12");
    }
    let pi_star = g
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| VemError::Unisolvence {
            cell,
            detail: "LU factorization of G failed".into(),
        })?;
    let mut g_tilde = g.clone();
    g_tilde.row_mut(0).fill(0.0);
    let pi = d * &pi_star;
    Ok(Projector {
        g,
        g_tilde,
        pi_star,
        pi,
        condition,
    })
}

/// Stabilization matrix `S` for the given choice.
pub fn build_stabilization(
    mesh: &Mesh,
    cell: usize,
    layout: &DofLayout,
    d: &DMatrix<f64>,
    projector: &Projector,
    choice: &StabilizationChoice,
) -> Result<DMatrix<f64>> {
    let n = layout.len();
    match choice {
        StabilizationChoice::VemIdentity => {
            let h = mesh.geometry().cells[cell].diameter;
            Ok(DMatrix::identity(n, n) * h.powi(mesh.dimension() as i32 - 2))
        }
        StabilizationChoice::MfdTrace => {
            let m0 = consistency_term(projector);
            let rho = m0.trace() / n as f64;
            let pi_perp = build_pi_perp(d)?;
            Ok((DMatrix::identity(n, n) - pi_perp) * rho)
        }
        StabilizationChoice::Custom(s) => {
            if s.nrows() != n || s.ncols() != n {
                return Err(VemError::InvalidInput(format!(
                    "custom stabilization is {}x{}, expected {n}x{n}",
                    s.nrows(),
                    s.ncols()
                )));
            }
            let norm = s.norm();
            if (s - s.transpose()).norm() > 1e-12 * norm {
                return Err(VemError::InvalidInput(
                    "custom stabilization is not symmetric".into(),
                ));
            }
            let min = s.clone().symmetric_eigenvalues().min();
            if min < -1e-10 * norm {
                return Err(VemError::InvalidInput(format!(
                    "custom stabilization has negative eigenvalue {min:.3e}"
                )));
            }
            Ok(s.clone())
        }
    }
}

/// `Π*ᵀ G̃ Π*`.
pub fn consistency_term(projector: &Projector) -> DMatrix<f64> {
    projector.pi_star.transpose() * &projector.g_tilde * &projector.pi_star
}

/// Local stiffness `M = Π*ᵀ G̃ Π* + (I - Π)ᵀ S (I - Π)`, symmetrized after a
/// symmetry check.
pub fn build_stiffness(
    cell: usize,
    projector: &Projector,
    s: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m0 = consistency_term(projector);
    let m1 = crate::mfd::vem_stabilization(&projector.pi, s);
    let m = &m0 + &m1;
    let norm = m.norm();
    let asym = (&m - m.transpose()).norm();
    if asym > 1e-10 * norm {
        return Err(VemError::Element {
            cell,
            detail: format!("local stiffness asymmetry {:.3e}", asym / norm),
        });
    }
    let m = (&m + m.transpose()) * 0.5;
    Ok((m0, m))
}

/// Local load vector for the forcing `f`; data integrals are exact to
/// `2k + extra_degree`.
pub fn build_load(
    mesh: &Mesh,
    cell: usize,
    layout: &DofLayout,
    extra_degree: usize,
    f: impl Fn(&Point) -> f64,
) -> Result<DVector<f64>> {
    let k = layout.order;
    let area = mesh.geometry().cells[cell].measure;
    let mut load = DVector::zeros(layout.len());
    if k == 1 {
        let mean = l2_project_onto_cell_polys(mesh, cell, 0, 2 + extra_degree, &f)?[0];
        let share = area * mean / layout.num_faces as f64;
        for l in 0..layout.num_faces {
            load[layout.face_dof(l, 0)] = share;
        }
    } else {
        let extra = 2 * k + extra_degree - 2 * (k - 2);
        let c = l2_project_onto_cell_polys(mesh, cell, k - 2, extra, &f)?;
        for (a, ca) in c.iter().enumerate() {
            load[layout.cell_dof(a)] = area * ca;
        }
    }
    Ok(load)
}
