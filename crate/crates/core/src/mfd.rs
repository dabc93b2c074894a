//! Mimetic finite difference stabilization and its equivalence with the
//! virtual element stabilization.
//!
//! Both families share the consistency term. They differ in how the
//! complement of the polynomial DoF subspace is stabilized: the virtual
//! element form uses the oblique projector `Π = D G⁻¹ B`, the mimetic form
//! the orthogonal projector `Π⊥ = D (DᵀD)⁻¹ Dᵀ`.

use log::warn;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::element::{LocalElement, StabilizationChoice};
use crate::error::{Result, VemError};
use crate::mesh::Mesh;

/// Orthogonal projector onto the column space of `d`, formed as `Q Qᵀ` from a
/// thin QR factorization so that the conditioning of `DᵀD` is never squared.
pub fn build_pi_perp(d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, m) = d.shape();
    if m > n {
        return Err(VemError::Singular(format!(
            "D has more columns ({m}) than rows ({n})"
        )));
    }
    let qr = d.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..m).map(|i| r[(i, i)].abs()).collect();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if lo.is_nan() || lo <= f64::EPSILON * hi * m as f64 {
        return Err(VemError::Singular("D is rank-deficient".into()));
    }
    // Squared diagonal ratio approximates the conditioning of DᵀD.
    let cond = (hi / lo).powi(2);
    if cond > 1e12 {
        warn!("DᵀD condition estimate {cond:.3e} exceeds 1e12");
    }
    if n == m {
        return Ok(DMatrix::identity(n, n));
    }
    let q = qr.q();
    Ok(&q * q.transpose())
}

/// `(I - Π⊥) U (I - Π⊥)`.
pub fn mfd_stabilization(pi_perp: &DMatrix<f64>, u: &DMatrix<f64>) -> DMatrix<f64> {
    let c = DMatrix::identity(pi_perp.nrows(), pi_perp.ncols()) - pi_perp;
    &c * u * &c
}

/// `(I - Π)ᵀ S (I - Π)`.
pub fn vem_stabilization(pi: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    let c = DMatrix::identity(pi.nrows(), pi.ncols()) - pi;
    c.transpose() * s * &c
}

fn rel(residual: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    rel_to(residual, reference.norm())
}

fn rel_to(residual: &DMatrix<f64>, scale: f64) -> f64 {
    let r = residual.norm();
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Rel1Report {
    /// ‖Π Π⊥ − Π⊥‖ / ‖Π⊥‖
    pub pi_pi_perp: f64,
    /// ‖Πᵀ Π⊥ − Πᵀ‖ / ‖Π‖
    pub pi_t_pi_perp: f64,
    /// ‖Π⊥ Π − Π‖ / ‖Π‖
    pub pi_perp_pi: f64,
}

impl Rel1Report {
    pub fn max(&self) -> f64 {
        self.pi_pi_perp.max(self.pi_t_pi_perp).max(self.pi_perp_pi)
    }
}

/// Residuals of the three identities linking the two projectors.
pub fn verify_rel1(pi: &DMatrix<f64>, pi_perp: &DMatrix<f64>) -> Rel1Report {
    Rel1Report {
        pi_pi_perp: rel(&(pi * pi_perp - pi_perp), pi_perp),
        pi_t_pi_perp: rel(&(pi.transpose() * pi_perp - pi.transpose()), pi),
        pi_perp_pi: rel(&(pi_perp * pi - pi), pi),
    }
}

#[derive(Debug, Clone)]
pub struct LemmaOutcome {
    /// The matrix chosen on the other side (S for part i, U for part ii).
    pub chosen: DMatrix<f64>,
    /// The stabilization rebuilt from `chosen`.
    pub rebuilt: DMatrix<f64>,
    pub residual: f64,
}

/// Given a mimetic stabilization, the virtual element stabilization built
/// from `S := M_mfd` reproduces it. The residual is relative to `‖M_mfd‖`.
pub fn lemma_part_i(m_mfd: &DMatrix<f64>, pi: &DMatrix<f64>) -> LemmaOutcome {
    let rebuilt = vem_stabilization(pi, m_mfd);
    LemmaOutcome {
        residual: rel(&(&rebuilt - m_mfd), m_mfd),
        chosen: m_mfd.clone(),
        rebuilt,
    }
}

/// Given a virtual element stabilization matrix `S`, the mimetic
/// stabilization built from `U := (I - Π)ᵀ S (I - Π)` reproduces it. The
/// residual is relative to the larger of `‖U‖` and `‖S‖`, so that the
/// degenerate case `Π = I` (both sides at round-off) does not read as a
/// failure.
pub fn lemma_part_ii(s: &DMatrix<f64>, pi: &DMatrix<f64>, pi_perp: &DMatrix<f64>) -> LemmaOutcome {
    let u = vem_stabilization(pi, s);
    let rebuilt = mfd_stabilization(pi_perp, &u);
    LemmaOutcome {
        residual: rel_to(&(&rebuilt - &u), u.norm().max(s.norm())),
        chosen: u,
        rebuilt,
    }
}

/// `AᵀA + ε I` with `ε = 1e-3 ‖AᵀA‖` and entries of `A` uniform in `[-1, 1)`.
pub fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let ata = a.transpose() * &a;
    let eps = 1e-3 * ata.norm();
    ata + DMatrix::identity(n, n) * eps
}

/// Diagonal matrix with entries drawn from `[0.5, 2)`.
pub fn random_positive_diagonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        rng.gen_range(0.5..2.0)
    }))
}

/// True when `m` is symmetric and every eigenvalue exceeds `tol ‖m‖`.
pub fn is_spd_candidate(m: &DMatrix<f64>, tol: f64) -> bool {
    let norm = m.norm();
    if norm == 0.0 || (m - m.transpose()).norm() > tol * norm {
        return false;
    }
    let eig = m.clone().symmetric_eigenvalues();
    eig.iter().all(|&v| v > tol * norm)
}

/// One randomized equivalence trial on a single cell.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceTrial {
    pub cell: usize,
    pub order: usize,
    pub seed: u64,
    /// Residual of rebuilding a random mimetic stabilization from the virtual side.
    pub part_i: f64,
    /// Residual of rebuilding a random virtual stabilization from the mimetic side.
    pub part_ii: f64,
    pub rel1: Rel1Report,
    /// Whether the random S of the second part was SPD (diagonal trials always are).
    pub s_spd: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub trials: Vec<EquivalenceTrial>,
    pub max_part_i: f64,
    pub max_part_ii: f64,
    pub max_rel1: f64,
}

impl EquivalenceReport {
    pub fn max(&self) -> f64 {
        self.max_part_i.max(self.max_part_ii).max(self.max_rel1)
    }
}

/// Runs `trials` randomized checks, drawing a cell, an order from `orders`
/// and a random SPD parameter matrix for each trial. Odd trials use a
/// random positive diagonal `S`, even trials a dense SPD one.
pub fn check_equivalence(
    mesh: &Mesh,
    orders: &[usize],
    trials: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    if orders.is_empty() || orders.contains(&0) {
        return Err(VemError::InvalidInput("order must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(usize, usize, u64)> = (0..trials)
        .map(|_| {
            (
                rng.gen_range(0..mesh.num_cells()),
                orders[rng.gen_range(0..orders.len())],
                rng.gen(),
            )
        })
        .collect();
    let out: Vec<EquivalenceTrial> = draws
        .into_par_iter()
        .enumerate()
        .map(|(t, (cell, order, s))| {
            let el = LocalElement::new(mesh, cell, order, &StabilizationChoice::VemIdentity)?;
            let n = el.d.nrows();
            let pi = el.pi();
            let pi_perp = build_pi_perp(&el.d)?;
            let m_mfd = mfd_stabilization(&pi_perp, &random_spd(n, s));
            let part_i = lemma_part_i(&m_mfd, pi).residual;
            let s_mat = if t % 2 == 1 {
                random_positive_diagonal(n, s ^ 0x5eed)
            } else {
                random_spd(n, s ^ 0x5eed)
            };
            let part_ii = lemma_part_ii(&s_mat, pi, &pi_perp).residual;
            Ok(EquivalenceTrial {
                cell,
                order,
                seed: s,
                part_i,
                part_ii,
                rel1: verify_rel1(pi, &pi_perp),
                s_spd: is_spd_candidate(&s_mat, 1e-14),
            })
        })
        .collect::<Result<_>>()?;
    let fold = |f: fn(&EquivalenceTrial) -> f64| out.iter().map(f).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        max_part_i: fold(|t| t.part_i),
        max_part_ii: fold(|t| t.part_ii),
        max_rel1: fold(|t| t.rel1.max()),
        trials: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_full_rank(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn pi_perp_is_orthogonal_projector() {
        let d = random_full_rank(9, 4, 1);
        let p = build_pi_perp(&d).unwrap();
        assert!((&p * &p - &p).norm() < 1e-12 * p.norm());
        assert!((&p * &d - &d).norm() < 1e-12 * d.norm());
        assert!((&p - p.transpose()).norm() < 1e-13);
        assert!((p.trace() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_d_is_rejected() {
        let mut d = random_full_rank(6, 3, 2);
        let col = d.column(0).clone_owned();
        d.set_column(2, &(col * 2.0));
        assert!(build_pi_perp(&d).is_err());
    }

    #[test]
    fn random_spd_is_spd_and_reproducible() {
        let a = random_spd(7, 11);
        assert!(is_spd_candidate(&a, 1e-12));
        assert_eq!(a, random_spd(7, 11));
        assert!(!is_spd_candidate(&DMatrix::zeros(3, 3), 1e-12));
    }

    #[test]
    fn square_d_gives_identity_projectors() {
        let d = random_full_rank(4, 4, 5);
        let p = build_pi_perp(&d).unwrap();
        assert!((&p - DMatrix::identity(4, 4)).norm() < 1e-12);
        let r = verify_rel1(&p, &p);
        assert!(r.max() < 1e-12);
    }

    #[test]
    fn equivalence_check_on_hexagons() {
        let m = crate::mesh::generate_mesh(crate::mesh::MeshKind::HexagonDominant, 3, 0).unwrap();
        let r = check_equivalence(&m, &[1, 2, 3], 12, 9).unwrap();
        assert_eq!(r.trials.len(), 12);
        assert!(r.max() <= 1e-12, "{r:?}");
        assert!(r.trials.iter().all(|t| t.s_spd));
        let again = check_equivalence(&m, &[1, 2, 3], 12, 9).unwrap();
        assert_eq!(r.max().to_bits(), again.max().to_bits());
        assert!(check_equivalence(&m, &[0], 1, 0).is_err());
    }
}
