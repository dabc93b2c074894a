use log::debug;
use nalgebra::{DMatrix, DVector};

use super::sparse::CsrMatrix;
use crate::error::{Result, VemError};

/// Largest free-unknown count solved by dense Cholesky under [`SolverChoice::Auto`].
pub const DENSE_LIMIT: usize = 2000;
pub const CG_TOLERANCE: f64 = 1e-12;
/// Iteration cap as a multiple of the number of unknowns.
pub const CG_ITERATION_FACTOR: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    /// Dense Cholesky up to [`DENSE_LIMIT`] unknowns, conjugate gradients above.
    #[default]
    Auto,
    Dense,
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct SolveStats {
    pub method: &'static str,
    pub iterations: usize,
    pub residual: f64,
}

/// Dense Cholesky; a pivot below `1e-13` times the largest diagonal entry
/// is reported as indefinite.
pub fn dense_cholesky(a: &CsrMatrix, b: &DVector<f64>) -> Result<(DVector<f64>, SolveStats)> {
    let dense: DMatrix<f64> = a.to_dense();
    let dmax = dense.diagonal().amax();
    let chol = dense.clone().cholesky().ok_or_else(|| {
        VemError::Indefinite("Cholesky factorization hit a non-positive pivot".into())
    })?;
    let l = chol.l_dirty();
    let min_pivot = (0..l.nrows())
        .map(|i| l[(i, i)] * l[(i, i)])
        .fold(f64::INFINITY, f64::min);
    if min_pivot.is_nan() || min_pivot <= 1e-13 * dmax {
        return Err(VemError::Indefinite(format!(
            "Cholesky pivot {min_pivot:.3e} is numerically zero (largest diagonal {dmax:.3e})"
        )));
    }
    let x = chol.solve(b);
    let r = (b - &dense * &x).norm() / b.norm().max(f64::MIN_POSITIVE);
    Ok((
        x,
        SolveStats {
            method: "cholesky",
            iterations: 0,
            residual: r,
        },
    ))
}

/// Jacobi-preconditioned conjugate gradients, stopping at relative residual
/// `tol` or after `max_iter` iterations.
pub fn pcg(
    a: &CsrMatrix,
    b: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, SolveStats)> {
    let n = b.len();
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| d.is_nan() || d <= 0.0) {
        return Err(VemError::Indefinite(format!(
            "non-positive diagonal entry at row {i}"
        )));
    }
    let inv_diag = diag.map(|d| 1.0 / d);
    let bnorm = b.norm();
    let mut x = DVector::zeros(n);
    if bnorm == 0.0 {
        return Ok((
            x,
            SolveStats {
                method: "pcg",
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let mut r = b.clone();
    let mut z = r.component_mul(&inv_diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut history = Vec::new();
    for it in 1..=max_iter {
        let ap = a.mul_vec(&p);
        let pap = p.dot(&ap);
        if pap.is_nan() || pap <= 0.0 {
            return Err(VemError::Indefinite(format!(
                "pᵀAp = {pap:.3e} at iteration {it}"
            )));
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rel = r.norm() / bnorm;
        history.push(rel);
        if rel <= tol {
            debug!("pcg converged in {it} iterations, residual {rel:.3e}");
            return Ok((
                x,
                SolveStats {
                    method: "pcg",
                    iterations: it,
                    residual: rel,
                },
            ));
        }
        z = r.component_mul(&inv_diag);
        let rz_new = r.dot(&z);
        p = &z + &p * (rz_new / rz);
        rz = rz_new;
    }
    Err(VemError::NotConverged {
        iterations: max_iter,
        residual: history.last().copied().unwrap_or(1.0),
        history,
    })
}

/// Solves an SPD system with the requested method.
pub fn solve_spd(
    a: &CsrMatrix,
    b: &DVector<f64>,
    choice: SolverChoice,
) -> Result<(DVector<f64>, SolveStats)> {
    let n = b.len();
    if n == 0 {
        return Ok((
            DVector::zeros(0),
            SolveStats {
                method: "none",
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let dense = match choice {
        SolverChoice::Auto => n <= DENSE_LIMIT,
        SolverChoice::Dense => true,
        SolverChoice::ConjugateGradient => false,
    };
    if dense {
        dense_cholesky(a, b)
    } else {
        pcg(a, b, CG_TOLERANCE, CG_ITERATION_FACTOR * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn identity_returns_rhs() {
        let b = DVector::from_vec(vec![1.0, -2.0, 3.5]);
        for choice in [SolverChoice::Dense, SolverChoice::ConjugateGradient] {
            let (x, _) = solve_spd(&CsrMatrix::identity(3), &b, choice).unwrap();
            assert!((x - &b).amax() < 1e-15);
        }
    }

    #[test]
    fn cg_matches_cholesky() {
        let a = laplacian_1d(50);
        let b = DVector::from_fn(50, |i, _| (i as f64 * 0.3).sin());
        let (x1, s1) = solve_spd(&a, &b, SolverChoice::Dense).unwrap();
        let (x2, s2) = solve_spd(&a, &b, SolverChoice::ConjugateGradient).unwrap();
        assert!((&x1 - &x2).amax() < 1e-9 * x1.amax());
        assert_eq!(s1.iterations, 0);
        assert!(s2.iterations > 0 && s2.residual <= CG_TOLERANCE);
    }

    #[test]
    fn singular_system_is_indefinite() {
        // 1D Neumann Laplacian: constants are in the kernel.
        let mut t = Vec::new();
        for i in 0..4 {
            t.push((i, i, 1.0));
            t.push((i + 1, i + 1, 1.0));
            t.push((i, i + 1, -1.0));
            t.push((i + 1, i, -1.0));
        }
        let a = CsrMatrix::from_triplets(5, 5, &t);
        let b = DVector::from_element(5, 1.0);
        assert!(matches!(
            solve_spd(&a, &b, SolverChoice::Dense),
            Err(VemError::Indefinite(_))
        ));
    }

    #[test]
    fn iteration_cap_reports_history() {
        let a = laplacian_1d(200);
        let b = DVector::from_element(200, 1.0);
        match pcg(&a, &b, 1e-14, 3) {
            Err(VemError::NotConverged {
                iterations,
                history,
                ..
            }) => {
                assert_eq!(iterations, 3);
                assert_eq!(history.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
