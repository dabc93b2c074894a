use std::fmt::Write as _;
use std::time::Instant;

use log::info;
use serde::Serialize;

use super::{error_norms, solve_manufactured, ManufacturedProblem};
use crate::assembly::SolverChoice;
use crate::element::StabilizationChoice;
use crate::error::{Result, VemError};
use crate::mesh::{generate_mesh, MeshKind};

/// Number of finest levels used in the rate fit.
pub const FIT_POINTS: usize = 3;

#[derive(Debug, Clone)]
pub struct ConvergenceOptions {
    pub kind: MeshKind,
    pub order: usize,
    pub resolutions: Vec<usize>,
    pub seed: u64,
    pub stabilization: StabilizationChoice,
    pub solver: SolverChoice,
    /// Record wall-clock times; disable for byte-reproducible output.
    pub timing: bool,
    pub check: RateCheck,
}

/// Allowed deviation of fitted rates from the expected ones.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateCheck {
    pub energy_tolerance: f64,
    pub l2_tolerance: f64,
}

impl Default for RateCheck {
    fn default() -> Self {
        RateCheck {
            energy_tolerance: 0.15,
            l2_tolerance: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceLevel {
    pub resolution: usize,
    /// Mean cell diameter.
    pub h: f64,
    pub dofs: usize,
    pub energy_error: f64,
    pub l2_error: f64,
    /// Energy error over the best cellwise polynomial gradient approximation.
    pub galerkin_ratio: f64,
    pub cg_iters: usize,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub problem: String,
    pub kind: String,
    pub order: usize,
    pub stabilization: String,
    pub levels: Vec<ConvergenceLevel>,
    pub energy_rate: Option<f64>,
    pub l2_rate: Option<f64>,
    pub expected_energy_rate: f64,
    pub expected_l2_rate: f64,
    pub check: RateCheck,
    /// `None` when the problem is informational or the run failed.
    pub energy_pass: Option<bool>,
    pub l2_pass: Option<bool>,
    pub monotone: bool,
    pub failure: Option<String>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.energy_pass != Some(false) && self.l2_pass != Some(false)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,dofs,energy_error,l2_error,cg_iters,wall_ms\n");
        for l in &self.levels {
            let _ = writeln!(
                s,
                "{:e},{},{:e},{:e},{},{}",
                l.h, l.dofs, l.energy_error, l.l2_error, l.cg_iters, l.wall_ms
            );
        }
        s
    }
}

/// Least-squares slope of `log(err)` against `log(h)` over the last
/// [`FIT_POINTS`] entries.
pub fn fit_rate(h: &[f64], err: &[f64]) -> Option<f64> {
    let n = h.len().min(err.len());
    if n < 2 {
        return None;
    }
    let start = n.saturating_sub(FIT_POINTS);
    let pts: Vec<(f64, f64)> = (start..n).map(|i| (h[i].ln(), err[i].ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let r = sxy / sxx;
    r.is_finite().then_some(r)
}

/// Runs the full pipeline on each resolution and fits rates. A numerical
/// failure stops the study and is recorded in the returned partial report.
pub fn run_convergence(
    problem: &ManufacturedProblem,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport> {
    if opts.resolutions.len() < FIT_POINTS {
        return Err(VemError::InvalidInput(format!(
            "at least {FIT_POINTS} resolutions are needed, got {}",
            opts.resolutions.len()
        )));
    }
    if opts.kind.dimension() != problem.dimension {
        return Err(VemError::InvalidInput(format!(
            "problem '{}' is {}D but mesh kind {} is {}D",
            problem.name,
            problem.dimension,
            opts.kind,
            opts.kind.dimension()
        )));
    }
    let mut levels = Vec::new();
    let mut failure = None;
    for &res in &opts.resolutions {
        let start = Instant::now();
        let outcome = (|| {
            let mesh = generate_mesh(opts.kind, res, opts.seed)?;
            let (assembled, solution) =
                solve_manufactured(&mesh, opts.order, problem, &opts.stabilization, opts.solver)?;
            let norms = error_norms(&mesh, &assembled, &solution.values, problem)?;
            Ok::<_, VemError>((
                mesh.h_mean(),
                assembled.dofmap.len(),
                norms,
                solution.stats.iterations,
            ))
        })();
        match outcome {
            Ok((h, dofs, norms, iters)) => {
                let wall_ms = if opts.timing {
                    start.elapsed().as_millis() as u64
                } else {
                    0
                };
                info!(
                    "{} k={} res={res}: h={h:.4e} dofs={dofs} energy={:.4e} l2={:.4e}",
                    opts.kind, opts.order, norms.energy, norms.l2
                );
                levels.push(ConvergenceLevel {
                    resolution: res,
                    h,
                    dofs,
                    energy_error: norms.energy,
                    l2_error: norms.l2,
                    galerkin_ratio: if norms.best_energy > 0.0 {
                        norms.energy / norms.best_energy
                    } else {
                        1.0
                    },
                    cg_iters: iters,
                    wall_ms,
                });
            }
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => {
                failure = Some(format!("resolution {res}: {e}"));
                break;
            }
        }
    }
    let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let complete = failure.is_none();
    let energy_rate = fit_rate(
        &hs,
        &levels.iter().map(|l| l.energy_error).collect::<Vec<_>>(),
    )
    .filter(|_| complete);
    let l2_rate =
        fit_rate(&hs, &levels.iter().map(|l| l.l2_error).collect::<Vec<_>>()).filter(|_| complete);
    let (expected_energy_rate, expected_l2_rate) = problem.expected_rates(opts.order);
    let judge = |rate: Option<f64>, expected: f64, tol: f64| {
        if problem.informational {
            None
        } else {
            rate.map(|r| (r - expected).abs() <= tol)
        }
    };
    let monotone = levels
        .windows(2)
        .all(|w| w[1].energy_error < w[0].energy_error && w[1].l2_error < w[0].l2_error);
    Ok(ConvergenceReport {
        problem: problem.name.clone(),
        kind: opts.kind.to_string(),
        order: opts.order,
        stabilization: opts.stabilization.name().to_string(),
        energy_pass: judge(
            energy_rate,
            expected_energy_rate,
            opts.check.energy_tolerance,
        ),
        l2_pass: judge(l2_rate, expected_l2_rate, opts.check.l2_tolerance),
        levels,
        energy_rate,
        l2_rate,
        expected_energy_rate,
        expected_l2_rate,
        check: opts.check,
        monotone,
        failure,
    })
}
