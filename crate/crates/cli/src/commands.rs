use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use ncvem_core::analysis::{
    error_norms, run_convergence, run_patch_test, solve_manufactured, ConvergenceOptions,
    ManufacturedProblem, Polynomial, RateCheck,
};
use ncvem_core::assembly::SolutionFile;
use ncvem_core::element::dump_element;
use ncvem_core::mesh::{check_regularity, generate_mesh, read_mesh, write_mesh};
use ncvem_core::mfd::check_equivalence;
use ncvem_core::{Mesh, MeshKind, StabilizationChoice};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::error::{CliError, CliResult};

/// Options shared by every subcommand.
pub struct Context {
    pub json: bool,
    pub seed: u64,
    pub timing: bool,
    pub allow_high_order: bool,
}

impl Context {
    fn check_order(&self, k: usize, dimension: usize) -> CliResult<()> {
        if k == 0 {
            return Err(CliError::Usage("order must be ≥ 1".into()));
        }
        let cap = if dimension == 3 { 3 } else { 4 };
        if k > cap && !self.allow_high_order {
            return Err(CliError::Usage(format!(
                "order {k} exceeds the default cap {cap} for {dimension}D meshes (pass --allow-high-order to override)"
            )));
        }
        Ok(())
    }

    fn load_mesh(&self, src: &MeshSource) -> CliResult<Mesh> {
        match (&src.mesh, &src.kind) {
            (Some(path), _) => Ok(read_mesh(path)?),
            (None, Some(kind)) => Ok(generate_mesh(kind.parse()?, src.res, self.seed)?),
            (None, None) => Err(CliError::Usage(
                "either --mesh FILE or --kind KIND is required".into(),
            )),
        }
    }

    /// Prints `value` as JSON, or `text` when JSON output is off.
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> CliResult<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            println!("{}", text());
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn run(ctx: &Context, command: Command) -> CliResult<()> {
    match command {
        Command::Mesh(MeshCommand::Gen { kind, res, out }) => mesh_gen(ctx, &kind, res, &out),
        Command::Mesh(MeshCommand::Check { input, rho }) => mesh_check(ctx, &input, rho),
        Command::Solve(a) => solve(ctx, a),
        Command::Converge(a) => converge(ctx, a),
        Command::PatchTest(a) => patch_test(ctx, a),
        Command::MfdCheck(a) => mfd_check(ctx, a),
        Command::ElementDump(a) => element_dump(ctx, a),
    }
}

fn mesh_summary(mesh: &Mesh) -> serde_json::Value {
    json!({
        "dimension": mesh.dimension(),
        "vertices": mesh.num_vertices(),
        "faces": mesh.num_faces(),
        "cells": mesh.num_cells(),
        "h_max": mesh.h_max(),
    })
}

fn mesh_gen(ctx: &Context, kind: &str, res: usize, out: &Path) -> CliResult<()> {
    let kind: MeshKind = kind.parse()?;
    let mesh = generate_mesh(kind, res, ctx.seed)?;
    write_mesh(&mesh, out)?;
    let summary = mesh_summary(&mesh);
    ctx.emit(&summary, || {
        format!(
            "{kind} mesh with {} cells and {} faces written to {}",
            mesh.num_cells(),
            mesh.num_faces(),
            out.display()
        )
    })
}

fn mesh_check(ctx: &Context, input: &Path, rho: f64) -> CliResult<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(CliError::Usage(format!(
            "--rho must lie in (0, 1], got {rho}"
        )));
    }
    let mesh = read_mesh(input)?;
    let report = check_regularity(&mesh, rho);
    ctx.emit(&report, || {
        let worst = report
            .cells
            .iter()
            .map(|c| c.min_face_ratio)
            .fold(f64::INFINITY, f64::min);
        format!(
            "{} cells, h = {:.4e}, smallest face ratio {worst:.4}, {} failing: {}",
            mesh.num_cells(),
            report.h,
            report.failing_cells.len(),
            if report.pass {
                "regular"
            } else {
                "NOT regular"
            }
        )
    })?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{} cells violate the regularity threshold {rho}",
            report.failing_cells.len()
        )))
    }
}

fn solve(ctx: &Context, a: SolveArgs) -> CliResult<()> {
    let mesh = ctx.load_mesh(&a.source)?;
    ctx.check_order(a.k, mesh.dimension())?;
    let problem = ManufacturedProblem::by_name(&a.problem)?;
    let stab: StabilizationChoice = a.stab.parse()?;
    let (assembled, solution) = solve_manufactured(&mesh, a.k, &problem, &stab, a.solver.into())?;
    let norms = error_norms(&mesh, &assembled, &solution.values, &problem)?;
    if let Some(out) = &a.out {
        let file = SolutionFile::new(
            mesh.dimension(),
            stab.name(),
            &assembled.dofmap,
            &solution,
            &assembled.elements,
            &mesh,
        );
        write_file(out, &serde_json::to_string_pretty(&file)?)?;
        info!("solution written to {}", out.display());
    }
    let summary = json!({
        "problem": problem.name,
        "order": a.k,
        "stabilization": stab.name(),
        "mesh": mesh_summary(&mesh),
        "dofs": assembled.dofmap.len(),
        "free_dofs": solution.free,
        "solver": {
            "method": solution.stats.method,
            "iterations": solution.stats.iterations,
            "relative_residual": solution.stats.residual,
        },
        "energy_error": norms.energy,
        "l2_error": norms.l2,
    });
    ctx.emit(&summary, || {
        format!(
            "{} DoFs ({} free), solver {} ({} iterations), energy error {:.6e}, L2 error {:.6e}",
            assembled.dofmap.len(),
            solution.free,
            solution.stats.method,
            solution.stats.iterations,
            norms.energy,
            norms.l2
        )
    })
}

fn companion_json(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn converge(ctx: &Context, a: ConvergeArgs) -> CliResult<()> {
    let kind: MeshKind = a.kind.parse()?;
    ctx.check_order(a.k, kind.dimension())?;
    if a.res.contains(&0) {
        return Err(CliError::Usage("resolutions must be positive".into()));
    }
    if a.res.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage(
            "resolutions must be strictly increasing".into(),
        ));
    }
    let problem = ManufacturedProblem::by_name(&a.problem)?;
    let defaults = RateCheck::default();
    let opts = ConvergenceOptions {
        kind,
        order: a.k,
        resolutions: a.res,
        seed: ctx.seed,
        stabilization: a.stab.parse()?,
        solver: a.solver.into(),
        timing: ctx.timing,
        check: RateCheck {
            energy_tolerance: a.energy_tol.unwrap_or(defaults.energy_tolerance),
            l2_tolerance: a.l2_tol.unwrap_or(defaults.l2_tolerance),
        },
    };
    let report = run_convergence(&problem, &opts)?;
    let report_json = serde_json::to_string_pretty(&report)?;
    if let Some(out) = &a.out {
        write_file(out, &report.to_csv())?;
        write_file(&companion_json(out), &report_json)?;
    }
    if ctx.json {
        println!("{report_json}");
    } else {
        if a.out.is_none() {
            print!("{}", report.to_csv());
        }
        let fmt = |r: Option<f64>| r.map_or("n/a".to_string(), |r| format!("{r:.3}"));
        let verdict = |p: Option<bool>| match p {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "informational",
        };
        println!(
            "energy rate {} (expected {:.3}, {}), L2 rate {} (expected {:.3}, {})",
            fmt(report.energy_rate),
            report.expected_energy_rate,
            verdict(report.energy_pass),
            fmt(report.l2_rate),
            report.expected_l2_rate,
            verdict(report.l2_pass)
        );
    }
    match &report.failure {
        Some(msg) => Err(CliError::CheckFailed(format!(
            "convergence study aborted at {msg}"
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct PatchEntry {
    exponents: Vec<u32>,
    max_dof_error: f64,
    scaled_error: f64,
    energy_error: f64,
    l2_error: f64,
}

fn patch_test(ctx: &Context, a: PatchTestArgs) -> CliResult<()> {
    let mesh = ctx.load_mesh(&a.source)?;
    let dim = mesh.dimension();
    ctx.check_order(a.k, dim)?;
    let stab: StabilizationChoice = a.stab.parse()?;
    let mut entries = Vec::new();
    for p in Polynomial::monomial_basis(dim, a.k) {
        let r = run_patch_test(&mesh, a.k, &p, &stab)?;
        entries.push(PatchEntry {
            exponents: p.terms[0].1[..dim].to_vec(),
            max_dof_error: r.max_dof_error,
            scaled_error: r.scaled_error(),
            energy_error: r.energy_error,
            l2_error: r.l2_error,
        });
    }
    let worst = entries.iter().map(|e| e.scaled_error).fold(0.0, f64::max);
    let pass = worst <= a.tol;
    let out = json!({ "order": a.k, "tolerance": a.tol, "max_scaled_error": worst, "pass": pass, "polynomials": entries });
    ctx.emit(&out, || {
        let mut s = String::new();
        for e in &entries {
            s += &format!(
                "x^{:?}: max DoF error {:.3e} (scaled {:.3e})\n",
                e.exponents, e.max_dof_error, e.scaled_error
            );
        }
        s + &format!(
            "worst scaled error {worst:.3e}: {}",
            if pass { "pass" } else { "FAIL" }
        )
    })?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "patch test error {worst:.3e} exceeds {:.1e}",
            a.tol
        )))
    }
}

fn mfd_check(ctx: &Context, a: MfdCheckArgs) -> CliResult<()> {
    let mesh = ctx.load_mesh(&a.source)?;
    let orders: Vec<usize> = match a.k {
        Some(k) => {
            ctx.check_order(k, mesh.dimension())?;
            vec![k]
        }
        None => (1..=if mesh.dimension() == 3 { 3 } else { 4 }).collect(),
    };
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let report = check_equivalence(&mesh, &orders, a.trials, ctx.seed)?;
    if let Some(out) = &a.out {
        write_file(out, &serde_json::to_string_pretty(&report)?)?;
    }
    let pass = report.max() <= a.tol;
    let summary = json!({
        "trials": report.trials.len(),
        "orders": orders,
        "max_part_i": report.max_part_i,
        "max_part_ii": report.max_part_ii,
        "max_rel1": report.max_rel1,
        "tolerance": a.tol,
        "pass": pass,
    });
    // The residual report is JSON in both modes.
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "equivalence residual {:.3e} exceeds {:.1e}",
            report.max(),
            a.tol
        )))
    }
}

fn element_dump(ctx: &Context, a: ElementDumpArgs) -> CliResult<()> {
    let mesh = ctx.load_mesh(&a.source)?;
    ctx.check_order(a.k, mesh.dimension())?;
    if a.cell >= mesh.num_cells() {
        return Err(CliError::Usage(format!(
            "cell {} out of range (mesh has {} cells)",
            a.cell,
            mesh.num_cells()
        )));
    }
    let dump = dump_element(&mesh, a.cell, a.k, &a.stab.parse()?)?;
    let text = serde_json::to_string_pretty(&dump)?;
    match &a.out {
        Some(out) => write_file(out, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
