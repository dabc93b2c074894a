//! Acceptance suite: one line per criterion. Failing criteria are reported,
//! not hidden; set `NCVEM_ACCEPTANCE_STRICT=1` to turn any failure into a
//! non-zero exit.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ncvem_core::analysis::{
    run_convergence, run_patch_test, ConvergenceOptions, ManufacturedProblem, Polynomial, RateCheck,
};
use ncvem_core::assembly::{build_dof_map, SolverChoice};
use ncvem_core::mesh::generate_mesh;
use ncvem_core::mfd::check_equivalence;
use ncvem_core::{LocalElement, MeshKind, StabilizationChoice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn local_count(dim: usize, n: usize, k: usize) -> usize {
    if dim == 2 {
        n * k + k * (k - 1) / 2
    } else {
        n * k * (k + 1) / 2 + (k - 1) * k * (k + 1) / 6
    }
}

fn global_count(dim: usize, faces: usize, cells: usize, k: usize) -> usize {
    if dim == 2 {
        faces * k + cells * (k - 1) * k / 2
    } else {
        faces * k * (k + 1) / 2 + cells * (k - 1) * k * (k + 1) / 6
    }
}

fn max_order(dim: usize) -> usize {
    if dim == 3 {
        3
    } else {
        4
    }
}

fn dof_counts() -> Outcome {
    // (kind, faces per sampled cell, orders)
    let cases = [
        (MeshKind::TriStructured, 3, 4),
        (MeshKind::QuadStructured, 4, 4),
        (MeshKind::HexagonDominant, 6, 4),
        (MeshKind::TetStructured, 4, 3),
        (MeshKind::CubeStructured, 6, 3),
    ];
    let mut checked = 0;
    let mut bad = Vec::new();
    for (kind, n, kmax) in cases {
        let mesh = generate_mesh(kind, 3, 0).expect("mesh");
        let dim = kind.dimension();
        let cell = (0..mesh.num_cells())
            .find(|&c| mesh.cells()[c].num_faces() == n)
            .expect("cell with the requested face count");
        for k in 1..=kmax {
            let el = LocalElement::new(&mesh, cell, k, &StabilizationChoice::VemIdentity)
                .expect("element");
            let map = build_dof_map(&mesh, k).expect("dof map");
            checked += 2;
            if el.layout.len() != local_count(dim, n, k) {
                bad.push(format!("{kind} k={k} local {}", el.layout.len()));
            }
            if map.len() != global_count(dim, mesh.num_faces(), mesh.num_cells(), k) {
                bad.push(format!("{kind} k={k} global {}", map.len()));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{checked} local/global counts match")
        } else {
            format!("mismatches: {}", bad.join("; "))
        },
    }
}

fn cell_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut failures = Vec::new();
    for trial in 0..500 {
        let kind = MeshKind::ALL[rng.gen_range(0..MeshKind::ALL.len())];
        let dim = kind.dimension();
        let res = rng.gen_range(1..=if dim == 3 { 3 } else { 5 });
        let seed: u64 = rng.gen();
        let k = rng.gen_range(1..=max_order(dim));
        let stab = if rng.gen_bool(0.5) {
            StabilizationChoice::VemIdentity
        } else {
            StabilizationChoice::MfdTrace
        };
        let mesh = generate_mesh(kind, res, seed).expect("mesh");
        let cell = rng.gen_range(0..mesh.num_cells());
        match LocalElement::new(&mesh, cell, k, &stab) {
            Ok(el) => {
                let r = el.residuals();
                worst = worst.max(r.max());
                min_gap = min_gap.min(r.second_eigenvalue);
                if r.max() > 1e-11 || r.second_eigenvalue <= 1e-11 {
                    failures.push(format!("#{trial} {kind} k={k} {}: {r:?}", stab.name()));
                }
            }
            Err(e) => failures.push(format!("#{trial} {kind} k={k}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "500 cells, worst residual {worst:.2e}, smallest relative λ2 {min_gap:.2e}{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", failures.join(" | "))
            }
        ),
    }
}

fn patch_tests() -> Outcome {
    let cases = [
        (MeshKind::QuadDistorted, 4, 4),
        (MeshKind::HexagonDominant, 4, 4),
        (MeshKind::Voronoi2d, 4, 4),
        (MeshKind::CubeStructured, 3, 2),
        (MeshKind::TetStructured, 2, 2),
    ];
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    let mut failures = Vec::new();
    for (kind, res, kmax) in cases {
        let mesh = generate_mesh(kind, res, 7).expect("mesh");
        for k in 1..=kmax {
            for p in Polynomial::monomial_basis(kind.dimension(), k) {
                runs += 1;
                match run_patch_test(&mesh, k, &p, &StabilizationChoice::VemIdentity) {
                    Ok(r) => {
                        worst = worst.max(r.scaled_error());
                        if r.scaled_error() > 1e-9 {
                            failures.push(format!(
                                "{kind} k={k} {:?}: {:.2e}",
                                p.terms[0].1,
                                r.scaled_error()
                            ));
                        }
                    }
                    Err(e) => failures.push(format!("{kind} k={k}: {e}")),
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{runs} polynomial solves, worst scaled DoF error {worst:.2e}{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", failures.join(" | "))
            }
        ),
    }
}

fn options(
    kind: MeshKind,
    k: usize,
    resolutions: Vec<usize>,
    stab: StabilizationChoice,
    check: RateCheck,
) -> ConvergenceOptions {
    ConvergenceOptions {
        kind,
        order: k,
        resolutions,
        seed: 0,
        stabilization: stab,
        solver: SolverChoice::Auto,
        timing: false,
        check,
    }
}

struct RateRow {
    kind: MeshKind,
    k: usize,
    energy: f64,
    l2: f64,
    elapsed: Duration,
}

fn rate_rows(stab: StabilizationChoice) -> Vec<RateRow> {
    let problem = ManufacturedProblem::by_name("sin2d").expect("problem");
    let mut rows = Vec::new();
    for kind in [MeshKind::TriStructured, MeshKind::Voronoi2d] {
        for k in 1..=3 {
            let t = Instant::now();
            let r = run_convergence(
                &problem,
                &options(
                    kind,
                    k,
                    vec![4, 8, 16, 32],
                    stab.clone(),
                    RateCheck::default(),
                ),
            )
            .expect("convergence study");
            rows.push(RateRow {
                kind,
                k,
                energy: r.energy_rate.unwrap_or(f64::NAN),
                l2: r.l2_rate.unwrap_or(f64::NAN),
                elapsed: t.elapsed(),
            });
        }
    }
    rows
}

fn judge_rates(rows: &[RateRow], energy: bool) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for r in rows {
        let (rate, expected, tol) = if energy {
            (r.energy, r.k as f64, 0.15)
        } else {
            (r.l2, r.k as f64 + 1.0, 0.2)
        };
        let ok = (rate - expected).abs() <= tol && r.elapsed < Duration::from_secs(180);
        pass &= ok;
        parts.push(format!(
            "{} k={} {rate:.3}{}",
            r.kind,
            r.k,
            if ok { "" } else { " (FAIL)" }
        ));
    }
    let slowest = rows.iter().map(|r| r.elapsed).max().unwrap_or_default();
    Outcome {
        pass,
        detail: format!(
            "{}; slowest case {:.1}s",
            parts.join(", "),
            slowest.as_secs_f64()
        ),
    }
}

fn cube_rates() -> Outcome {
    let problem = ManufacturedProblem::by_name("sin3d").expect("problem");
    let t = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for k in 1..=2 {
        let check = RateCheck {
            energy_tolerance: 0.25,
            l2_tolerance: f64::INFINITY,
        };
        let r = run_convergence(
            &problem,
            &options(
                MeshKind::CubeStructured,
                k,
                vec![2, 4, 8],
                StabilizationChoice::VemIdentity,
                check,
            ),
        )
        .expect("convergence study");
        let rate = r.energy_rate.unwrap_or(f64::NAN);
        let ok = (rate - k as f64).abs() <= 0.25;
        pass &= ok;
        parts.push(format!(
            "k={k} energy {rate:.3}{}",
            if ok { "" } else { " (FAIL)" }
        ));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    Outcome {
        pass,
        detail: format!("{} in {:.1}s", parts.join(", "), elapsed.as_secs_f64()),
    }
}

fn mfd_equivalence() -> Outcome {
    let mut total = 0;
    let mut worst: f64 = 0.0;
    let (mut wi, mut wii, mut wr) = (0.0f64, 0.0f64, 0.0f64);
    let per_kind = 200 / MeshKind::ALL.len();
    for (i, kind) in MeshKind::ALL.into_iter().enumerate() {
        let trials = if i == 0 {
            200 - per_kind * (MeshKind::ALL.len() - 1)
        } else {
            per_kind
        };
        let mesh = generate_mesh(kind, 3, 11).expect("mesh");
        let orders: Vec<usize> = (1..=max_order(kind.dimension())).collect();
        let r =
            check_equivalence(&mesh, &orders, trials, 100 + i as u64).expect("equivalence check");
        total += r.trials.len();
        worst = worst.max(r.max());
        wi = wi.max(r.max_part_i);
        wii = wii.max(r.max_part_ii);
        wr = wr.max(r.max_rel1);
    }
    Outcome {
        pass: total == 200 && worst <= 1e-12,
        detail: format!("{total} triples, part (i) {wi:.2e}, part (ii) {wii:.2e}, projector identities {wr:.2e}"),
    }
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ncvem"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |tag: &str, threads: &str| -> Result<Vec<Vec<u8>>, String> {
        let p = |name: &str| {
            dir.path()
                .join(format!("{tag}-{name}"))
                .display()
                .to_string()
        };
        let common = ["--threads", threads, "--seed", "5", "--no-timing"];
        let csv = p("conv.csv");
        run_cli(
            &[
                &[
                    "converge",
                    "--problem",
                    "sin2d",
                    "--kind",
                    "voronoi-2d",
                    "--k",
                    "2",
                    "--res",
                    "4,8,16",
                    "--out",
                    &csv,
                ][..],
                &common,
            ]
            .concat(),
        )?;
        let sol = p("sol.json");
        run_cli(
            &[
                &[
                    "solve",
                    "--kind",
                    "voronoi-2d",
                    "--res",
                    "24",
                    "--k",
                    "3",
                    "--problem",
                    "sin2d",
                    "--out",
                    &sol,
                ][..],
                &common,
            ]
            .concat(),
        )?;
        let sol3 = p("sol3.json");
        run_cli(
            &[
                &[
                    "solve",
                    "--kind",
                    "tet-structured",
                    "--res",
                    "3",
                    "--k",
                    "2",
                    "--problem",
                    "sin3d",
                    "--stab",
                    "mfd-trace",
                    "--out",
                    &sol3,
                ][..],
                &common,
            ]
            .concat(),
        )?;
        let mfd = p("mfd.json");
        run_cli(
            &[
                &[
                    "mfd-check",
                    "--kind",
                    "hexagon-dominant",
                    "--res",
                    "3",
                    "--trials",
                    "40",
                    "--out",
                    &mfd,
                ][..],
                &common,
            ]
            .concat(),
        )?;
        let json = Path::new(&csv).with_extension("json");
        [
            Path::new(&csv),
            json.as_path(),
            Path::new(&sol),
            Path::new(&sol3),
            Path::new(&mfd),
        ]
        .iter()
        .map(|f| std::fs::read(f).map_err(|e| e.to_string()))
        .collect()
    };
    let threads = std::thread::available_parallelism()
        .map_or(4, |n| n.get().max(4))
        .to_string();
    let outcome = (|| {
        let a = run("one", "1")?;
        let b = run("many", &threads)?;
        let c = run("again", &threads)?;
        Ok::<_, String>((a, b, c))
    })();
    match outcome {
        Ok((a, b, c)) => {
            let same = a == b && b == c;
            Outcome {
                pass: same,
                detail: format!(
                    "{} files, 1 vs {threads} threads and a repeated run {}",
                    a.len(),
                    if same { "byte-identical" } else { "DIFFER" }
                ),
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: format!("CLI run failed: {e}"),
        },
    }
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {id} [{}] {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    };

    report(1, "dof counts", &mut || {
        let t = Instant::now();
        let mut o = dof_counts();
        o.pass &= t.elapsed() < Duration::from_secs(1);
        o
    });
    report(2, "projector and consistency identities", &mut || {
        let t = Instant::now();
        let mut o = cell_identities();
        o.pass &= t.elapsed() < Duration::from_secs(30);
        o
    });
    report(3, "patch tests", &mut || {
        let t = Instant::now();
        let mut o = patch_tests();
        o.pass &= t.elapsed() < Duration::from_secs(120);
        o
    });
    let rows = rate_rows(StabilizationChoice::VemIdentity);
    report(4, "energy rates k ± 0.15 (vem-identity)", &mut || {
        judge_rates(&rows, true)
    });
    report(5, "L2 rates (k+1) ± 0.2 (vem-identity)", &mut || {
        judge_rates(&rows, false)
    });
    let alt = rate_rows(StabilizationChoice::MfdTrace);
    let a = judge_rates(&alt, true);
    let b = judge_rates(&alt, false);
    println!("info: mfd-trace energy rates: {}", a.detail);
    println!("info: mfd-trace L2 rates: {}", b.detail);
    report(6, "3D energy rates k ± 0.25", &mut cube_rates);
    report(7, "stabilization equivalence", &mut || {
        let t = Instant::now();
        let mut o = mfd_equivalence();
        o.pass &= t.elapsed() < Duration::from_secs(30);
        o
    });
    report(8, "determinism", &mut determinism);

    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 && std::env::var("NCVEM_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
