use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncvem_bench::{fixture_mesh, smooth_problem};
use ncvem_core::analysis::solve_manufactured;
use ncvem_core::assembly::{apply_dirichlet, assemble, build_dof_map, solve, SolverChoice};
use ncvem_core::{LocalElement, MeshKind, StabilizationChoice};

fn local_element(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_element");
    let hex = fixture_mesh(MeshKind::HexagonDominant, 4);
    let cube = fixture_mesh(MeshKind::CubeStructured, 2);
    for k in 1..=4 {
        group.bench_with_input(BenchmarkId::new("hexagon", k), &k, |b, &k| {
            b.iter(|| LocalElement::new(&hex, 5, k, &StabilizationChoice::VemIdentity).unwrap())
        });
    }
    for k in 1..=3 {
        group.bench_with_input(BenchmarkId::new("cube", k), &k, |b, &k| {
            b.iter(|| LocalElement::new(&cube, 0, k, &StabilizationChoice::VemIdentity).unwrap())
        });
    }
    group.finish();
}

fn assembly_and_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("global");
    group.sample_size(10);
    let mesh = fixture_mesh(MeshKind::Voronoi2d, 16);
    let problem = smooth_problem(2);
    for k in [1, 3] {
        let map = build_dof_map(&mesh, k).unwrap();
        group.bench_with_input(BenchmarkId::new("assemble_voronoi16", k), &k, |b, _| {
            b.iter(|| {
                let constraints = apply_dirichlet(&mesh, &map, |x| problem.u(x)).unwrap();
                assemble(
                    &mesh,
                    &map,
                    &StabilizationChoice::VemIdentity,
                    |x| problem.forcing(x),
                    constraints,
                )
                .unwrap()
            })
        });
        let constraints = apply_dirichlet(&mesh, &map, |x| problem.u(x)).unwrap();
        let system = assemble(
            &mesh,
            &map,
            &StabilizationChoice::VemIdentity,
            |x| problem.forcing(x),
            constraints,
        )
        .unwrap()
        .system;
        for (name, choice) in [
            ("dense", SolverChoice::Dense),
            ("cg", SolverChoice::ConjugateGradient),
        ] {
            group.bench_with_input(
                BenchmarkId::new(format!("solve_{name}_voronoi16"), k),
                &k,
                |b, _| b.iter(|| solve(&system, choice).unwrap()),
            );
        }
    }
    let cubes = fixture_mesh(MeshKind::CubeStructured, 4);
    let p3 = smooth_problem(3);
    group.bench_function("pipeline_cube4_k2", |b| {
        b.iter(|| {
            solve_manufactured(
                &cubes,
                2,
                &p3,
                &StabilizationChoice::VemIdentity,
                SolverChoice::Auto,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, local_element, assembly_and_solve);
criterion_main!(benches);
