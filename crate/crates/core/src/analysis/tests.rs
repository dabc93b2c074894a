use super::*;
use crate::assembly::{build_dof_map, interpolate, Constraints};
use crate::mesh::{generate_mesh, MeshKind};

#[test]
fn zero_solution_has_zero_error() {
    let m = generate_mesh(MeshKind::QuadStructured, 3, 0).unwrap();
    let p = ManufacturedProblem::polynomial(Polynomial::new(2, vec![]));
    let (a, s) = solve_manufactured(
        &m,
        2,
        &p,
        &StabilizationChoice::VemIdentity,
        SolverChoice::Auto,
    )
    .unwrap();
    assert!(s.values.iter().all(|&v| v == 0.0));
    let n = error_norms(&m, &a, &s.values, &p).unwrap();
    assert_eq!(n.energy, 0.0);
    assert_eq!(n.l2, 0.0);
}

/// Interpolated polynomials of degree ≤ k have projected errors at round-off.
#[test]
fn interpolated_polynomials_have_no_error() {
    for (kind, k) in [(MeshKind::Voronoi2d, 3), (MeshKind::CubeStructured, 2)] {
        let m = generate_mesh(kind, 3, 4).unwrap();
        let map = build_dof_map(&m, k).unwrap();
        let dim = m.dimension();
        let poly = Polynomial::new(
            dim,
            vec![
                (1.0, [k as u32, 0, 0]),
                (-2.0, [0, 1, 0]),
                (0.5, [1, 0, (dim == 3) as u32]),
            ],
        );
        let problem = ManufacturedProblem::polynomial(poly.clone());
        let a = crate::assembly::assemble(
            &m,
            &map,
            &StabilizationChoice::VemIdentity,
            |_| 0.0,
            Constraints::new(),
        )
        .unwrap();
        let u = interpolate(&m, &map, 2 * k, |x| poly.eval(x)).unwrap();
        let n = error_norms(&m, &a, &u, &problem).unwrap();
        assert!(n.energy <= 1e-10 * n.grad_norm, "{kind}: {}", n.energy);
        assert!(n.l2 <= 1e-10 * n.u_norm, "{kind}: {}", n.l2);
    }
}

#[test]
fn patch_tests() {
    let stab = StabilizationChoice::VemIdentity;
    let m = generate_mesh(MeshKind::QuadDistorted, 4, 1).unwrap();
    let p = Polynomial::new(
        2,
        vec![(2.0, [1, 0, 0]), (3.0, [0, 1, 0]), (-1.0, [0, 0, 0])],
    );
    let r = run_patch_test(&m, 1, &p, &stab).unwrap();
    assert!(r.max_dof_error <= 1e-10, "{r:?}");

    for k in 1..=3 {
        let c = Polynomial::new(2, vec![(4.2, [0, 0, 0])]);
        let r = run_patch_test(&m, k, &c, &stab).unwrap();
        assert!(r.max_dof_error <= 1e-12, "{r:?}");
    }

    let hex = generate_mesh(MeshKind::HexagonDominant, 4, 0).unwrap();
    let q = Polynomial::new(2, vec![(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])]);
    let r = run_patch_test(&hex, 2, &q, &stab).unwrap();
    assert!(r.max_dof_error <= 1e-9, "{r:?}");
    assert!(run_patch_test(&hex, 1, &q, &stab).is_err());
}

#[test]
fn rate_fit_recovers_power_laws() {
    let h = [0.5, 0.25, 0.125, 0.0625];
    let e: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powf(2.5)).collect();
    assert!((fit_rate(&h, &e).unwrap() - 2.5).abs() < 1e-12);
    assert!(fit_rate(&h[..1], &e[..1]).is_none());
}

#[test]
fn sin2d_first_order_rates() {
    let problem = ManufacturedProblem::by_name("sin2d").unwrap();
    let opts = ConvergenceOptions {
        kind: MeshKind::TriStructured,
        order: 1,
        resolutions: vec![4, 8, 16],
        seed: 0,
        stabilization: StabilizationChoice::VemIdentity,
        solver: SolverChoice::Auto,
        timing: false,
        check: RateCheck::default(),
    };
    let r = run_convergence(&problem, &opts).unwrap();
    assert!(r.monotone);
    let e = r.energy_rate.unwrap();
    let l = r.l2_rate.unwrap();
    assert!((e - 1.0).abs() < 0.15, "energy rate {e}");
    assert!((l - 2.0).abs() < 0.2, "l2 rate {l}");
    let ratio = r.levels[1].energy_error / r.levels[2].energy_error;
    assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
    assert!(r
        .to_csv()
        .starts_with("h,dofs,energy_error,l2_error,cg_iters,wall_ms\n"));
    assert!(r.levels.iter().all(|l| l.wall_ms == 0));
}

#[test]
fn convergence_input_validation() {
    let problem = ManufacturedProblem::by_name("sin3d").unwrap();
    let mut opts = ConvergenceOptions {
        kind: MeshKind::TriStructured,
        order: 1,
        resolutions: vec![2, 4, 8],
        seed: 0,
        stabilization: StabilizationChoice::VemIdentity,
        solver: SolverChoice::Auto,
        timing: false,
        check: RateCheck::default(),
    };
    assert!(run_convergence(&problem, &opts).is_err());
    opts.kind = MeshKind::CubeStructured;
    opts.resolutions = vec![2, 4];
    assert!(run_convergence(&problem, &opts).is_err());
}
