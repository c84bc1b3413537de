use feec_ns::assembly::{BoundaryConditionSpec, BoundarySetup, FlowCondition, VorticityCondition};
use feec_ns::experiments::box_mesh;
use feec_ns::fe_spaces::{interpolate_vector, Discretization};
use feec_ns::fields::{constant_vector, vector_field, zero_vector, Vec3};
use feec_ns::solver::{initialize_state, run_transient, solve_stokes, step, SolverConfig};

fn swirl() -> feec_ns::fields::VectorField {
    vector_field(|x, _| Vec3::new(-(x.y - 0.5), x.x - 0.5, (x.x * x.y).sin()))
}

#[test]
fn long_step_from_rest_is_a_stokes_solve() {
    let d = Discretization::new(box_mesh(2, 0.0, 1.0).unwrap()).unwrap();
    let setup = BoundarySetup::new(&d, &BoundaryConditionSpec::homogeneous_essential()).unwrap();
    let rest = initialize_state(&d, &setup, &zero_vector(), 0.0).unwrap();
    let cfg = SolverConfig {
        dt: 1e12,
        ..Default::default()
    };
    let (next, diag) = step(&d, &setup, &cfg, &rest, &swirl()).unwrap();
    let stokes = solve_stokes(&d, &setup, cfg.nu, &swirl(), None).unwrap();
    let rel = |a: &[f64], b: &[f64]| {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let den: f64 = b.iter().map(|y| y * y).sum();
        (num / den).sqrt()
    };
    assert!(rel(&next.u.values, &stokes.u.values) < 1e-9);
    assert!(rel(&next.omega.values, &stokes.omega.values) < 1e-9);
    assert!(rel(&next.p.values, &stokes.p.values) < 1e-9);
    assert!(diag.residual <= 1e-10);
    assert!(diag.harmonic_pairing < 1e-12);
}

#[test]
fn initial_vorticity_solves_the_weak_curl_equation() {
    let axis = Vec3::new(0.3, -0.2, 1.0);
    let u0 = vector_field(move |x, _| axis.cross(x));
    let bc = BoundaryConditionSpec::uniform(
        VorticityCondition::Essential(constant_vector(2.0 * axis)),
        FlowCondition::Essential(u0.clone()),
    );
    let d = Discretization::new(box_mesh(3, 0.0, 1.0).unwrap()).unwrap();
    let setup = BoundarySetup::new(&d, &bc).unwrap();
    let state = initialize_state(&d, &setup, &u0, 0.0).unwrap();
    let interp = interpolate_vector(&d.v2, &u0, &d.mesh, 0.0).unwrap();
    assert!(state
        .u
        .values
        .iter()
        .zip(&interp.values)
        .all(|(a, b)| (a - b).abs() < 1e-14));
    assert!(state.p.values.iter().all(|v| *v == 0.0));

    let fixed: Vec<(usize, f64)> = setup.partition.vorticity_values(&setup.bc, &d.mesh, 0.0);
    assert!(!fixed.is_empty());
    for &(e, v) in &fixed {
        assert!((state.omega.values[e] - v).abs() < 1e-14);
    }
    let lhs = d.m1.mul_vec(&state.omega.values);
    let rhs = d.d1.transpose().mul_vec(&d.m2.mul_vec(&state.u.values));
    let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for e in 0..d.v1.ndof {
        if fixed.iter().all(|&(k, _)| k != e) {
            assert!((lhs[e] - rhs[e]).abs() <= 1e-12 * scale, "edge {e}");
        }
    }
}

#[test]
fn observer_sees_every_step() {
    let d = Discretization::new(box_mesh(2, 0.0, 1.0).unwrap()).unwrap();
    let setup = BoundarySetup::new(&d, &BoundaryConditionSpec::homogeneous_essential()).unwrap();
    let init = initialize_state(&d, &setup, &zero_vector(), 0.0).unwrap();
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.05,
        ..Default::default()
    };
    let mut seen = Vec::new();
    run_transient(&d, &setup, &cfg, &swirl(), init, |r, s| {
        assert!(r.residual <= 1e-10);
        assert!(r.max_divergence <= 1e-12);
        assert_eq!(r.t, s.t);
        seen.push(r.step);
    })
    .unwrap();
    assert_eq!(seen, vec![1, 2, 3, 4, 5]);
}
