//! Acceptance criteria. Each criterion prints one PASS/FAIL line, and the
//! process exits with status 1 if any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use feec_ns::assembly::{
    assemble_convection, build_harmonic_space, harmonic_dimension_by_rank, BoundaryConditionSpec,
    BoundarySetup,
};
use feec_ns::experiments::{
    box_mesh, exact_trace_conditions, open_top_conditions, run_dt_sweep, run_ethier, run_noflow,
    run_stokes_mms, ConfigEntries, ErrorColumn, ExperimentSpec,
};
use feec_ns::fe_spaces::{integer_composition_defect, interpolate_scalar, Discretization};
use feec_ns::fields::{
    scalar_field, vector_field, zero_vector, Ethier, ScalarField, Vec3, VectorField,
};
use feec_ns::linalg::{residual_statistics, RESIDUAL_TOLERANCE};
use feec_ns::mesh::{build_box_mesh, Point3, SimplicialMesh3};
use feec_ns::solver::{
    divergence_statistics, initialize_state, step, SolverConfig, DIVERGENCE_TOLERANCE,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(
    results: &mut Vec<bool>,
    id: usize,
    title: &str,
    limit: Duration,
    f: impl FnOnce() -> Outcome,
) {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = outcome.pass && in_time;
    println!(
        "criterion {id}: {} {title}: {} [{:.2?}{}]",
        if pass { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed,
        if in_time {
            String::new()
        } else {
            format!(", limit {limit:?}")
        }
    );
    results.push(pass);
}

fn spec(command: &str, text: &str) -> ExperimentSpec {
    ExperimentSpec::for_command(command, &ConfigEntries::parse(text).unwrap()).unwrap()
}

fn complex_property() -> Outcome {
    let mut worst = 0;
    let mut meshes = 0;
    for n in 1..=4 {
        for (nx, ny, nz) in [(n, n, n), (n, 1, 2), (1, n, 3)] {
            let lo = Point3::new(-0.3, 0.1, 0.0);
            let hi = Point3::new(1.7, 0.6, 2.5);
            let d = Discretization::new(build_box_mesh(nx, ny, nz, lo, hi).unwrap()).unwrap();
            worst = worst.max(integer_composition_defect(&d.d2, &d.d1).unwrap());
            meshes += 1;
        }
    }
    Outcome {
        pass: worst == 0,
        detail: format!("max |D2 D1| = {worst} over {meshes} meshes"),
    }
}

fn no_flow() -> Outcome {
    let report = run_noflow(&spec("noflow", "n = 2\ngamma = 1, 2, 4, 7")).unwrap();
    let worst = report.max_velocity();
    Outcome {
        pass: worst <= 1e-10 && report.rows.len() == 4,
        detail: format!("max |u_h|_M2 = {worst:.2e}"),
    }
}

/// Random polynomial of degree <= 4 and its gradient.
fn random_potential(seed: u64) -> (ScalarField, VectorField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for i in 0..=4usize {
        for j in 0..=(4 - i) {
            for k in 0..=(4 - i - j) {
                terms.push(([i, j, k], rng.random_range(-1.0..1.0)));
            }
        }
    }
    let pow = |x: f64, e: usize| if e == 0 { 1.0 } else { x.powi(e as i32) };
    let t2 = terms.clone();
    let s = scalar_field(move |x, _| {
        terms
            .iter()
            .map(|(e, c)| c * pow(x.x, e[0]) * pow(x.y, e[1]) * pow(x.z, e[2]))
            .sum()
    });
    let grad = vector_field(move |x, _| {
        let mut g = Vec3::zeros();
        for (e, c) in &t2 {
            let (px, py, pz) = (pow(x.x, e[0]), pow(x.y, e[1]), pow(x.z, e[2]));
            if e[0] > 0 {
                g.x += c * e[0] as f64 * pow(x.x, e[0] - 1) * py * pz;
            }
            if e[1] > 0 {
                g.y += c * e[1] as f64 * px * pow(x.y, e[1] - 1) * pz;
            }
            if e[2] > 0 {
                g.z += c * e[2] as f64 * px * py * pow(x.z, e[2] - 1);
            }
        }
        g
    });
    (s, grad)
}

fn gradient_invariance() -> Outcome {
    let d = Discretization::new(box_mesh(3, 0.0, 1.0).unwrap()).unwrap();
    let flow = Ethier::new(2.0, 1.0);
    let setup = BoundarySetup::new(&d, &exact_trace_conditions(flow.velocity_field())).unwrap();
    let (s, grad_s) = random_potential(7);
    let base_force = vector_field(|x, _| Vec3::new(x.y.sin(), x.z * x.x, -x.y));
    let g = grad_s.clone();
    let bf = base_force.clone();
    let perturbed = vector_field(move |x, t| bf(x, t) + g(x, t));
    let cfg = SolverConfig {
        dt: 1e-2,
        ..Default::default()
    };
    let mut a = initialize_state(&d, &setup, &flow.velocity_field(), 0.0).unwrap();
    let mut b = a.clone();
    let (mut dw, mut du, mut dp) = (0.0f64, 0.0f64, 0.0f64);
    let mut scale = 0.0f64;
    for _ in 0..10 {
        a = step(&d, &setup, &cfg, &a, &base_force).unwrap().0;
        b = step(&d, &setup, &cfg, &b, &perturbed).unwrap().0;
        let diff =
            |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p - q).collect() };
        dw = dw.max(
            d.m1.quadratic_form(&diff(&a.omega.values, &b.omega.values))
                .sqrt(),
        );
        du = du.max(d.m2.quadratic_form(&diff(&a.u.values, &b.u.values)).sqrt());
        scale = scale.max(1.0 + d.mass_norm(&a.u).max(d.mass_norm(&a.omega)));
        // expected pressure shift: cell integrals of s with the mean removed
        let cells = interpolate_scalar(&d.v3, &s, &d.mesh, &d.quad, b.t)
            .unwrap()
            .values;
        let mean = cells.iter().sum::<f64>() / d.mesh.total_volume();
        let expected: Vec<f64> = cells
            .iter()
            .zip(&d.mesh.tet_volumes)
            .map(|(c, v)| c - mean * v)
            .collect();
        let shift = diff(&b.p.values, &a.p.values);
        let mismatch = d.m3.quadratic_form(&diff(&shift, &expected)).sqrt();
        let size = d.m3.quadratic_form(&expected).sqrt();
        dp = dp.max(mismatch / size);
        assert!(size > 1e-3, "potential projects to a constant");
    }
    let pass = dw <= 1e-9 * scale && du <= 1e-9 * scale && dp <= 1e-9;
    Outcome {
        pass,
        detail: format!("10 steps: |dw|_M1 = {dw:.1e}, |du|_M2 = {du:.1e}, pressure shift vs projected s: {dp:.1e} (relative)"),
    }
}

fn convergence() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, text) in [
        ("steady d=0", "d = 0\nn = 2, 3, 4"),
        (
            "transient d=1",
            "d = 1\nn = 2, 3, 4\ndt = 1e-3\nt_end = 0.25",
        ),
    ] {
        let report = run_ethier(&spec("ethier", text)).unwrap();
        let slope = report.slope(ErrorColumn::HdivU).unwrap();
        let monotone = report.monotone(ErrorColumn::HdivU);
        pass &= (slope - 1.0).abs() <= 0.25 && monotone;
        let errs: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("{:.4}", r.err_hdiv_u))
            .collect();
        parts.push(format!(
            "{label}: slope {slope:.3}, errors [{}]{}",
            errs.join(", "),
            if monotone { "" } else { " not monotone" }
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn dt_boundedness() -> Outcome {
    let report = run_dt_sweep(&spec("dtsweep", "n = 2\ndt_list = 1e-1, 1e-2, 1e-3, 1e-4")).unwrap();
    let errs: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{:.4}", r.err_hdiv_u))
        .collect();
    let bound = report.bounds[0].bound.unwrap();
    Outcome {
        pass: report.bounded(),
        detail: format!("errors [{}], bound {bound:.4}", errs.join(", ")),
    }
}

/// Whitney bases written as `sum_k lambda_k c_k` with constant vectors `c_k`.
type Linear = [Vec3; 4];

fn bary_gradients(p: &[Point3; 4]) -> [Vec3; 4] {
    // rows of the inverse of [[1,1,1,1],[x],[y],[z]] give the barycentric gradients
    let mut a = Matrix4::zeros();
    for (j, v) in p.iter().enumerate() {
        a.set_column(j, &Vector4::new(1.0, v.x, v.y, v.z));
    }
    let inv = a.try_inverse().unwrap();
    std::array::from_fn(|i| Vec3::new(inv[(i, 1)], inv[(i, 2)], inv[(i, 3)]))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact integral of `lambda^alpha` over a tet of volume `vol`.
fn moment(alpha: [usize; 4], vol: f64) -> f64 {
    let s: usize = alpha.iter().sum();
    6.0 * vol * alpha.iter().map(|&a| factorial(a)).product::<f64>() / factorial(s + 3)
}

fn integrate_dot(a: &Linear, b: &Linear, vol: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mut al = [0; 4];
            al[i] += 1;
            al[j] += 1;
            s += a[i].dot(&b[j]) * moment(al, vol);
        }
    }
    s
}

/// `int (a x b) . c` for three linear fields.
fn integrate_triple(a: &Linear, b: &Linear, c: &Linear, vol: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let mut al = [0; 4];
                al[i] += 1;
                al[j] += 1;
                al[k] += 1;
                s += a[i].cross(&b[j]).dot(&c[k]) * moment(al, vol);
            }
        }
    }
    s
}

fn eval(l: &Linear, lam: [f64; 4]) -> Vec3 {
    (0..4).map(|k| lam[k] * l[k]).sum()
}

fn oracle_bases(p: &[Point3; 4]) -> (Vec<Linear>, Vec<Linear>) {
    let g = bary_gradients(p);
    let mut edges = Vec::new();
    for a in 0..4 {
        for b in (a + 1)..4 {
            let mut l = [Vec3::zeros(); 4];
            l[a] = g[b];
            l[b] = -g[a];
            // orient by circulation along b - a
            let mut mid = [0.0; 4];
            mid[a] = 0.5;
            mid[b] = 0.5;
            if eval(&l, mid).dot(&(p[b] - p[a])) < 0.0 {
                l.iter_mut().for_each(|v| *v = -*v);
            }
            edges.push(l);
        }
    }
    let mut faces = Vec::new();
    // face i is opposite vertex i, with its other vertices ascending
    for skip in 0..4 {
        let v: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
        let (a, b, c) = (v[0], v[1], v[2]);
        let mut l = [Vec3::zeros(); 4];
        l[a] = 2.0 * g[b].cross(&g[c]);
        l[b] = 2.0 * g[c].cross(&g[a]);
        l[c] = 2.0 * g[a].cross(&g[b]);
        let mut cen = [0.0; 4];
        for k in [a, b, c] {
            cen[k] = 1.0 / 3.0;
        }
        let area_normal = 0.5 * (p[b] - p[a]).cross(&(p[c] - p[a]));
        if eval(&l, cen).dot(&area_normal) < 0.0 {
            l.iter_mut().for_each(|x| *x = -*x);
        }
        faces.push(l);
    }
    (edges, faces)
}

fn single_tet_oracles() -> Outcome {
    let tets = [
        [
            Point3::zeros(),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ],
        [
            Point3::new(0.1, -0.2, 0.3),
            Point3::new(1.3, 0.1, 0.2),
            Point3::new(0.4, 0.9, -0.1),
            Point3::new(0.2, 0.3, 1.1),
        ],
    ];
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in tets {
        let mesh = SimplicialMesh3::from_tets(p.to_vec(), vec![[0, 1, 2, 3]]).unwrap();
        let d = Discretization::new(mesh).unwrap();
        let vol = d.mesh.tet_volumes[0];
        let (edges, faces) = oracle_bases(&p);
        // the single-tet mesh keeps vertex order, so local and global numbering agree
        assert_eq!(d.mesh.edges.len(), 6);
        let edge_index: Vec<usize> = d
            .mesh
            .edges
            .iter()
            .map(|&[a, b]| {
                [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
                    .iter()
                    .position(|&e| e == (a, b))
                    .unwrap()
            })
            .collect();
        let face_index: Vec<usize> = d
            .mesh
            .faces
            .iter()
            .map(|f| (0..4).find(|k| !f.contains(k)).unwrap())
            .collect();
        let mut err = |x: f64, y: f64| worst = worst.max((x - y).abs() / (1.0 + y.abs()));
        for i in 0..6 {
            for j in 0..6 {
                err(
                    d.m1.get(i, j),
                    integrate_dot(&edges[edge_index[i]], &edges[edge_index[j]], vol),
                );
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                err(
                    d.m2.get(i, j),
                    integrate_dot(&faces[face_index[i]], &faces[face_index[j]], vol),
                );
            }
        }
        err(d.m3.get(0, 0), 1.0 / vol);
        let theta = 0.37;
        let wc: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let uc: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut wl = [Vec3::zeros(); 4];
        let mut ul = [Vec3::zeros(); 4];
        for k in 0..4 {
            wl[k] = (0..6).map(|e| wc[e] * edges[edge_index[e]][k]).sum();
            ul[k] = (0..4).map(|f| uc[f] * faces[face_index[f]][k]).sum();
        }
        let omega = d.v1.coefficients(wc.clone()).unwrap();
        let u = d.v2.coefficients(uc.clone()).unwrap();
        let (a3, a5) = assemble_convection(&d.mesh, &omega, &u, theta, &d.quad).unwrap();
        for i in 0..4 {
            for j in 0..6 {
                err(
                    a3.get(i, j),
                    theta
                        * integrate_triple(&edges[edge_index[j]], &ul, &faces[face_index[i]], vol),
                );
            }
            for j in 0..4 {
                err(
                    a5.get(i, j),
                    (1.0 - theta)
                        * integrate_triple(&wl, &faces[face_index[j]], &faces[face_index[i]], vol),
                );
            }
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max entry mismatch {worst:.1e} (M1, M2, M3, A3, A5 on two tets)"),
    }
}

fn cohomology() -> Outcome {
    let d = Discretization::new(box_mesh(2, 0.0, 1.0).unwrap()).unwrap();
    let natural = open_top_conditions();
    let essential = BoundaryConditionSpec::homogeneous_essential();
    let hn = build_harmonic_space(&d, &natural).unwrap();
    let he = build_harmonic_space(&d, &essential).unwrap();
    let rank_n = harmonic_dimension_by_rank(&d, &natural).unwrap();
    let rank_e = harmonic_dimension_by_rank(&d, &essential).unwrap();
    let mut shape = f64::INFINITY;
    if he.dim() == 1 {
        let ratios: Vec<f64> = he.basis[0]
            .iter()
            .zip(&d.mesh.tet_volumes)
            .map(|(c, v)| c / v)
            .collect();
        let r0 = ratios[0];
        shape = ratios.iter().map(|r| (r - r0).abs()).fold(0.0, f64::max) / r0.abs();
    }
    let pass = hn.dim() == 0 && rank_n == 0 && he.dim() == 1 && rank_e == 1 && shape < 1e-13;
    Outcome {
        pass,
        detail: format!(
            "natural pressure: dim {} (rank {rank_n}); essential u.n: dim {} (rank {rank_e}), basis/|T| spread {shape:.1e}",
            hn.dim(),
            he.dim()
        ),
    }
}

fn main() {
    let mut results = Vec::new();
    check(
        &mut results,
        1,
        "D2 D1 = 0 in integer arithmetic, n <= 4",
        Duration::from_secs(1),
        complex_property,
    );
    check(
        &mut results,
        3,
        "no-flow velocity vanishes for gamma in {1,2,4,7}",
        Duration::from_secs(60),
        no_flow,
    );
    check(
        &mut results,
        4,
        "gradient invariance over a 10-step run",
        Duration::from_secs(120),
        gradient_invariance,
    );
    check(
        &mut results,
        5,
        "Ethier H(div) slope 1.0 +- 0.25, monotone",
        Duration::from_secs(1200),
        convergence,
    );
    check(
        &mut results,
        6,
        "time-step boundedness",
        Duration::from_secs(300),
        dt_boundedness,
    );
    check(
        &mut results,
        7,
        "single-tet mass and convection oracles to 1e-12",
        Duration::from_secs(60),
        single_tet_oracles,
    );
    check(
        &mut results,
        8,
        "harmonic 3-form dimensions on the n=2 box",
        Duration::from_secs(30),
        cohomology,
    );
    // more solve paths for the global statistics below
    let mms = run_stokes_mms(&spec("stokes-mms", "n = 2, 3")).unwrap();
    let d = Discretization::new(box_mesh(2, 0.0, 1.0).unwrap()).unwrap();
    let setup = BoundarySetup::new(&d, &BoundaryConditionSpec::homogeneous_essential()).unwrap();
    let swirl = vector_field(|x, _| Vec3::new(-(x.y - 0.5), x.x - 0.5, 0.3));
    let cfg = SolverConfig {
        dt: 0.05,
        ..Default::default()
    };
    let mut state = initialize_state(&d, &setup, &zero_vector(), 0.0).unwrap();
    for _ in 0..5 {
        state = step(&d, &setup, &cfg, &state, &swirl).unwrap().0;
    }
    let (div, div_count) = divergence_statistics();
    check(
        &mut results,
        2,
        "pointwise divergence over every source-free solve",
        Duration::from_secs(1),
        || Outcome {
            pass: div <= DIVERGENCE_TOLERANCE
                && div_count > 0
                && mms.max_divergence() <= DIVERGENCE_TOLERANCE * 1e3,
            detail: format!("max |D2 u|_T/|T| / (1 + |u|) = {div:.1e} over {div_count} solves"),
        },
    );
    let (res, res_count) = residual_statistics();
    check(
        &mut results,
        9,
        "relative residual of every linear solve",
        Duration::from_secs(1),
        || Outcome {
            pass: res <= RESIDUAL_TOLERANCE && res_count > 0,
            detail: format!("max relative residual {res:.1e} over {res_count} solves"),
        },
    );
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
