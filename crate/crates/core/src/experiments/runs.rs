use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;

use crate::assembly::{
    box_side, build_harmonic_space, harmonic_dimension_by_rank, BoundaryConditionSpec,
    BoundarySetup, FlowCondition, VorticityCondition,
};
use crate::error::{Error, Result};
use crate::fe_spaces::{
    error_norms, integer_composition_defect, interpolate_scalar, scalar_error_norm, Discretization,
    ExactDerivative, FormCoefficients,
};
use crate::fields::{
    scalar_field, vector_field, zero_scalar, zero_vector, Ethier, ScalarField, StokesMms, Vec3,
    VectorField,
};
use crate::mesh::{build_box_mesh, mesh_size, Point3, SimplicialMesh3};
use crate::solver::{initialize_state, run_transient, solve_stokes, step, SolverConfig};

use super::config::{parse_list, parse_value, ConfigEntries};
use super::report::{csv_error, ConvergenceReport, ConvergenceRow, Report};
use super::spec::{ExperimentKind, ExperimentSpec};
use super::vtk::{export_vtk, solution_fields};

pub fn box_mesh(n: usize, lo: f64, hi: f64) -> Result<SimplicialMesh3> {
    build_box_mesh(n, n, n, Point3::repeat(lo), Point3::repeat(hi))
}

fn discretization(spec: &ExperimentSpec, n: usize) -> Result<Discretization> {
    Discretization::new(box_mesh(n, spec.lo, spec.hi)?)
}

fn expect_kind(spec: &ExperimentSpec, allowed: &[ExperimentKind]) -> Result<()> {
    spec.validate()?;
    if !allowed.contains(&spec.kind) {
        return Err(Error::InvalidArgument(format!(
            "this runner does not handle `{}` specs",
            spec.kind
        )));
    }
    Ok(())
}

/// Exact fields against which a run is measured.
struct ExactSolution {
    u: VectorField,
    w: VectorField,
    curl_w: VectorField,
    p: ScalarField,
}

/// L2 error of a pressure, with both means removed when the pressure is only
/// fixed up to a constant.
fn pressure_error(
    disc: &Discretization,
    p: &FormCoefficients,
    exact: &ScalarField,
    t: f64,
    remove_mean: bool,
) -> Result<f64> {
    let norms = if remove_mean {
        let vol = disc.mesh.total_volume();
        let mean_h = p.values.iter().sum::<f64>() / vol;
        let mut shifted = p.clone();
        for (c, v) in shifted.values.iter_mut().zip(&disc.mesh.tet_volumes) {
            *c -= mean_h * v;
        }
        let cells = interpolate_scalar(&disc.v3, exact, &disc.mesh, &disc.quad, t)?;
        let mean = cells.values.iter().sum::<f64>() / vol;
        let e = exact.clone();
        let centered = scalar_field(move |x, t| e(x, t) - mean);
        scalar_error_norm(&shifted, &centered, &disc.mesh, &disc.quad, t)?
    } else {
        scalar_error_norm(p, exact, &disc.mesh, &disc.quad, t)?
    };
    Ok(norms.relative_or_absolute().0)
}

#[allow(clippy::too_many_arguments)]
fn convergence_row(
    disc: &Discretization,
    omega: &FormCoefficients,
    u: &FormCoefficients,
    p: &FormCoefficients,
    exact: &ExactSolution,
    t: f64,
    div_max: f64,
    remove_mean: bool,
) -> Result<ConvergenceRow> {
    let zero = zero_scalar();
    let eu = error_norms(
        u,
        &exact.u,
        ExactDerivative::Divergence(&zero),
        &disc.mesh,
        &disc.quad,
        t,
    )?;
    let ew = error_norms(
        omega,
        &exact.w,
        ExactDerivative::Curl(&exact.curl_w),
        &disc.mesh,
        &disc.quad,
        t,
    )?;
    let (err_l2_u, err_hdiv_u) = eu.relative_or_absolute();
    let (err_l2_w, err_hcurl_w) = ew.relative_or_absolute();
    Ok(ConvergenceRow {
        h: mesh_size(&disc.mesh),
        ndof_u: disc.v2.ndof,
        err_l2_u,
        err_hdiv_u,
        err_l2_w,
        err_hcurl_w,
        err_l2_p: pressure_error(disc, p, &exact.p, t, remove_mean)?,
        div_max,
    })
}

fn maybe_vtk(
    spec: &ExperimentSpec,
    n: usize,
    disc: &Discretization,
    omega: &FormCoefficients,
    u: &FormCoefficients,
    p: &FormCoefficients,
) -> Result<()> {
    if let (true, Some(dir)) = (spec.vtk, &spec.output) {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}_n{n}.vtk", spec.kind));
        export_vtk(
            &path,
            &disc.mesh,
            &format!("{} n={n}", spec.kind),
            &solution_fields(disc, omega, u, p)?,
        )?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

/// Exact normal velocity on the whole boundary, tangential velocity imposed weakly.
pub fn exact_trace_conditions(velocity: VectorField) -> BoundaryConditionSpec {
    BoundaryConditionSpec::uniform(
        VorticityCondition::Natural(velocity.clone()),
        FlowCondition::Essential(velocity),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoflowRow {
    pub n: usize,
    pub h: f64,
    pub ndof_u: usize,
    pub gamma: i32,
    pub velocity_norm: f64,
    /// Relative L2 error of the mean-free pressure against the mean-free potential.
    pub err_l2_p: f64,
    pub div_max: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoflowReport {
    pub rows: Vec<NoflowRow>,
}

impl NoflowReport {
    pub fn max_velocity(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.velocity_norm)
            .fold(0.0, f64::max)
    }
}

impl Report for NoflowReport {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "n",
            "h",
            "ndof_u",
            "gamma",
            "velocity_norm",
            "err_l2_p",
            "div_max",
            "residual",
        ])
        .map_err(csv_error)?;
        for r in &self.rows {
            out.write_record([
                r.n.to_string(),
                format!("{:e}", r.h),
                r.ndof_u.to_string(),
                r.gamma.to_string(),
                format!("{:e}", r.velocity_norm),
                format!("{:e}", r.err_l2_p),
                format!("{:e}", r.div_max),
                format!("{:e}", r.residual),
            ])
            .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    fn summary(&self) -> String {
        let mut s = String::from(
            "no-flow: gradient forcing, homogeneous essential conditions, one step from rest\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "n={:<3} gamma={:<2} |u|_M2={:.3e} pressure error={:.3e} div_max={:.2e} residual={:.2e}",
                r.n, r.gamma, r.velocity_norm, r.err_l2_p, r.div_max, r.residual
            );
        }
        let _ = writeln!(s, "max |u|_M2 = {:.3e}", self.max_velocity());
        s
    }
}

/// Potential `z^gamma / int z^gamma` on the box and its gradient.
pub fn noflow_potential(gamma: i32, lo: f64, hi: f64) -> Result<(ScalarField, VectorField)> {
    if gamma < 1 {
        return Err(Error::InvalidArgument(format!(
            "gamma must be at least 1, got {gamma}"
        )));
    }
    let g = gamma as f64;
    let side = hi - lo;
    let integral = side * side * (hi.powi(gamma + 1) - lo.powi(gamma + 1)) / (g + 1.0);
    if integral.abs() <= f64::MIN_POSITIVE {
        return Err(Error::ZeroNorm(format!(
            "z^{gamma} integrates to zero on the box"
        )));
    }
    let phi = scalar_field(move |x, _| x.z.powi(gamma) / integral);
    let grad = vector_field(move |x, _| Vec3::new(0.0, 0.0, g * x.z.powi(gamma - 1) / integral));
    Ok((phi, grad))
}

/// One implicit step from rest with a gradient force; the velocity must stay zero.
pub fn run_noflow(spec: &ExperimentSpec) -> Result<NoflowReport> {
    expect_kind(spec, &[ExperimentKind::Noflow])?;
    let cfg = spec.solver_config();
    let bc = BoundaryConditionSpec::homogeneous_essential();
    let mut report = NoflowReport::default();
    for &n in &spec.n {
        let disc = discretization(spec, n)?;
        let setup = BoundarySetup::new(&disc, &bc)?;
        let rest = initialize_state(&disc, &setup, &zero_vector(), 0.0)?;
        for &gamma in &spec.gamma {
            let (phi, f) = noflow_potential(gamma, spec.lo, spec.hi)?;
            let (state, diag) = step(&disc, &setup, &cfg, &rest, &f)?;
            report.rows.push(NoflowRow {
                n,
                h: mesh_size(&disc.mesh),
                ndof_u: disc.v2.ndof,
                gamma,
                velocity_norm: diag.velocity_norm,
                err_l2_p: pressure_error(&disc, &state.p, &phi, state.t, true)?,
                div_max: diag.max_divergence,
                residual: diag.residual,
            });
            if gamma == *spec.gamma.last().expect("validated non-empty") {
                maybe_vtk(spec, n, &disc, &state.omega, &state.u, &state.p)?;
            }
        }
    }
    Ok(report)
}

/// Ethier flow with exact boundary traces. Steady (`d = 0`): pseudo-time from
/// rest until the steady detector fires. Transient: exact initial data, run to `t_end`.
pub fn run_ethier(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    expect_kind(
        spec,
        &[
            ExperimentKind::EthierSteady,
            ExperimentKind::EthierTransient,
        ],
    )?;
    let steady = spec.kind == ExperimentKind::EthierSteady;
    let flow = Ethier::new(spec.a, spec.d);
    let exact = ExactSolution {
        u: flow.velocity_field(),
        w: flow.vorticity_field(),
        curl_w: vector_field(move |x, t| flow.curl_vorticity(x, t)),
        p: zero_scalar(),
    };
    let cfg = spec.solver_config();
    let bc = exact_trace_conditions(flow.velocity_field());
    let title = if steady {
        format!(
            "Ethier a={} d=0, steady from rest (pseudo-time dt={})",
            spec.a, spec.dt
        )
    } else {
        format!(
            "Ethier a={} d={}, dt={}, t_end={}",
            spec.a, spec.d, spec.dt, spec.t_end
        )
    };
    let mut report = ConvergenceReport::new(title);
    for &n in &spec.n {
        let clock = Instant::now();
        let disc = discretization(spec, n)?;
        let setup = BoundarySetup::new(&disc, &bc)?;
        let u0 = if steady {
            zero_vector()
        } else {
            flow.velocity_field()
        };
        let init = initialize_state(&disc, &setup, &u0, 0.0)?;
        let summary = run_transient(&disc, &setup, &cfg, &zero_vector(), init, |_, _| {})
            .map_err(|e| e.context(format!("Ethier run on n={n}")))?;
        let s = &summary.state;
        let row = convergence_row(
            &disc,
            &s.omega,
            &s.u,
            &s.p,
            &exact,
            s.t,
            summary.max_divergence,
            true,
        )?;
        info!(
            "n={n}: {} steps to t={:.4}, H(div) error {:.4e}, {:.2?}",
            summary.steps,
            s.t,
            row.err_hdiv_u,
            clock.elapsed()
        );
        maybe_vtk(spec, n, &disc, &s.omega, &s.u, &s.p)?;
        report.rows.push(row);
    }
    Ok(report)
}

/// Steady Stokes problem with a smooth manufactured solution, essential
/// tangential vorticity and normal velocity.
pub fn run_stokes_mms(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    expect_kind(spec, &[ExperimentKind::StokesMms])?;
    let exact = ExactSolution {
        u: StokesMms::velocity_field(),
        w: StokesMms::vorticity_field(),
        curl_w: StokesMms::curl_vorticity_field(),
        p: StokesMms::pressure_field(),
    };
    let bc = BoundaryConditionSpec::uniform(
        VorticityCondition::Essential(StokesMms::vorticity_field()),
        FlowCondition::Essential(StokesMms::velocity_field()),
    );
    let f = StokesMms::force(spec.nu);
    let mut report =
        ConvergenceReport::new(format!("Stokes manufactured solution, nu={}", spec.nu));
    for &n in &spec.n {
        let disc = discretization(spec, n)?;
        let setup = BoundarySetup::new(&disc, &bc)?;
        let sol = solve_stokes(&disc, &setup, spec.nu, &f, None)?;
        let row = convergence_row(
            &disc,
            &sol.omega,
            &sol.u,
            &sol.p,
            &exact,
            0.0,
            sol.diagnostics.max_divergence,
            true,
        )?;
        maybe_vtk(spec, n, &disc, &sol.omega, &sol.u, &sol.p)?;
        report.rows.push(row);
    }
    Ok(report)
}

/// Fixed cubic potential used to perturb forces by a gradient.
pub fn sweep_perturbation() -> (ScalarField, VectorField) {
    let s = scalar_field(|x, _| {
        x.x * x.x * x.y + x.y * x.z * x.z - 2.0 * x.x * x.z + x.z.powi(3) / 3.0
    });
    let grad = vector_field(|x, _| {
        Vec3::new(
            2.0 * x.x * x.y - 2.0 * x.z,
            x.x * x.x + x.z * x.z,
            2.0 * x.y * x.z - 2.0 * x.x + x.z * x.z,
        )
    });
    (s, grad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtSweepRow {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub err_l2_u: f64,
    pub err_hdiv_u: f64,
    pub div_max: f64,
    pub residual: f64,
    /// `||u - u_perturbed||_M2` when the sweep is repeated with a gradient added to the force.
    pub velocity_shift: Option<f64>,
    /// `||p - p_perturbed||_M3` for the same pair of runs.
    pub pressure_shift: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtBound {
    pub n: usize,
    /// Twice the larger of the errors at the two largest steps; `None` for a single step.
    pub bound: Option<f64>,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DtSweepReport {
    pub rows: Vec<DtSweepRow>,
    pub bounds: Vec<DtBound>,
}

impl DtSweepReport {
    pub fn bounded(&self) -> bool {
        self.bounds.iter().all(|b| b.within)
    }

    pub fn max_velocity_shift(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.velocity_shift)
            .reduce(f64::max)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl Report for DtSweepReport {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "n",
            "h",
            "dt",
            "err_l2_u",
            "err_hdiv_u",
            "div_max",
            "residual",
            "velocity_shift",
            "pressure_shift",
        ])
        .map_err(csv_error)?;
        for r in &self.rows {
            out.write_record([
                r.n.to_string(),
                format!("{:e}", r.h),
                format!("{:e}", r.dt),
                format!("{:e}", r.err_l2_u),
                format!("{:e}", r.err_hdiv_u),
                format!("{:e}", r.div_max),
                format!("{:e}", r.residual),
                opt(r.velocity_shift),
                opt(r.pressure_shift),
            ])
            .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    fn summary(&self) -> String {
        let mut s = String::from("time-step sweep: one step from interpolated Ethier data\n");
        for r in &self.rows {
            let _ = write!(
                s,
                "n={:<3} dt={:<8e} H(div) error={:.4e} div_max={:.2e}",
                r.n, r.dt, r.err_hdiv_u, r.div_max
            );
            if let (Some(du), Some(dp)) = (r.velocity_shift, r.pressure_shift) {
                let _ = write!(s, " gradient shift: |du|={du:.2e} |dp|={dp:.3e}");
            }
            s.push('\n');
        }
        for b in &self.bounds {
            match b.bound {
                Some(v) => {
                    let _ = writeln!(
                        s,
                        "n={}: bound {v:.4e}, {}",
                        b.n,
                        if b.within { "no growth" } else { "GROWTH" }
                    );
                }
                None => {
                    let _ = writeln!(s, "n={}: single step size, no bound checked", b.n);
                }
            }
        }
        s
    }
}

/// One step from interpolated Ethier data for each step size; errors against
/// the exact flow at `dt`.
pub fn run_dt_sweep(spec: &ExperimentSpec) -> Result<DtSweepReport> {
    expect_kind(spec, &[ExperimentKind::DtSweep])?;
    let flow = Ethier::new(spec.a, spec.d);
    let bc = exact_trace_conditions(flow.velocity_field());
    let (_, grad_s) = sweep_perturbation();
    let zero = zero_scalar();
    let mut report = DtSweepReport::default();
    for &n in &spec.n {
        let disc = discretization(spec, n)?;
        let setup = BoundarySetup::new(&disc, &bc)?;
        let init = initialize_state(&disc, &setup, &flow.velocity_field(), 0.0)?;
        let mut errors = Vec::new();
        for &dt in &spec.dt_list {
            let cfg = SolverConfig {
                dt,
                ..spec.solver_config()
            };
            let (state, diag) = step(&disc, &setup, &cfg, &init, &zero_vector())?;
            let e = error_norms(
                &state.u,
                &flow.velocity_field(),
                ExactDerivative::Divergence(&zero),
                &disc.mesh,
                &disc.quad,
                state.t,
            )?;
            let (err_l2_u, err_hdiv_u) = e.relative_or_absolute();
            let (velocity_shift, pressure_shift) = if spec.perturb_gradient {
                let (other, _) = step(&disc, &setup, &cfg, &init, &grad_s)?;
                let du: Vec<f64> = state
                    .u
                    .values
                    .iter()
                    .zip(&other.u.values)
                    .map(|(a, b)| a - b)
                    .collect();
                let dp: Vec<f64> = state
                    .p
                    .values
                    .iter()
                    .zip(&other.p.values)
                    .map(|(a, b)| a - b)
                    .collect();
                (
                    Some(disc.m2.quadratic_form(&du).max(0.0).sqrt()),
                    Some(disc.m3.quadratic_form(&dp).max(0.0).sqrt()),
                )
            } else {
                (None, None)
            };
            errors.push(err_hdiv_u);
            report.rows.push(DtSweepRow {
                n,
                h: mesh_size(&disc.mesh),
                dt,
                err_l2_u,
                err_hdiv_u,
                div_max: diag.max_divergence,
                residual: diag.residual,
                velocity_shift,
                pressure_shift,
            });
        }
        let bound = (errors.len() >= 2).then(|| 2.0 * errors[0].max(errors[1]));
        let within = bound.is_none_or(|b| errors.iter().all(|&e| e <= b));
        report.bounds.push(DtBound { n, bound, within });
    }
    Ok(report)
}

/// Runs the experiment named by the spec and writes `<kind>.csv` and
/// `<kind>.txt` into the output directory when one is set. Returns the summary.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<String> {
    let report: Box<dyn Report> = match spec.kind {
        ExperimentKind::Noflow => Box::new(run_noflow(spec)?),
        ExperimentKind::EthierSteady | ExperimentKind::EthierTransient => {
            Box::new(run_ethier(spec)?)
        }
        ExperimentKind::DtSweep => Box::new(run_dt_sweep(spec)?),
        ExperimentKind::StokesMms => Box::new(run_stokes_mms(spec)?),
    };
    if let Some(dir) = &spec.output {
        save_report(report.as_ref(), dir, spec.kind.name())?;
    }
    Ok(report.summary())
}

pub fn save_report(report: &dyn Report, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let txt_path = dir.join(format!("{stem}.txt"));
    let mut file = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    report.write_csv(&mut file)?;
    file.flush()?;
    std::fs::write(&txt_path, report.summary())?;
    Ok((csv_path, txt_path))
}

/// Mesh statistics and complex checks for one box mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshInfo {
    pub n: usize,
    pub h: f64,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub tets: usize,
    pub boundary_faces: usize,
    pub euler_characteristic: i64,
    pub volume: f64,
    /// Largest entry of `D2 D1` in integer arithmetic.
    pub d2d1_defect: i64,
    /// Harmonic 3-forms with essential normal velocity on the whole boundary.
    pub harmonic_essential: usize,
    /// Harmonic 3-forms with a natural pressure condition on the top face.
    pub harmonic_natural: usize,
    /// Rank-based counts `(essential, natural)`, computed for small meshes only.
    pub harmonic_by_rank: Option<(usize, usize)>,
}

const RANK_CHECK_MAX_TETS: usize = 1500;

/// Homogeneous `u x n` and pressure on the top face, `omega x n` and `u . n` on the walls.
pub fn open_top_conditions() -> BoundaryConditionSpec {
    BoundaryConditionSpec::default()
        .with_region(
            "top",
            box_side(2, true),
            VorticityCondition::Natural(zero_vector()),
            FlowCondition::Natural(zero_scalar()),
        )
        .with_region(
            "walls",
            |c, n| !box_side(2, true)(c, n),
            VorticityCondition::Essential(zero_vector()),
            FlowCondition::Essential(zero_vector()),
        )
}

pub fn mesh_info(n: usize, lo: f64, hi: f64) -> Result<MeshInfo> {
    let disc = Discretization::new(box_mesh(n, lo, hi)?)?;
    let m = &disc.mesh;
    let essential = BoundaryConditionSpec::homogeneous_essential();
    let natural = open_top_conditions();
    let harmonic_by_rank = if m.num_tets() <= RANK_CHECK_MAX_TETS {
        Some((
            harmonic_dimension_by_rank(&disc, &essential)?,
            harmonic_dimension_by_rank(&disc, &natural)?,
        ))
    } else {
        None
    };
    Ok(MeshInfo {
        n,
        h: mesh_size(m),
        vertices: m.num_vertices(),
        edges: m.num_edges(),
        faces: m.num_faces(),
        tets: m.num_tets(),
        boundary_faces: m.boundary_faces.len(),
        euler_characteristic: m.euler_characteristic(),
        volume: m.total_volume(),
        d2d1_defect: integer_composition_defect(&disc.d2, &disc.d1)?,
        harmonic_essential: build_harmonic_space(&disc, &essential)?.dim(),
        harmonic_natural: build_harmonic_space(&disc, &natural)?.dim(),
        harmonic_by_rank,
    })
}

/// `mesh-info` accepts only `n`, `lo` and `hi`.
pub fn mesh_info_from(entries: &ConfigEntries) -> Result<Vec<MeshInfo>> {
    let (mut ns, mut lo, mut hi) = (vec![2usize], 0.0, 1.0);
    for (k, v, line) in &entries.entries {
        match k.as_str() {
            "n" => ns = parse_list(k, v, *line)?,
            "lo" => lo = parse_value(k, v, *line)?,
            "hi" => hi = parse_value(k, v, *line)?,
            _ => {
                return Err(Error::Config(format!(
                    "mesh-info takes n, lo and hi; got `{k}`"
                )))
            }
        }
    }
    ns.iter().map(|&n| mesh_info(n, lo, hi)).collect()
}

impl std::fmt::Display for MeshInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "box mesh n={} (h = {:.4}, volume {:.4})",
            self.n, self.h, self.volume
        )?;
        writeln!(
            f,
            "  vertices {}  edges {}  faces {}  tets {}  boundary faces {}",
            self.vertices, self.edges, self.faces, self.tets, self.boundary_faces
        )?;
        writeln!(f, "  Euler characteristic {}", self.euler_characteristic)?;
        writeln!(f, "  max |D2 D1| = {}", self.d2d1_defect)?;
        write!(
            f,
            "  harmonic 3-forms: {} (essential u.n), {} (natural pressure on top)",
            self.harmonic_essential, self.harmonic_natural
        )?;
        if let Some((e, n)) = self.harmonic_by_rank {
            write!(f, "; by rank {e}, {n}")?;
        }
        Ok(())
    }
}
