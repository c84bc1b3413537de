//! Steady mixed solves and the linearly implicit theta scheme in time.

use std::sync::atomic::{AtomicU64, Ordering};

use log::debug;

use crate::assembly::{
    assemble_b0, assemble_convection, assemble_mixed, BoundarySetup, MixedTerms, HARMONIC, OMEGA,
    PRESSURE, VELOCITY,
};
use crate::error::{Error, Result};
use crate::fe_spaces::{interpolate_vector, Discretization, FormCoefficients};
use crate::fields::{ScalarField, VectorField};
use crate::linalg::{self, BlockSystem, SparseMatrix};

/// Bound on `max_T |(D2 u)_T| / |T|` relative to `1 + ||u||_M2` for solves without mass source.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;

static MAX_DIVERGENCE_RATIO_BITS: AtomicU64 = AtomicU64::new(0);
static DIVERGENCE_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Largest `max_T |(D2 u)_T| / |T| / (1 + ||u||_M2)` over all source-free solves
/// in this process, and the number of such solves.
pub fn divergence_statistics() -> (f64, u64) {
    (
        f64::from_bits(MAX_DIVERGENCE_RATIO_BITS.load(Ordering::Relaxed)),
        DIVERGENCE_CHECKS.load(Ordering::Relaxed),
    )
}

fn record_divergence(ratio: f64) {
    DIVERGENCE_CHECKS.fetch_add(1, Ordering::Relaxed);
    MAX_DIVERGENCE_RATIO_BITS.fetch_max(ratio.to_bits(), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub theta: f64,
    pub t_end: f64,
    /// Threshold on `||u^n - u^{n-1}||_M2 / (dt ||u^n||_M2)`.
    pub steady_tol: f64,
    pub max_steps: usize,
    /// Run until the steady detector fires; exceeding `max_steps` is an error.
    pub steady: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            nu: 1.0,
            dt: 1e-3,
            theta: 0.5,
            t_end: 1.0,
            steady_tol: 1e-10,
            max_steps: 100_000,
            steady: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::Config(format!(
                "nu must be positive, got {}",
                self.nu
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        if !self.steady && !(self.t_end >= 0.0) {
            return Err(Error::Config(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if !(self.steady_tol > 0.0) {
            return Err(Error::Config(format!(
                "steady_tol must be positive, got {}",
                self.steady_tol
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Discrete unknowns at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientState {
    pub t: f64,
    pub omega: FormCoefficients,
    pub u: FormCoefficients,
    pub p: FormCoefficients,
    pub phi: Vec<f64>,
}

/// Checks reported for every mixed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    pub residual: f64,
    /// `max_T |(D2 u)_T| / |T|`
    pub max_divergence: f64,
    /// Largest `|<p, chi>|` over the harmonic basis.
    pub harmonic_pairing: f64,
    pub velocity_norm: f64,
}

#[derive(Debug, Clone)]
pub struct StokesSolution {
    pub omega: FormCoefficients,
    pub u: FormCoefficients,
    pub p: FormCoefficients,
    pub phi: Vec<f64>,
    pub diagnostics: SolveDiagnostics,
}

struct Unknowns {
    omega: FormCoefficients,
    u: FormCoefficients,
    p: FormCoefficients,
    phi: Vec<f64>,
    diagnostics: SolveDiagnostics,
}

fn solve_block(
    disc: &Discretization,
    setup: &BoundarySetup,
    sys: &BlockSystem,
    source_free: bool,
) -> Result<Unknowns> {
    let reduced = sys.assemble();
    let sol = linalg::solve(&reduced.matrix, &reduced.rhs)?;
    let x = reduced.reconstruct(&sol.x);
    let part = |name: &str| -> Result<Vec<f64>> { Ok(x[sys.group_range(name)?].to_vec()) };
    let omega = disc.v1.coefficients(part(OMEGA)?)?;
    let u = disc.v2.coefficients(part(VELOCITY)?)?;
    let p = disc.v3.coefficients(part(PRESSURE)?)?;
    let phi = part(HARMONIC)?;
    let max_divergence = disc.max_divergence(&u.values);
    let velocity_norm = disc.mass_norm(&u);
    let m3p = disc.m3.mul_vec(&p.values);
    let harmonic_pairing = setup
        .harmonic
        .basis
        .iter()
        .map(|chi| linalg::dot(chi, &m3p).abs())
        .fold(0.0, f64::max);
    if source_free {
        record_divergence(max_divergence / (1.0 + velocity_norm));
    }
    let diagnostics = SolveDiagnostics {
        residual: sol.relative_residual,
        max_divergence,
        harmonic_pairing,
        velocity_norm,
    };
    Ok(Unknowns {
        omega,
        u,
        p,
        phi,
        diagnostics,
    })
}

/// Solves the steady mixed problem with viscosity `nu`, force `f2` and mass source `f3`.
pub fn solve_stokes(
    disc: &Discretization,
    setup: &BoundarySetup,
    nu: f64,
    f2: &VectorField,
    f3: Option<&ScalarField>,
) -> Result<StokesSolution> {
    let sys = assemble_b0(disc, setup, nu, f2, f3)?;
    let s = solve_block(disc, setup, &sys, f3.is_none())
        .map_err(|e| e.context("steady mixed solve"))?;
    Ok(StokesSolution {
        omega: s.omega,
        u: s.u,
        p: s.p,
        phi: s.phi,
        diagnostics: s.diagnostics,
    })
}

/// Initial state at time `t0`: interpolated velocity and the discrete vorticity
/// solving `M1 w = D1^T M2 u + natural(u x n)` with essential edges fixed.
pub fn initialize_state(
    disc: &Discretization,
    setup: &BoundarySetup,
    u0: &VectorField,
    t0: f64,
) -> Result<TransientState> {
    let mut u = interpolate_vector(&disc.v2, u0, &disc.mesh, t0)?;
    for (f, v) in setup.partition.flux_values(&setup.bc, &disc.mesh, t0) {
        u.values[f] = v;
    }
    let mut sys = BlockSystem::new([(OMEGA, disc.v1.ndof)]);
    sys.add_block(OMEGA, OMEGA, disc.m1.clone())?;
    let m2u = disc.m2.mul_vec(&u.values);
    sys.add_rhs(OMEGA, &disc.d1.transpose().mul_vec(&m2u))?;
    let natural = crate::assembly::assemble_natural_bc(disc, &setup.bc, &setup.partition, t0);
    sys.add_rhs(OMEGA, &natural.edge_rhs)?;
    for (e, v) in setup.partition.vorticity_values(&setup.bc, &disc.mesh, t0) {
        sys.constrain(OMEGA, e, v)?;
    }
    let reduced = sys.assemble();
    let sol =
        linalg::solve(&reduced.matrix, &reduced.rhs).map_err(|e| e.context("initial vorticity"))?;
    let omega = disc.v1.coefficients(reduced.reconstruct(&sol.x))?;
    Ok(TransientState {
        t: t0,
        omega,
        u,
        p: disc.v3.zeros(),
        phi: vec![0.0; setup.harmonic.dim()],
    })
}

/// Per-step information passed to observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub t: f64,
    pub residual: f64,
    pub max_divergence: f64,
    pub harmonic_pairing: f64,
    /// `u^T M2 u / 2`
    pub kinetic_energy: f64,
    /// `||u^n - u^{n-1}||_M2 / (dt ||u^n||_M2)`
    pub relative_update: f64,
}

/// One step of the linearized scheme from `state` to `state.t + dt`, with the
/// force and boundary data evaluated at the new time level.
pub fn step(
    disc: &Discretization,
    setup: &BoundarySetup,
    cfg: &SolverConfig,
    state: &TransientState,
    f: &VectorField,
) -> Result<(TransientState, SolveDiagnostics)> {
    cfg.validate()?;
    state.omega.check_space(&disc.v1)?;
    state.u.check_space(&disc.v2)?;
    let (a3, a5) = assemble_convection(&disc.mesh, &state.omega, &state.u, cfg.theta, &disc.quad)?;
    let t = state.t + cfg.dt;
    let terms = MixedTerms {
        nu: cfg.nu,
        inv_dt: 1.0 / cfg.dt,
        convection: Some((&a3, &a5)),
        u_prev: Some(&state.u.values),
    };
    let sys = assemble_mixed(disc, setup, &terms, f, None, t)?;
    let s = solve_block(disc, setup, &sys, true)
        .map_err(|e| e.context(format!("time step to t = {t}")))?;
    Ok((
        TransientState {
            t,
            omega: s.omega,
            u: s.u,
            p: s.p,
            phi: s.phi,
        },
        s.diagnostics,
    ))
}

fn relative_update(disc: &Discretization, prev: &[f64], next: &[f64], dt: f64) -> f64 {
    let diff: Vec<f64> = next.iter().zip(prev).map(|(a, b)| a - b).collect();
    let dn = disc.m2.quadratic_form(&diff).max(0.0).sqrt();
    let un = disc.m2.quadratic_form(next).max(0.0).sqrt();
    if dn == 0.0 {
        0.0
    } else if un == 0.0 {
        f64::INFINITY
    } else {
        dn / (dt * un)
    }
}

#[derive(Debug, Clone)]
pub struct TransientSummary {
    pub state: TransientState,
    pub steps: usize,
    pub steady: bool,
    pub last_update: f64,
    pub max_divergence: f64,
    pub max_residual: f64,
}

/// Steps from `initial` until `t_end`, or until the steady detector fires.
/// In steady mode running out of `max_steps` is reported as an error.
pub fn run_transient(
    disc: &Discretization,
    setup: &BoundarySetup,
    cfg: &SolverConfig,
    f: &VectorField,
    initial: TransientState,
    mut observer: impl FnMut(&StepReport, &TransientState),
) -> Result<TransientSummary> {
    cfg.validate()?;
    let target_steps = if cfg.steady {
        cfg.max_steps
    } else {
        (((cfg.t_end - initial.t) / cfg.dt) - 1e-9).ceil().max(0.0) as usize
    };
    let mut state = initial;
    let mut last_update = f64::INFINITY;
    let (mut max_div, mut max_res) = (0.0f64, 0.0f64);
    for n in 1..=target_steps.min(cfg.max_steps) {
        let (next, diag) = step(disc, setup, cfg, &state, f)?;
        last_update = relative_update(disc, &state.u.values, &next.u.values, cfg.dt);
        max_div = max_div.max(diag.max_divergence);
        max_res = max_res.max(diag.residual);
        let report = StepReport {
            step: n,
            t: next.t,
            residual: diag.residual,
            max_divergence: diag.max_divergence,
            harmonic_pairing: diag.harmonic_pairing,
            kinetic_energy: 0.5 * diag.velocity_norm * diag.velocity_norm,
            relative_update: last_update,
        };
        debug!(
            "step {n} t={:.6} update={last_update:.3e} div={:.3e}",
            next.t, diag.max_divergence
        );
        observer(&report, &next);
        state = next;
        if last_update < cfg.steady_tol {
            return Ok(TransientSummary {
                state,
                steps: n,
                steady: true,
                last_update,
                max_divergence: max_div,
                max_residual: max_res,
            });
        }
    }
    if cfg.steady {
        return Err(Error::NotConverged {
            steps: cfg.max_steps,
            last_update,
        });
    }
    Ok(TransientSummary {
        state,
        steps: target_steps.min(cfg.max_steps),
        steady: false,
        last_update,
        max_divergence: max_div,
        max_residual: max_res,
    })
}

/// Steady problem through the same code path as a time step: no time
/// derivative, no convection.
pub fn steady_operator_check(
    disc: &Discretization,
    setup: &BoundarySetup,
    nu: f64,
    f: &VectorField,
) -> Result<StokesSolution> {
    let zero = SparseMatrix::zeros(disc.v2.ndof, disc.v1.ndof);
    let zero5 = SparseMatrix::zeros(disc.v2.ndof, disc.v2.ndof);
    let terms = MixedTerms {
        nu,
        inv_dt: 0.0,
        convection: Some((&zero, &zero5)),
        u_prev: None,
    };
    let sys = assemble_mixed(disc, setup, &terms, f, None, 0.0)?;
    let s = solve_block(disc, setup, &sys, true)?;
    Ok(StokesSolution {
        omega: s.omega,
        u: s.u,
        p: s.p,
        phi: s.phi,
        diagnostics: s.diagnostics,
    })
}
