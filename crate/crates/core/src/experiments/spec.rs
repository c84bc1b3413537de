use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::solver::SolverConfig;

use super::config::{parse_bool, parse_list, parse_path, parse_value, ConfigEntries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Noflow,
    EthierSteady,
    EthierTransient,
    DtSweep,
    StokesMms,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Noflow => "noflow",
            ExperimentKind::EthierSteady => "ethier-steady",
            ExperimentKind::EthierTransient => "ethier-transient",
            ExperimentKind::DtSweep => "dt-sweep",
            ExperimentKind::StokesMms => "stokes-mms",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Declarative description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Cells per side of the box meshes, one run per entry.
    pub n: Vec<usize>,
    /// The box is `[lo, hi]^3`.
    pub lo: f64,
    pub hi: f64,
    pub nu: f64,
    pub theta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub steady_tol: f64,
    pub max_steps: usize,
    /// Ethier parameters.
    pub a: f64,
    pub d: f64,
    /// Exponents of the no-flow potential `z^gamma`.
    pub gamma: Vec<i32>,
    /// Time steps of the sweep, decreasing.
    pub dt_list: Vec<f64>,
    /// Repeat the sweep with a gradient added to the force and compare velocities.
    pub perturb_gradient: bool,
    pub output: Option<PathBuf>,
    pub vtk: bool,
}

pub const KEYS: &[&str] = &[
    "n",
    "lo",
    "hi",
    "nu",
    "theta",
    "dt",
    "t_end",
    "steady_tol",
    "max_steps",
    "a",
    "d",
    "gamma",
    "dt_list",
    "perturb_gradient",
    "output",
    "vtk",
    "mode",
];

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        let base = ExperimentSpec {
            kind,
            n: vec![2],
            lo: 0.0,
            hi: 1.0,
            nu: 1.0,
            theta: 0.5,
            dt: 1e-3,
            t_end: 0.25,
            steady_tol: 1e-10,
            max_steps: 100_000,
            a: 2.0,
            d: 1.0,
            gamma: vec![1, 2, 4, 7],
            dt_list: vec![1e-1, 1e-2, 1e-3, 1e-4],
            perturb_gradient: false,
            output: None,
            vtk: false,
        };
        match kind {
            ExperimentKind::Noflow => ExperimentSpec { dt: 1e-2, ..base },
            ExperimentKind::EthierSteady => ExperimentSpec {
                n: vec![2, 3, 4],
                d: 0.0,
                dt: 0.1,
                max_steps: 2000,
                ..base
            },
            ExperimentKind::EthierTransient => ExperimentSpec {
                n: vec![2, 3, 4],
                ..base
            },
            ExperimentKind::DtSweep => base,
            ExperimentKind::StokesMms => ExperimentSpec {
                n: vec![2, 3, 4],
                ..base
            },
        }
    }

    /// Builds the spec for a CLI command (`noflow`, `ethier`, `dtsweep`,
    /// `stokes-mms`) from config entries. For `ethier` the mode comes from
    /// `mode = steady|transient` or, failing that, from `d` (steady iff `d = 0`).
    pub fn for_command(command: &str, entries: &ConfigEntries) -> Result<Self> {
        let kind = match command {
            "noflow" => ExperimentKind::Noflow,
            "dtsweep" | "dt-sweep" => ExperimentKind::DtSweep,
            "stokes-mms" => ExperimentKind::StokesMms,
            "ethier" | "ethier-steady" | "ethier-transient" => {
                let steady = match (command, entries.get("mode")) {
                    ("ethier-steady", _) | (_, Some("steady")) => true,
                    ("ethier-transient", _) | (_, Some("transient")) => false,
                    (_, Some(other)) => {
                        return Err(Error::Config(format!(
                            "mode must be `steady` or `transient`, got `{other}`"
                        )))
                    }
                    (_, None) => match entries.get("d") {
                        Some(d) => parse_value::<f64>("d", d, 0)? == 0.0,
                        None => false,
                    },
                };
                if steady {
                    ExperimentKind::EthierSteady
                } else {
                    ExperimentKind::EthierTransient
                }
            }
            other => return Err(Error::Config(format!("unknown experiment `{other}`"))),
        };
        let mut spec = ExperimentSpec::new(kind);
        spec.apply(entries)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn apply(&mut self, entries: &ConfigEntries) -> Result<()> {
        for (key, value, line) in &entries.entries {
            self.set(key, value, *line)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, v: &str, line: usize) -> Result<()> {
        match key {
            "n" => self.n = parse_list(key, v, line)?,
            "lo" => self.lo = parse_value(key, v, line)?,
            "hi" => self.hi = parse_value(key, v, line)?,
            "nu" => self.nu = parse_value(key, v, line)?,
            "theta" => self.theta = parse_value(key, v, line)?,
            "dt" => self.dt = parse_value(key, v, line)?,
            "t_end" => self.t_end = parse_value(key, v, line)?,
            "steady_tol" => self.steady_tol = parse_value(key, v, line)?,
            "max_steps" => self.max_steps = parse_value(key, v, line)?,
            "a" => self.a = parse_value(key, v, line)?,
            "d" => self.d = parse_value(key, v, line)?,
            "gamma" => self.gamma = parse_list(key, v, line)?,
            "dt_list" => self.dt_list = parse_list(key, v, line)?,
            "perturb_gradient" => self.perturb_gradient = parse_bool(key, v, line)?,
            "output" => self.output = parse_path(v),
            "vtk" => self.vtk = parse_bool(key, v, line)?,
            "mode" => {}
            _ => {
                return Err(Error::Config(format!(
                    "unknown key `{key}`; known keys: {}",
                    KEYS.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::Config("`n` must list positive cell counts".into()));
        }
        if self.n.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "`n` must be strictly increasing, got {:?}",
                self.n
            )));
        }
        if !(self.hi > self.lo) {
            return Err(Error::Config(format!(
                "box needs lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        match self.kind {
            ExperimentKind::Noflow if self.gamma.is_empty() => {
                return Err(Error::Config("`gamma` must not be empty".into()))
            }
            ExperimentKind::EthierSteady | ExperimentKind::EthierTransient if self.n.len() < 3 => {
                return Err(Error::Config(
                    "an Ethier sweep needs at least three meshes".into(),
                ))
            }
            ExperimentKind::EthierSteady if self.d != 0.0 => {
                return Err(Error::Config(format!(
                    "the steady Ethier flow needs d = 0, got {}",
                    self.d
                )))
            }
            ExperimentKind::DtSweep => {
                if self.dt_list.is_empty() || self.dt_list.iter().any(|&dt| !(dt > 0.0)) {
                    return Err(Error::Config("`dt_list` must hold positive steps".into()));
                }
                if self.dt_list.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::Config(format!(
                        "`dt_list` must be decreasing, got {:?}",
                        self.dt_list
                    )));
                }
            }
            _ => {}
        }
        self.solver_config().validate()
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            nu: self.nu,
            dt: self.dt,
            theta: self.theta,
            t_end: self.t_end,
            steady_tol: self.steady_tol,
            max_steps: self.max_steps,
            steady: self.kind == ExperimentKind::EthierSteady,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(command: &str, text: &str) -> Result<ExperimentSpec> {
        ExperimentSpec::for_command(command, &ConfigEntries::parse(text).unwrap())
    }

    #[test]
    fn ethier_mode_follows_d() {
        assert_eq!(
            spec("ethier", "d = 0").unwrap().kind,
            ExperimentKind::EthierSteady
        );
        assert_eq!(
            spec("ethier", "d = 1").unwrap().kind,
            ExperimentKind::EthierTransient
        );
        assert_eq!(
            spec("ethier", "").unwrap().kind,
            ExperimentKind::EthierTransient
        );
        assert!(spec("ethier", "mode = steady\nd = 1").is_err());
    }

    #[test]
    fn invariants_are_checked() {
        assert!(spec("ethier", "n = 2, 4").is_err());
        assert!(spec("ethier", "n = 2, 4, 3").is_err());
        assert!(spec("noflow", "gamma = ").is_err());
        assert!(spec("dtsweep", "dt_list = 0.01, 0.1").is_err());
        assert!(spec("dtsweep", "nu = -1").is_err());
        assert!(spec("noflow", "colour = red").is_err());
        assert!(spec("bogus", "").is_err());
    }

    #[test]
    fn values_are_applied() {
        let s = spec(
            "dtsweep",
            "n = 3\ndt_list = 0.1, 0.01\nperturb_gradient = yes\noutput = out",
        )
        .unwrap();
        assert_eq!(s.n, vec![3]);
        assert_eq!(s.dt_list, vec![0.1, 0.01]);
        assert!(s.perturb_gradient);
        assert_eq!(s.output, Some(PathBuf::from("out")));
    }
}
