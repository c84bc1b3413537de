//! Reproducible numerical experiments: configuration, runners, reports and
//! VTK output.

mod config;
mod report;
mod runs;
mod spec;
mod vtk;

pub use config::ConfigEntries;
pub use report::{
    log_log_slope, ConvergenceReport, ConvergenceRow, ErrorColumn, Report, CONVERGENCE_HEADER,
};
pub use runs::{
    box_mesh, exact_trace_conditions, mesh_info, mesh_info_from, noflow_potential,
    open_top_conditions, run_dt_sweep, run_ethier, run_experiment, run_noflow, run_stokes_mms,
    save_report, sweep_perturbation, DtBound, DtSweepReport, DtSweepRow, MeshInfo, NoflowReport,
    NoflowRow,
};
pub use spec::{ExperimentKind, ExperimentSpec, KEYS};
pub use vtk::{export_vtk, solution_fields, write_vtk, CellData, VtkField};
