use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};

pub const CONVERGENCE_HEADER: [&str; 8] = [
    "h",
    "ndof_u",
    "err_l2_u",
    "err_hdiv_u",
    "err_l2_w",
    "err_hcurl_w",
    "err_l2_p",
    "div_max",
];

/// One mesh of a convergence sweep. Errors are relative to the exact norm
/// when that norm is nonzero and absolute otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub ndof_u: usize,
    pub err_l2_u: f64,
    pub err_hdiv_u: f64,
    pub err_l2_w: f64,
    pub err_hcurl_w: f64,
    pub err_l2_p: f64,
    pub div_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorColumn {
    L2U,
    HdivU,
    L2W,
    HcurlW,
    L2P,
}

impl ErrorColumn {
    pub const ALL: [ErrorColumn; 5] = [
        ErrorColumn::L2U,
        ErrorColumn::HdivU,
        ErrorColumn::L2W,
        ErrorColumn::HcurlW,
        ErrorColumn::L2P,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorColumn::L2U => "err_l2_u",
            ErrorColumn::HdivU => "err_hdiv_u",
            ErrorColumn::L2W => "err_l2_w",
            ErrorColumn::HcurlW => "err_hcurl_w",
            ErrorColumn::L2P => "err_l2_p",
        }
    }

    pub fn of(self, row: &ConvergenceRow) -> f64 {
        match self {
            ErrorColumn::L2U => row.err_l2_u,
            ErrorColumn::HdivU => row.err_hdiv_u,
            ErrorColumn::L2W => row.err_l2_w,
            ErrorColumn::HcurlW => row.err_hcurl_w,
            ErrorColumn::L2P => row.err_l2_p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub title: String,
    pub rows: Vec<ConvergenceRow>,
}

/// Least-squares slope of `log y` against `log x`. `None` with fewer than two
/// points or any non-positive value.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

impl ConvergenceReport {
    pub fn new(title: impl Into<String>) -> Self {
        ConvergenceReport {
            title: title.into(),
            rows: Vec::new(),
        }
    }

    pub fn slope(&self, column: ErrorColumn) -> Option<f64> {
        let h: Vec<f64> = self.rows.iter().map(|r| r.h).collect();
        let e: Vec<f64> = self.rows.iter().map(|r| column.of(r)).collect();
        log_log_slope(&h, &e)
    }

    /// True when the column strictly decreases along the sweep.
    pub fn monotone(&self, column: ErrorColumn) -> bool {
        self.rows
            .windows(2)
            .all(|w| column.of(&w[1]) < column.of(&w[0]))
    }

    pub fn max_divergence(&self) -> f64 {
        self.rows.iter().map(|r| r.div_max).fold(0.0, f64::max)
    }
}

/// A finished experiment: machine-readable CSV plus a human summary.
pub trait Report {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()>;
    fn summary(&self) -> String;
}

impl Report for ConvergenceReport {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CONVERGENCE_HEADER).map_err(csv_error)?;
        for r in &self.rows {
            out.write_record([
                format!("{:e}", r.h),
                r.ndof_u.to_string(),
                format!("{:e}", r.err_l2_u),
                format!("{:e}", r.err_hdiv_u),
                format!("{:e}", r.err_l2_w),
                format!("{:e}", r.err_hcurl_w),
                format!("{:e}", r.err_l2_p),
                format!("{:e}", r.div_max),
            ])
            .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    fn summary(&self) -> String {
        let mut s = format!("{}\n", self.title);
        let _ = writeln!(
            s,
            "{:>8} {:>8} {:>11} {:>11} {:>11} {:>11} {:>11} {:>10}",
            "h", "ndof_u", "l2_u", "hdiv_u", "l2_w", "hcurl_w", "l2_p", "div_max"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>8.4} {:>8} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>10.2e}",
                r.h,
                r.ndof_u,
                r.err_l2_u,
                r.err_hdiv_u,
                r.err_l2_w,
                r.err_hcurl_w,
                r.err_l2_p,
                r.div_max
            );
        }
        for c in ErrorColumn::ALL {
            if let Some(k) = self.slope(c) {
                let _ = writeln!(s, "slope {:<12} {k:.3}", c.name());
            }
        }
        s
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Numerical(format!("csv: {other:?}")),
    }
}
