//! Sparse matrices, block systems and the direct solver.

pub mod block;
pub mod lu;
pub mod sparse;

use std::sync::atomic::{AtomicU64, Ordering};

pub use block::{BlockSystem, ReducedSystem};
pub use lu::SparseLu;
pub use sparse::{dot, norm2, SparseMatrix, TripletBuilder};

use crate::error::{Error, Result};

/// Relative residual every accepted solve must meet.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const MAX_REFINEMENT_STEPS: usize = 3;

static MAX_RESIDUAL_BITS: AtomicU64 = AtomicU64::new(0);
static SOLVE_COUNT: AtomicU64 = AtomicU64::new(0);

/// Largest relative residual seen by [`solve`] in this process, and the number of solves.
pub fn residual_statistics() -> (f64, u64) {
    (
        f64::from_bits(MAX_RESIDUAL_BITS.load(Ordering::Relaxed)),
        SOLVE_COUNT.load(Ordering::Relaxed),
    )
}

fn record_residual(r: f64) {
    SOLVE_COUNT.fetch_add(1, Ordering::Relaxed);
    // non-negative floats order like their bit patterns
    MAX_RESIDUAL_BITS.fetch_max(r.to_bits(), Ordering::Relaxed);
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    /// `||Ax - b|| / max(||b||, eps)`
    pub relative_residual: f64,
}

pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut r = b.to_vec();
    a.mul_vec_add(-1.0, x, &mut r);
    norm2(&r) / norm2(b).max(f64::MIN_POSITIVE)
}

/// Direct solve with a few steps of iterative refinement; fails unless the
/// relative residual reaches [`RESIDUAL_TOLERANCE`].
pub fn solve(a: &SparseMatrix, b: &[f64]) -> Result<Solution> {
    if a.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "matrix has {} rows, rhs {}",
            a.nrows(),
            b.len()
        )));
    }
    let lu = SparseLu::factor(a)?;
    let mut x = lu.solve(b)?;
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut residual = relative_residual(a, &x, b);
    for _ in 0..MAX_REFINEMENT_STEPS {
        if residual < 1e-15 || !residual.is_finite() {
            break;
        }
        let mut r = b.to_vec();
        a.mul_vec_add(-1.0, &x, &mut r);
        let dx = lu.solve(&r)?;
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let mut rc = b.to_vec();
        a.mul_vec_add(-1.0, &candidate, &mut rc);
        let new_res = norm2(&rc) / bnorm;
        if new_res < residual {
            x = candidate;
            residual = new_res;
        } else {
            break;
        }
    }
    if !residual.is_finite() || residual > RESIDUAL_TOLERANCE {
        return Err(Error::Residual {
            residual,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    record_residual(residual);
    Ok(Solution {
        x,
        relative_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.5, -2.0, 3.25];
        let s = solve(&SparseMatrix::identity(3), &b).unwrap();
        assert_eq!(s.x, b);
        assert_eq!(s.relative_residual, 0.0);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = SparseMatrix::from_dense(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = solve(&a, &[0.0, 0.0]).unwrap();
        assert_eq!(s.x, vec![0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(solve(&SparseMatrix::identity(2), &[1.0]).is_err());
    }
}
