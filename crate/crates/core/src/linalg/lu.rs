//! Sparse LU with partial pivoting, backed by faer's supernodal factorization.
//!
//! Rows are equilibrated by their largest entry before factoring so that the
//! column-wise pivot search compares entries on a common scale.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Mat, MatRef};

use crate::error::{Error, Result};

use super::sparse::SparseMatrix;

#[derive(Debug)]
pub struct SparseLu {
    n: usize,
    row_scale: Vec<f64>,
    lu: Lu<usize, f64>,
}

impl SparseLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let mut row_scale = vec![0.0; n];
        for (i, s) in row_scale.iter_mut().enumerate() {
            let m = a.row(i).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            if m == 0.0 {
                return Err(Error::Singular {
                    stage: 0,
                    column: i,
                    magnitude: 0.0,
                });
            }
            *s = 1.0 / m;
        }
        // CSR of the transpose is CSC of the original
        let at = a.transpose();
        let values: Vec<f64> = at
            .indices()
            .iter()
            .zip(at.values())
            .map(|(&i, &v)| v * row_scale[i])
            .collect();
        let symbolic = SymbolicSparseColMat::new_checked(
            n,
            n,
            at.indptr().to_vec(),
            None,
            at.indices().to_vec(),
        );
        let csc = SparseColMat::new(symbolic, values);
        let lu = csc.sp_lu().map_err(|e| match e {
            faer::sparse::linalg::LuError::SymbolicSingular { index } => Error::Singular {
                stage: 0,
                column: index,
                magnitude: 0.0,
            },
            faer::sparse::linalg::LuError::Generic(g) => {
                Error::Numerical(format!("sparse LU failed: {g:?}"))
            }
        })?;
        Ok(SparseLu { n, row_scale, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`. Fails with [`Error::Singular`] when the factors produce non-finite values.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::Dimension(format!(
                "LU of size {} given rhs of length {}",
                self.n,
                b.len()
            )));
        }
        let scaled: Vec<f64> = b.iter().zip(&self.row_scale).map(|(v, s)| v * s).collect();
        let rhs = MatRef::from_column_major_slice(&scaled, self.n, 1);
        let x: Mat<f64> = self.lu.solve(rhs);
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::Singular {
                stage: 1,
                column: i,
                magnitude: f64::NAN,
            });
        }
        Ok(out)
    }
}
