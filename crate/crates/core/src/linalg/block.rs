//! Block-structured linear systems with essential constraints removed by elimination.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::sparse::SparseMatrix;

/// A square system laid out as named unknown groups, one row group per unknown group.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    names: Vec<String>,
    offsets: Vec<usize>,
    blocks: Vec<(usize, usize, SparseMatrix)>,
    rhs: Vec<f64>,
    constraints: BTreeMap<usize, f64>,
}

/// The system after constrained unknowns have been eliminated.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// `free[k]`: full index of reduced unknown `k`.
    pub free: Vec<usize>,
    /// `full_to_reduced[i]`: reduced index, `None` for constrained unknowns.
    pub full_to_reduced: Vec<Option<usize>>,
    pub fixed: BTreeMap<usize, f64>,
}

impl BlockSystem {
    pub fn new<S: Into<String>>(groups: impl IntoIterator<Item = (S, usize)>) -> Self {
        let mut names = Vec::new();
        let mut offsets = vec![0];
        for (name, size) in groups {
            names.push(name.into());
            offsets.push(offsets.last().unwrap() + size);
        }
        let n = *offsets.last().unwrap();
        BlockSystem {
            names,
            offsets,
            blocks: Vec::new(),
            rhs: vec![0.0; n],
            constraints: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn group(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown group `{name}`")))
    }

    pub fn group_size(&self, g: usize) -> usize {
        self.offsets[g + 1] - self.offsets[g]
    }

    pub fn group_range(&self, name: &str) -> Result<std::ops::Range<usize>> {
        let g = self.group(name)?;
        Ok(self.offsets[g]..self.offsets[g + 1])
    }

    /// Adds `m` into the (row, col) block; repeated blocks accumulate.
    pub fn add_block(&mut self, row: &str, col: &str, m: SparseMatrix) -> Result<()> {
        let (r, c) = (self.group(row)?, self.group(col)?);
        if m.nrows() != self.group_size(r) || m.ncols() != self.group_size(c) {
            return Err(Error::Dimension(format!(
                "block ({row},{col}) is {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                self.group_size(r),
                self.group_size(c)
            )));
        }
        self.blocks.push((r, c, m));
        Ok(())
    }

    pub fn add_rhs(&mut self, group: &str, values: &[f64]) -> Result<()> {
        let range = self.group_range(group)?;
        if values.len() != range.len() {
            return Err(Error::Dimension(format!(
                "rhs for `{group}` has length {}, expected {}",
                values.len(),
                range.len()
            )));
        }
        for (dst, v) in self.rhs[range].iter_mut().zip(values) {
            *dst += v;
        }
        Ok(())
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Fixes unknown `local` of `group` to `value`. Each unknown can be fixed once.
    pub fn constrain(&mut self, group: &str, local: usize, value: f64) -> Result<()> {
        let range = self.group_range(group)?;
        if local >= range.len() {
            return Err(Error::InvalidArgument(format!(
                "constraint index {local} outside `{group}`"
            )));
        }
        let idx = range.start + local;
        if self.constraints.insert(idx, value).is_some() {
            return Err(Error::InvalidArgument(format!(
                "unknown {local} of `{group}` constrained twice"
            )));
        }
        Ok(())
    }

    pub fn constraints(&self) -> &BTreeMap<usize, f64> {
        &self.constraints
    }

    /// The monolithic matrix with every block placed at its offsets.
    pub fn monolithic(&self) -> SparseMatrix {
        let n = self.dim();
        let cap = self.blocks.iter().map(|b| b.2.nnz()).sum();
        let mut entries = Vec::with_capacity(cap);
        for (r, c, m) in &self.blocks {
            let (ro, co) = (self.offsets[*r], self.offsets[*c]);
            entries.extend(m.triplets().map(|(i, j, v)| (ro + i, co + j, v)));
        }
        SparseMatrix::from_triplets(n, n, entries)
    }

    /// Removes constrained rows and columns, moving their contributions to the rhs.
    pub fn assemble(&self) -> ReducedSystem {
        let full = self.monolithic();
        let n = self.dim();
        let mut full_to_reduced = vec![None; n];
        let mut free = Vec::with_capacity(n - self.constraints.len());
        for i in 0..n {
            if !self.constraints.contains_key(&i) {
                full_to_reduced[i] = Some(free.len());
                free.push(i);
            }
        }
        let mut rhs: Vec<f64> = free.iter().map(|&i| self.rhs[i]).collect();
        let mut entries = Vec::with_capacity(full.nnz());
        for (ri, &i) in free.iter().enumerate() {
            for (j, v) in full.row(i) {
                match full_to_reduced[j] {
                    Some(rj) => entries.push((ri, rj, v)),
                    None => rhs[ri] -= v * self.constraints[&j],
                }
            }
        }
        let matrix = SparseMatrix::from_triplets(free.len(), free.len(), entries);
        ReducedSystem {
            matrix,
            rhs,
            free,
            full_to_reduced,
            fixed: self.constraints.clone(),
        }
    }
}

impl ReducedSystem {
    /// Full-length vector: reduced values in free slots, constraint values copied verbatim.
    pub fn reconstruct(&self, reduced: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.full_to_reduced.len()];
        for (k, &i) in self.free.iter().enumerate() {
            x[i] = reduced[k];
        }
        for (&i, &v) in &self.fixed {
            x[i] = v;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_blocks_give_identity() {
        let mut sys = BlockSystem::new([("a", 2), ("b", 3)]);
        sys.add_block("a", "a", SparseMatrix::identity(2)).unwrap();
        sys.add_block("b", "b", SparseMatrix::identity(3)).unwrap();
        let red = sys.assemble();
        assert_eq!(red.matrix, SparseMatrix::identity(5));
    }

    #[test]
    fn constrained_value_survives_reconstruction() {
        let mut sys = BlockSystem::new([("a", 3)]);
        sys.add_block("a", "a", SparseMatrix::identity(3)).unwrap();
        let v = 0.1 + 0.2;
        sys.constrain("a", 1, v).unwrap();
        let red = sys.assemble();
        assert_eq!(red.matrix.nrows(), 2);
        let full = red.reconstruct(&[5.0, 6.0]);
        assert_eq!(full[1].to_bits(), v.to_bits());
        assert_eq!((full[0], full[2]), (5.0, 6.0));
    }

    #[test]
    fn elimination_moves_coupling_to_rhs() {
        let mut sys = BlockSystem::new([("a", 2)]);
        sys.add_block(
            "a",
            "a",
            SparseMatrix::from_dense(2, 2, &[2.0, 1.0, 1.0, 3.0]),
        )
        .unwrap();
        sys.add_rhs("a", &[4.0, 5.0]).unwrap();
        sys.constrain("a", 1, 2.0).unwrap();
        let red = sys.assemble();
        assert_eq!(red.rhs, vec![2.0]);
    }

    #[test]
    fn rejects_bad_blocks_and_double_constraints() {
        let mut sys = BlockSystem::new([("a", 2), ("b", 1)]);
        assert!(sys.add_block("a", "b", SparseMatrix::identity(2)).is_err());
        assert!(sys.add_block("a", "c", SparseMatrix::identity(2)).is_err());
        sys.constrain("b", 0, 1.0).unwrap();
        assert!(sys.constrain("b", 0, 1.0).is_err());
        assert!(sys.constrain("b", 1, 1.0).is_err());
    }
}
