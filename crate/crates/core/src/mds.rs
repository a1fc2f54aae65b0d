//! Systematic MDS generators `[I | P]` over the base field with a Cauchy
//! parity block.
//!
//! Three codes are built from this: the per-node `(n-1, alpha)` storage code,
//! the `(2r, r)` repair code in MBR mode and the `(3r, 2r)` repair code at the
//! interior point. The repair matrix is the parity block of the latter two.

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::gf::{BaseField, BaseSymbol, ExtField};
use crate::linpoly::{linear_combination, Combine};
use crate::subspace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MdsError {
    #[error("field too small for code length: n = {n_len} > q = {q}")]
    FieldTooSmall { n_len: usize, q: usize },
    #[error("invalid code dimensions: k = {k_dim}, n = {n_len}")]
    BadDimensions { k_dim: usize, n_len: usize },
    #[error("expected {expected} input rows, got {got}")]
    RowCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicGenerator {
    k_dim: usize,
    n_len: usize,
    /// `k_dim x (n_len - k_dim)`
    parity: Vec<Vec<BaseSymbol>>,
}

/// `parity[i][j] = 1 / (u_i + v_j)` with `u_i = i`, `v_j = k + j` read as
/// field elements.
pub fn make_cauchy_generator(
    base: &BaseField,
    k_dim: usize,
    n_len: usize,
) -> Result<SystematicGenerator, MdsError> {
    if k_dim == 0 || k_dim >= n_len {
        return Err(MdsError::BadDimensions { k_dim, n_len });
    }
    if n_len > base.order() {
        return Err(MdsError::FieldTooSmall { n_len, q: base.order() });
    }
    let parity = (0..k_dim)
        .map(|i| {
            (0..n_len - k_dim)
                .map(|j| {
                    let u = i as BaseSymbol;
                    let v = (k_dim + j) as BaseSymbol;
                    base.inv(base.add(u, v)).expect("u_i and v_j are distinct")
                })
                .collect()
        })
        .collect();
    Ok(SystematicGenerator { k_dim, n_len, parity })
}

impl SystematicGenerator {
    /// Rebuilds a generator from a stored parity block.
    pub fn from_parity(k_dim: usize, n_len: usize, parity: Vec<Vec<BaseSymbol>>) -> Result<Self, MdsError> {
        if k_dim == 0
            || k_dim >= n_len
            || parity.len() != k_dim
            || parity.iter().any(|r| r.len() != n_len - k_dim)
        {
            return Err(MdsError::BadDimensions { k_dim, n_len });
        }
        Ok(Self { k_dim, n_len, parity })
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn n_len(&self) -> usize {
        self.n_len
    }

    pub fn parity(&self) -> &[Vec<BaseSymbol>] {
        &self.parity
    }

    /// Column `j` of `[I | parity]`, length `k_dim`.
    pub fn column(&self, j: usize) -> Vec<BaseSymbol> {
        if j < self.k_dim {
            let mut e = vec![0; self.k_dim];
            e[j] = 1;
            e
        } else {
            self.parity.iter().map(|row| row[j - self.k_dim]).collect()
        }
    }

    pub fn is_systematic_position(&self, j: usize) -> bool {
        j < self.k_dim
    }

    /// Output `j` is the combination of the inputs by column `j`. The first
    /// `k_dim` outputs are the inputs themselves.
    pub fn encode_rows<T: Combine>(&self, field: &ExtField, rows: &[T]) -> Result<Vec<T>, MdsError> {
        if rows.len() != self.k_dim {
            return Err(MdsError::RowCount { expected: self.k_dim, got: rows.len() });
        }
        let mut out = rows.to_vec();
        for j in self.k_dim..self.n_len {
            let col = self.column(j);
            out.push(linear_combination(field, rows, &col).expect("column length equals k_dim"));
        }
        Ok(out)
    }

    fn columns_full_rank(&self, base: &BaseField, cols: &[usize]) -> bool {
        let vecs: Vec<Vec<BaseSymbol>> = cols.iter().map(|&j| self.column(j)).collect();
        subspace::rank(base, &vecs) == self.k_dim
    }

    /// Checks every `k_dim`-subset of columns for full rank. Returns the first
    /// failing subset, if any.
    pub fn mds_violation_exhaustive(&self, base: &BaseField) -> Option<Vec<usize>> {
        combinations(self.n_len, self.k_dim).find(|cols| !self.columns_full_rank(base, cols))
    }

    /// Same check over `samples` uniformly drawn column subsets.
    pub fn mds_violation_sampled<R: Rng + ?Sized>(
        &self,
        base: &BaseField,
        samples: usize,
        rng: &mut R,
    ) -> Option<Vec<usize>> {
        (0..samples).find_map(|_| {
            let mut cols = sample(rng, self.n_len, self.k_dim).into_vec();
            cols.sort_unstable();
            (!self.columns_full_rank(base, &cols)).then_some(cols)
        })
    }

    /// Exhaustively checks that every square submatrix of the parity block up
    /// to `max_size` is invertible. Returns `(rows, cols)` of a singular one.
    pub fn singular_parity_minor(
        &self,
        base: &BaseField,
        max_size: usize,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let pr = self.k_dim;
        let pc = self.n_len - self.k_dim;
        for s in 1..=max_size.min(pr).min(pc) {
            for rows in combinations(pr, s) {
                for cols in combinations(pc, s) {
                    let minor: Vec<Vec<BaseSymbol>> = rows
                        .iter()
                        .map(|&i| cols.iter().map(|&j| self.parity[i][j]).collect())
                        .collect();
                    if subspace::rank(base, &minor) != s {
                        return Some((rows, cols.clone()));
                    }
                }
            }
        }
        None
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}
