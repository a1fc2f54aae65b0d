//! Subspaces of GF(q)^m in canonical reduced row-echelon form.
//!
//! Every dimension statement about stored content is measured here: a node
//! "stores" the GF(q)-span of the x-coordinates of its points.

use thiserror::Error;

use crate::gf::{BaseField, BaseSymbol, ExtField, FieldElement};
use crate::linpoly::EvalPoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubspaceError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
}

/// Reduces `rows` in place to reduced row-echelon form and drops zero rows.
/// Returns the pivot column of each surviving row.
pub fn rref(base: &BaseField, rows: &mut Vec<Vec<BaseSymbol>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = base.inv(rows[rank][col]).expect("pivot is nonzero");
        base.scale_in_place(inv, &mut rows[rank][col..]);
        let pivot_row = std::mem::take(&mut rows[rank]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = row[col];
                base.axpy(c, &pivot_row[col..], &mut row[col..]);
            }
        }
        rows[rank] = pivot_row;
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

/// Rank of a list of vectors over the base field.
pub fn rank(base: &BaseField, vectors: &[Vec<BaseSymbol>]) -> usize {
    let mut rows = vectors.to_vec();
    rref(base, &mut rows).len()
}

/// A subspace of GF(q)^m held as its unique reduced row-echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    ambient: usize,
    rows: Vec<Vec<BaseSymbol>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Span of arbitrary vectors of length `ambient`.
    pub fn from_vectors(base: &BaseField, ambient: usize, vectors: Vec<Vec<BaseSymbol>>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient));
        let mut rows = vectors;
        let pivots = rref(base, &mut rows);
        Self { ambient, rows, pivots }
    }

    pub fn from_elements<'a>(
        field: &ExtField,
        elements: impl IntoIterator<Item = &'a FieldElement>,
    ) -> Self {
        let rows = elements.into_iter().map(|e| e.as_base_vector().to_vec()).collect();
        Self::from_vectors(field.base(), field.degree(), rows)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rows(&self) -> &[Vec<BaseSymbol>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Whether `v` lies in the subspace.
    pub fn contains(&self, base: &BaseField, v: &[BaseSymbol]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = w[p];
            if c != 0 {
                base.axpy(c, &row[p..], &mut w[p..]);
            }
        }
        w.iter().all(|&c| c == 0)
    }

    /// Reduces `v` against the basis; returns `None` when `v` is already in
    /// the span, otherwise extends the basis and returns the new dimension.
    pub fn try_extend(&mut self, base: &BaseField, v: &[BaseSymbol]) -> Option<usize> {
        if self.contains(base, v) {
            return None;
        }
        let mut rows = std::mem::take(&mut self.rows);
        rows.push(v.to_vec());
        self.pivots = rref(base, &mut rows);
        self.rows = rows;
        Some(self.dim())
    }

    fn check_ambient(&self, other: &Self) -> Result<(), SubspaceError> {
        if self.ambient != other.ambient {
            return Err(SubspaceError::AmbientMismatch { left: self.ambient, right: other.ambient });
        }
        Ok(())
    }

    pub fn sum(&self, base: &BaseField, other: &Self) -> Result<Self, SubspaceError> {
        self.check_ambient(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self::from_vectors(base, self.ambient, rows))
    }

    /// Intersection by Zassenhaus: row-reduce `[[A, A], [B, 0]]`; rows whose
    /// left half vanishes carry a basis of `A ∩ B` in their right half.
    pub fn intersect(&self, base: &BaseField, other: &Self) -> Result<Self, SubspaceError> {
        self.check_ambient(other)?;
        let m = self.ambient;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(m));
        }
        let mut block: Vec<Vec<BaseSymbol>> = Vec::with_capacity(self.dim() + other.dim());
        for row in &self.rows {
            let mut r = row.clone();
            r.extend_from_slice(row);
            block.push(r);
        }
        for row in &other.rows {
            let mut r = row.clone();
            r.resize(2 * m, 0);
            block.push(r);
        }
        let pivots = rref(base, &mut block);
        let meet = block
            .into_iter()
            .zip(pivots)
            .filter(|&(_, p)| p >= m)
            .map(|(r, _)| r[m..].to_vec())
            .collect();
        Ok(Self::from_vectors(base, m, meet))
    }

    /// Sum of several subspaces; an empty list gives the zero subspace.
    pub fn sum_all<'a>(
        base: &BaseField,
        ambient: usize,
        parts: impl IntoIterator<Item = &'a SubspaceBasis>,
    ) -> Self {
        let rows = parts.into_iter().flat_map(|s| s.rows.iter().cloned()).collect();
        Self::from_vectors(base, ambient, rows)
    }
}

/// Span of the x-coordinates of a set of points.
pub fn span_of(field: &ExtField, points: &[EvalPoint]) -> SubspaceBasis {
    SubspaceBasis::from_elements(field, points.iter().map(|p| &p.x))
}

/// Dimension of the GF(q)-span of a list of extension elements.
pub fn rank_of_vectors(field: &ExtField, xs: &[FieldElement]) -> usize {
    SubspaceBasis::from_elements(field, xs).dim()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> BaseField {
        BaseField::new(1).unwrap()
    }

    fn span(vs: &[&[u8]]) -> SubspaceBasis {
        SubspaceBasis::from_vectors(&gf2(), vs[0].len(), vs.iter().map(|v| v.to_vec()).collect())
    }

    #[test]
    fn hand_checked_intersection_in_gf2_cubed() {
        let f = gf2();
        let a = span(&[&[1, 0, 0], &[0, 1, 0]]);
        let b = span(&[&[0, 1, 0], &[0, 0, 1]]);
        let meet = a.intersect(&f, &b).unwrap();
        assert_eq!(meet.dim(), 1);
        assert_eq!(meet.rows(), &[vec![0, 1, 0]]);
        assert_eq!(a.intersect(&f, &a).unwrap(), a);
    }

    #[test]
    fn sum_identities() {
        let f = gf2();
        let a = span(&[&[1, 1, 0, 1], &[0, 1, 1, 0]]);
        let zero = SubspaceBasis::zero(4);
        assert_eq!(a.sum(&f, &zero).unwrap(), a);
        assert_eq!(a.sum(&f, &a).unwrap(), a);
    }

    #[test]
    fn canonical_form_is_basis_independent() {
        let a = span(&[&[1, 1, 0, 1], &[0, 1, 1, 0]]);
        let b = span(&[&[1, 0, 1, 1], &[0, 1, 1, 0], &[1, 1, 0, 1]]);
        assert_eq!(a, b);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let f = gf2();
        let a = SubspaceBasis::zero(3);
        let b = SubspaceBasis::zero(4);
        assert_eq!(
            a.sum(&f, &b).unwrap_err(),
            SubspaceError::AmbientMismatch { left: 3, right: 4 }
        );
        assert!(a.intersect(&f, &b).is_err());
    }

    #[test]
    fn ranks_of_simple_lists() {
        let field = ExtField::new(BaseField::new(4).unwrap(), 5).unwrap();
        let basis: Vec<_> = (0..5).map(|i| field.basis(i)).collect();
        assert_eq!(rank_of_vectors(&field, &basis), 5);
        assert_eq!(rank_of_vectors(&field, &[field.zero()]), 0);
        assert_eq!(span_of(&field, &[]).dim(), 0);
        let p = EvalPoint { x: field.basis(2), y: field.one() };
        assert_eq!(span_of(&field, &[p.clone(), p]).dim(), 1);
    }

    #[test]
    fn try_extend_grows_only_on_new_directions() {
        let f = gf2();
        let mut s = SubspaceBasis::zero(3);
        assert_eq!(s.try_extend(&f, &[1, 1, 0]), Some(1));
        assert_eq!(s.try_extend(&f, &[1, 1, 0]), None);
        assert_eq!(s.try_extend(&f, &[0, 0, 0]), None);
        assert_eq!(s.try_extend(&f, &[0, 1, 0]), Some(2));
        assert!(s.contains(&f, &[1, 0, 0]));
    }
}
