//! Linearized polynomials `f(x) = sum_i c_i x^{q^i}` over GF(q^m).
//!
//! `f` is GF(q)-linear, so any GF(q)-combination of points on `f` is again a
//! point on `f`. Recovery from `P` evaluations at GF(q)-independent points is
//! a Moore-matrix solve.

use thiserror::Error;

use crate::gf::{BaseSymbol, ExtField, FieldElement};
use crate::subspace::SubspaceBasis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("{points} points but {coeffs} coefficients")]
    LengthMismatch { points: usize, coeffs: usize },
    #[error("interpolation needs at least one point")]
    NoPoints,
    #[error(
        "Moore matrix is singular: x-coordinate of point {index} lies in the span of points 0..{index}"
    )]
    Singular { index: usize },
    #[error("{terms} terms cannot be identified in a degree-{degree} extension")]
    TooManyTerms { terms: usize, degree: usize },
}

/// Values that GF(q)-linear maps can act on: field elements, points, and
/// multi-stripe points all combine coordinate-wise.
pub trait Combine: Clone {
    fn zero_like(&self, field: &ExtField) -> Self;
    fn add_scaled(&mut self, field: &ExtField, c: BaseSymbol, other: &Self);
}

impl Combine for FieldElement {
    fn zero_like(&self, field: &ExtField) -> Self {
        field.zero()
    }

    fn add_scaled(&mut self, field: &ExtField, c: BaseSymbol, other: &Self) {
        field.add_scaled(self, c, other);
    }
}

/// `sum_i coeffs[i] * items[i]`; `items` must be nonempty.
pub fn linear_combination<T: Combine>(
    field: &ExtField,
    items: &[T],
    coeffs: &[BaseSymbol],
) -> Result<T, PolyError> {
    if items.len() != coeffs.len() {
        return Err(PolyError::LengthMismatch { points: items.len(), coeffs: coeffs.len() });
    }
    let Some(first) = items.first() else {
        return Err(PolyError::NoPoints);
    };
    let mut acc = first.zero_like(field);
    for (item, &c) in items.iter().zip(coeffs) {
        acc.add_scaled(field, c, item);
    }
    Ok(acc)
}

/// A point `(x, f(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPoint {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl Combine for EvalPoint {
    fn zero_like(&self, field: &ExtField) -> Self {
        EvalPoint { x: field.zero(), y: field.zero() }
    }

    fn add_scaled(&mut self, field: &ExtField, c: BaseSymbol, other: &Self) {
        field.add_scaled(&mut self.x, c, &other.x);
        field.add_scaled(&mut self.y, c, &other.y);
    }
}

/// `(sum c_i x_i, sum c_i y_i)`.
pub fn combine_points(
    field: &ExtField,
    points: &[EvalPoint],
    coeffs: &[BaseSymbol],
) -> Result<EvalPoint, PolyError> {
    linear_combination(field, points, coeffs)
}

/// Coefficient `i` multiplies `x^{q^i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    coeffs: Vec<FieldElement>,
}

impl LinearizedPoly {
    pub fn new(coeffs: Vec<FieldElement>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }

    /// Number of terms P.
    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn random<R: rand::Rng + ?Sized>(field: &ExtField, terms: usize, rng: &mut R) -> Self {
        Self { coeffs: (0..terms).map(|_| field.random(rng)).collect() }
    }

    pub fn evaluate(&self, field: &ExtField, x: &FieldElement) -> FieldElement {
        let mut acc = field.zero();
        let mut power = x.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = field.frobenius(&power, 1);
            }
            if !c.is_zero() {
                field.add_assign(&mut acc, &field.mul(c, &power));
            }
        }
        acc
    }

    pub fn point_at(&self, field: &ExtField, x: FieldElement) -> EvalPoint {
        let y = self.evaluate(field, &x);
        EvalPoint { x, y }
    }

    pub fn contains(&self, field: &ExtField, p: &EvalPoint) -> bool {
        self.evaluate(field, &p.x) == p.y
    }
}

/// Recovers the unique `P`-term polynomial through `P` points with
/// GF(q)-independent x-coordinates.
pub fn interpolate(field: &ExtField, points: &[EvalPoint]) -> Result<LinearizedPoly, PolyError> {
    let xs: Vec<FieldElement> = points.iter().map(|p| p.x.clone()).collect();
    let ys: Vec<FieldElement> = points.iter().map(|p| p.y.clone()).collect();
    let mut polys = interpolate_many(field, &xs, &[ys])?;
    Ok(polys.pop().expect("one right-hand side"))
}

/// Interpolation against several value vectors sharing the same x-coordinates.
/// The Moore matrix is factored once.
pub fn interpolate_many(
    field: &ExtField,
    xs: &[FieldElement],
    ys: &[Vec<FieldElement>],
) -> Result<Vec<LinearizedPoly>, PolyError> {
    let p = xs.len();
    if p == 0 {
        return Err(PolyError::NoPoints);
    }
    for y in ys {
        if y.len() != p {
            return Err(PolyError::LengthMismatch { points: p, coeffs: y.len() });
        }
    }
    if p > field.degree() {
        return Err(PolyError::TooManyTerms { terms: p, degree: field.degree() });
    }
    let rhs_count = ys.len();

    // Row i: [x_i, x_i^q, ..., x_i^{q^{P-1}} | y_i^(0), y_i^(1), ...]
    let mut rows: Vec<Vec<FieldElement>> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut row = Vec::with_capacity(p + rhs_count);
            let mut power = x.clone();
            for j in 0..p {
                if j > 0 {
                    power = field.frobenius(&power, 1);
                }
                row.push(power.clone());
            }
            row.extend(ys.iter().map(|y| y[i].clone()));
            row
        })
        .collect();

    for col in 0..p {
        let Some(pivot) = (col..p).find(|&i| !rows[i][col].is_zero()) else {
            return Err(PolyError::Singular { index: dependent_index(field, xs) });
        };
        rows.swap(col, pivot);
        let inv = field.inv(&rows[col][col]).expect("pivot is nonzero");
        let pivot_row: Vec<FieldElement> =
            rows[col].iter().map(|e| field.mul(e, &inv)).collect();
        for row in rows.iter_mut().skip(col + 1) {
            let factor = row[col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in col..p + rhs_count {
                let t = field.mul(&factor, &pivot_row[j]);
                field.add_assign(&mut row[j], &t);
            }
        }
        rows[col] = pivot_row;
    }

    // Back substitution on the unit upper-triangular system.
    let mut out = Vec::with_capacity(rhs_count);
    for r in 0..rhs_count {
        let mut coeffs = vec![field.zero(); p];
        for i in (0..p).rev() {
            let mut acc = rows[i][p + r].clone();
            for j in i + 1..p {
                let t = field.mul(&rows[i][j], &coeffs[j]);
                field.add_assign(&mut acc, &t);
            }
            coeffs[i] = acc;
        }
        out.push(LinearizedPoly::new(coeffs));
    }
    Ok(out)
}

/// First index whose x-coordinate is in the span of the earlier ones.
fn dependent_index(field: &ExtField, xs: &[FieldElement]) -> usize {
    let mut span = SubspaceBasis::zero(field.degree());
    for (i, x) in xs.iter().enumerate() {
        if span.try_extend(field.base(), x.as_base_vector()).is_none() {
            return i;
        }
    }
    xs.len()
}

/// Greedily keeps items whose x-coordinate extends the span, in input order,
/// stopping at `limit`.
pub fn select_independent<'a, T>(
    field: &ExtField,
    items: impl IntoIterator<Item = &'a T>,
    x_of: impl Fn(&T) -> &FieldElement,
    limit: usize,
) -> Vec<&'a T>
where
    T: 'a,
{
    let mut span = SubspaceBasis::zero(field.degree());
    let mut chosen = Vec::new();
    for item in items {
        if chosen.len() == limit {
            break;
        }
        if span.try_extend(field.base(), x_of(item).as_base_vector()).is_some() {
            chosen.push(item);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::BaseField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> ExtField {
        ExtField::new(BaseField::new(4).unwrap(), 8).unwrap()
    }

    #[test]
    fn single_linear_term() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = f.random(&mut rng);
        let mut coeffs = vec![c.clone()];
        coeffs.extend(std::iter::repeat_n(f.zero(), 3));
        let poly = LinearizedPoly::new(coeffs);
        let x = f.random(&mut rng);
        assert_eq!(poly.evaluate(&f, &x), f.mul(&c, &x));
        assert_eq!(poly.evaluate(&f, &f.zero()), f.zero());
    }

    #[test]
    fn one_point_interpolation() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x0 = f.random_nonzero(&mut rng);
        let y0 = f.random(&mut rng);
        let poly = interpolate(&f, &[EvalPoint { x: x0.clone(), y: y0.clone() }]).unwrap();
        assert_eq!(poly.coeffs(), &[f.mul(&y0, &f.inv(&x0).unwrap())]);
    }

    #[test]
    fn dependent_pair_is_singular() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let poly = LinearizedPoly::random(&f, 2, &mut rng);
        let x1 = f.random_nonzero(&mut rng);
        let x2 = f.scale(7, &x1);
        let pts = [poly.point_at(&f, x1), poly.point_at(&f, x2)];
        assert_eq!(interpolate(&f, &pts), Err(PolyError::Singular { index: 1 }));
    }

    #[test]
    fn combine_points_edge_cases() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let poly = LinearizedPoly::random(&f, 3, &mut rng);
        let p = poly.point_at(&f, f.random(&mut rng));
        assert_eq!(combine_points(&f, std::slice::from_ref(&p), &[1]).unwrap(), p);
        let z = combine_points(&f, &[p.clone(), p.clone()], &[1, 1]).unwrap();
        assert!(z.x.is_zero() && z.y.is_zero());
        assert_eq!(
            combine_points(&f, &[p], &[1, 2]),
            Err(PolyError::LengthMismatch { points: 1, coeffs: 2 })
        );
    }

    #[test]
    fn shared_moore_matrix_for_many_stripes() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let polys: Vec<_> = (0..3).map(|_| LinearizedPoly::random(&f, 5, &mut rng)).collect();
        let xs: Vec<_> = (0..5).map(|i| f.basis(i)).collect();
        let ys: Vec<Vec<_>> =
            polys.iter().map(|p| xs.iter().map(|x| p.evaluate(&f, x)).collect()).collect();
        assert_eq!(interpolate_many(&f, &xs, &ys).unwrap(), polys);
    }

    #[test]
    fn select_independent_skips_dependent_inputs() {
        let f = field();
        let xs = vec![f.basis(0), f.basis(0), f.add(&f.basis(0), &f.basis(1)), f.basis(1), f.basis(2)];
        let chosen = select_independent(&f, &xs, |x| x, 3);
        assert_eq!(chosen, vec![&xs[0], &xs[2], &xs[4]]);
    }
}
