//! Recover a linearized polynomial from evaluations at independent points,
//! and evaluate it at a GF(q)-combination of them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regen::gf::{BaseField, ExtField};
use regen::linpoly::{combine_points, interpolate, LinearizedPoly};

fn main() {
    let field = ExtField::new(BaseField::new(8).unwrap(), 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let terms = 8;
    let f = LinearizedPoly::random(&field, terms, &mut rng);

    let points: Vec<_> = (0..terms).map(|i| f.point_at(&field, field.basis(i))).collect();
    let g = interpolate(&field, &points).expect("independent x-coordinates");
    assert_eq!(f, g);
    println!("interpolated {terms} coefficients from {terms} points");

    // A combination of points is again a point on f.
    let coeffs: Vec<u8> = (1..=terms as u8).collect();
    let mixed = combine_points(&field, &points, &coeffs).unwrap();
    assert!(f.contains(&field, &mixed));
    println!("combined point lies on f");

    // Dependent x-coordinates do not determine f.
    let mut dependent = points.clone();
    dependent[terms - 1] = combine_points(&field, &points[..2], &[1, 1]).unwrap();
    println!("dependent points: {}", interpolate(&field, &dependent).unwrap_err());
}
