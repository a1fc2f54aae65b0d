//! Arithmetic in GF(256^24): inverses, Frobenius, and GF(256)-linearity of
//! the q-power map.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regen::gf::{BaseField, ExtField};

fn main() {
    let base = BaseField::new(8).expect("GF(256)");
    let field = ExtField::new(base, 24).expect("irreducible modulus");
    println!("modulus: {}", hex::encode(field.modulus()));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = field.random_nonzero(&mut rng);
    let b = field.random(&mut rng);
    let inv = field.inv(&a).expect("nonzero");
    assert_eq!(field.mul(&a, &inv), field.one());
    println!("a      = {}", field.to_hex(&a));
    println!("a^-1   = {}", field.to_hex(&inv));

    // x -> x^q is additive and fixes GF(q).
    let q = field.base().order() as u128;
    let lhs = field.pow(&field.add(&a, &b), q);
    let rhs = field.add(&field.pow(&a, q), &field.pow(&b, q));
    assert_eq!(lhs, rhs);
    assert_eq!(field.frobenius(&a, 1), field.pow(&a, q));
    let c = field.constant(0x53);
    assert_eq!(field.frobenius(&c, 1), c);
    println!("frobenius checks passed");
}
