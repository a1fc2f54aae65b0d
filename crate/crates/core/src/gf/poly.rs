//! Dense univariate polynomials over the base field, stored low degree first.
//!
//! These back the extension-field multiply, inversion and the irreducibility
//! search. Nothing here is exposed outside the `gf` module.

use super::BaseField;

/// Below this many coefficients, multiplication falls back to schoolbook.
pub(crate) const KARATSUBA_THRESHOLD: usize = 32;

pub(crate) fn trim(v: &mut Vec<u8>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn degree(v: &[u8]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

pub(crate) fn add_into(acc: &mut Vec<u8>, other: &[u8]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

pub(crate) fn mul_schoolbook(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai != 0 {
            f.axpy(ai, b, &mut out[i..i + b.len()]);
        }
    }
    out
}

/// Karatsuba product of two equal-length operands; result has `2n - 1` terms.
pub(crate) fn mul_karatsuba(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < KARATSUBA_THRESHOLD {
        return mul_schoolbook(f, a, b);
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let hi = n - h;

    let z0 = mul_karatsuba(f, a0, b0);
    let z2 = mul_karatsuba(f, a1, b1);

    let mut sa = a1.to_vec();
    let mut sb = b1.to_vec();
    for i in 0..h {
        sa[i] ^= a0[i];
        sb[i] ^= b0[i];
    }
    let mut z1 = mul_karatsuba(f, &sa, &sb);
    debug_assert_eq!(z1.len(), 2 * hi - 1);
    for (i, &c) in z0.iter().enumerate() {
        z1[i] ^= c;
    }
    for (i, &c) in z2.iter().enumerate() {
        z1[i] ^= c;
    }

    let mut out = vec![0u8; 2 * n - 1];
    for (i, &c) in z0.iter().enumerate() {
        out[i] ^= c;
    }
    for (i, &c) in z1.iter().enumerate() {
        out[i + h] ^= c;
    }
    for (i, &c) in z2.iter().enumerate() {
        out[i + 2 * h] ^= c;
    }
    out
}

/// Quotient and remainder of `a / b`; `b` must be nonzero.
pub(crate) fn divrem(f: &BaseField, a: &[u8], b: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    let mut rem = a.to_vec();
    trim(&mut rem);
    let Some(da) = degree(&rem) else {
        return (Vec::new(), Vec::new());
    };
    if da < db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0u8; da - db + 1];
    for i in (db..=da).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        let t = f.mul(c, lead_inv);
        quot[i - db] = t;
        f.axpy(t, &b[..=db], &mut rem[i - db..=i]);
    }
    trim(&mut rem);
    (quot, rem)
}

pub(crate) fn rem(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    divrem(f, a, b).1
}

pub(crate) fn gcd(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    x
}

pub(crate) fn mulmod(f: &BaseField, a: &[u8], b: &[u8], modulus: &[u8]) -> Vec<u8> {
    rem(f, &mul_schoolbook(f, a, b), modulus)
}

fn is_unit(v: &[u8]) -> bool {
    degree(v) == Some(0)
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Columns of the q-power map modulo `modulus`: entry `[j * m + i]` is
/// coefficient `i` of `(X^j)^q mod modulus`.
pub(crate) fn frobenius_matrix(f: &BaseField, modulus: &[u8]) -> Vec<u8> {
    let m = modulus.len() - 1;
    let xq = x_pow_q(f, modulus);
    let mut mat = vec![0u8; m * m];
    let mut col = vec![1u8];
    for j in 0..m {
        mat[j * m..j * m + col.len()].copy_from_slice(&col);
        col = mulmod(f, &col, &xq, modulus);
    }
    mat
}

pub(crate) fn apply_matrix(f: &BaseField, mat: &[u8], m: usize, v: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; m];
    for (j, &c) in v.iter().enumerate() {
        if c != 0 {
            f.axpy(c, &mat[j * m..(j + 1) * m], &mut out);
        }
    }
    out
}

/// `X^q mod modulus` by `b` repeated squarings of `X`.
fn x_pow_q(f: &BaseField, modulus: &[u8]) -> Vec<u8> {
    let mut acc = rem(f, &[0, 1], modulus);
    for _ in 0..f.bits() {
        acc = mulmod(f, &acc, &acc, modulus);
    }
    acc
}

/// Rabin's irreducibility test for a monic polynomial over the base field.
pub(crate) fn is_irreducible(f: &BaseField, modulus: &[u8]) -> bool {
    let Some(m) = degree(modulus) else {
        return false;
    };
    if m == 0 || modulus[m] != 1 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let modulus = &modulus[..=m];
    let x = vec![0u8, 1];

    // Cheap filter: no roots in the base field.
    let mut h = x_pow_q(f, modulus);
    add_into(&mut h, &x);
    if !is_unit(&gcd(f, &h, modulus)) {
        return false;
    }

    let mat = frobenius_matrix(f, modulus);
    let iterate = |t: usize| {
        let mut v = vec![0u8; m];
        v[1] = 1;
        for _ in 0..t {
            v = apply_matrix(f, &mat, m, &v);
        }
        v
    };
    for p in prime_factors(m) {
        let mut h = iterate(m / p);
        add_into(&mut h, &x);
        if !is_unit(&gcd(f, &h, modulus)) {
            return false;
        }
    }
    let full = iterate(m);
    full[0] == 0 && full[1] == 1 && full[2..].iter().all(|&c| c == 0)
}

/// Low coefficients randomized per candidate when searching for a modulus.
const SEARCH_WIDTH: usize = 16;

/// First irreducible polynomial in a candidate stream seeded by `(b, m)`.
///
/// Candidates are monic of degree `m` with random coefficients on
/// `1, X, ..., X^15` and zeros elsewhere. Sparse tails of the form
/// `X^m + c_1 X + c_0` are systematically reducible for many `m`, which is
/// why the low block is dense.
pub(crate) fn search_irreducible(f: &BaseField, m: usize) -> Vec<u8> {
    use rand::{Rng, SeedableRng};
    let seed = ((f.bits() as u64) << 32) | m as u64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let q = f.order();
    let width = m.min(SEARCH_WIDTH);
    loop {
        let mut candidate = vec![0u8; m + 1];
        candidate[m] = 1;
        for c in candidate.iter_mut().take(width) {
            *c = rng.gen_range(0..q) as u8;
        }
        if candidate[0] != 0 && is_irreducible(f, &candidate) {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16() -> BaseField {
        BaseField::new(4).unwrap()
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let f = BaseField::new(8).unwrap();
        for n in [1usize, 2, 31, 32, 33, 50, 100, 127] {
            let a: Vec<u8> = (0..n).map(|i| (i * 37 + 11) as u8).collect();
            let b: Vec<u8> = (0..n).map(|i| (i * 91 + 3) as u8).collect();
            assert_eq!(mul_karatsuba(&f, &a, &b), mul_schoolbook(&f, &a, &b), "n = {n}");
        }
    }

    #[test]
    fn divrem_reconstructs_dividend() {
        let f = gf16();
        let a = vec![3u8, 7, 0, 9, 12, 1];
        let b = vec![5u8, 0, 2];
        let (q, r) = divrem(&f, &a, &b);
        let mut back = mul_schoolbook(&f, &q, &b);
        add_into(&mut back, &r);
        trim(&mut back);
        assert_eq!(back, a);
        assert!(degree(&r).is_none_or(|d| d < 2));
    }

    #[test]
    fn irreducibility_small_cases() {
        let f = BaseField::new(1).unwrap();
        // Over GF(2): x^2+x+1 irreducible, x^2+1 = (x+1)^2 is not.
        assert!(is_irreducible(&f, &[1, 1, 1]));
        assert!(!is_irreducible(&f, &[1, 0, 1]));
        // x^4+x+1 irreducible; x^4+x^2+1 = (x^2+x+1)^2 has no roots but factors.
        assert!(is_irreducible(&f, &[1, 1, 0, 0, 1]));
        assert!(!is_irreducible(&f, &[1, 0, 1, 0, 1]));
    }

    #[test]
    fn irreducible_counts_over_gf2() {
        // Necklace count: 2, 1, 2, 3, 6 irreducible polynomials of degree 1..=5.
        let f = BaseField::new(1).unwrap();
        for (m, expected) in [(1usize, 2usize), (2, 1), (3, 2), (4, 3), (5, 6)] {
            let count = (0u32..1 << m)
                .filter(|tail| {
                    let mut p: Vec<u8> = (0..m).map(|i| ((tail >> i) & 1) as u8).collect();
                    p.push(1);
                    is_irreducible(&f, &p)
                })
                .count();
            assert_eq!(count, expected, "degree {m}");
        }
    }

    #[test]
    fn search_is_deterministic_and_irreducible() {
        let f = BaseField::new(8).unwrap();
        let a = search_irreducible(&f, 24);
        assert_eq!(a, search_irreducible(&f, 24));
        assert_eq!(a.len(), 25);
        assert!(is_irreducible(&f, &a));
    }
}
