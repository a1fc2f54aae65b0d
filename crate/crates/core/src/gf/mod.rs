//! Finite-field arithmetic: the base field GF(2^b) and its degree-m extension.
//!
//! Base symbols are plain bytes. Extension elements are length-`m` vectors of
//! base symbols in the polynomial basis `1, X, ..., X^{m-1}` modulo a monic
//! irreducible polynomial over GF(2^b). The q-power (Frobenius) map is
//! GF(q)-linear, so it is precomputed once as an `m x m` matrix.

mod poly;

use std::fmt;

use thiserror::Error;

/// An element of GF(2^b), `b <= 8`.
pub type BaseSymbol = u8;

/// Extension degrees at or above this use Karatsuba multiplication.
pub const KARATSUBA_THRESHOLD: usize = poly::KARATSUBA_THRESHOLD;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("unsupported base field width b = {0} (supported: 1..=8)")]
    UnsupportedBaseBits(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("extension modulus is not a monic irreducible polynomial of degree {0}")]
    ReducibleModulus(usize),
    #[error("expected {expected} base symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("symbol {value} is out of range for GF(2^{bits})")]
    SymbolOutOfRange { value: u8, bits: u32 },
    #[error("expected {expected} bytes, got {got}")]
    ByteLength { expected: usize, got: usize },
    #[error("nonzero padding bits in encoded field element")]
    NonzeroPadding,
    #[error("invalid hex: {0}")]
    Hex(String),
}

// Primitive polynomials, bit i = coefficient of x^i.
const BASE_MODULI: [u16; 9] = [0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D];

/// GF(2^b) with full multiplication and inverse tables.
#[derive(Clone)]
pub struct BaseField {
    bits: u32,
    modulus: u16,
    mul: Box<[u8]>,
    inv: Box<[u8]>,
}

impl fmt::Debug for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.bits, self.modulus)
    }
}

fn clmul_reduce(a: u16, b: u16, bits: u32, modulus: u16) -> u8 {
    let mut acc: u32 = 0;
    for i in 0..bits {
        if (b >> i) & 1 == 1 {
            acc ^= (a as u32) << i;
        }
    }
    for i in (bits..2 * bits).rev() {
        if (acc >> i) & 1 == 1 {
            acc ^= (modulus as u32) << (i - bits);
        }
    }
    acc as u8
}

impl BaseField {
    /// GF(2^bits) using a fixed primitive modulus (x^4+x+1 for b=4,
    /// x^8+x^4+x^3+x^2+1 for b=8).
    pub fn new(bits: u32) -> Result<Self, FieldError> {
        if !(1..=8).contains(&bits) {
            return Err(FieldError::UnsupportedBaseBits(bits));
        }
        let modulus = BASE_MODULI[bits as usize];
        let q = 1usize << bits;
        let mut mul = vec![0u8; q * q].into_boxed_slice();
        for a in 0..q {
            for b in a..q {
                let p = clmul_reduce(a as u16, b as u16, bits, modulus);
                mul[a * q + b] = p;
                mul[b * q + a] = p;
            }
        }
        let mut inv = vec![0u8; q].into_boxed_slice();
        for a in 1..q {
            let b = (1..q).find(|&b| mul[a * q + b] == 1).expect("field modulus is irreducible");
            inv[a] = b as u8;
        }
        Ok(Self { bits, modulus, mul, inv })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The field size q = 2^b.
    pub fn order(&self) -> usize {
        1 << self.bits
    }

    pub fn modulus(&self) -> u16 {
        self.modulus
    }

    #[inline]
    pub fn add(&self, a: BaseSymbol, b: BaseSymbol) -> BaseSymbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: BaseSymbol, b: BaseSymbol) -> BaseSymbol {
        self.mul[((a as usize) << self.bits) | b as usize]
    }

    pub fn inv(&self, a: BaseSymbol) -> Result<BaseSymbol, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.inv[a as usize])
    }

    pub fn div(&self, a: BaseSymbol, b: BaseSymbol) -> Result<BaseSymbol, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn contains(&self, a: BaseSymbol) -> bool {
        (a as usize) < self.order()
    }

    /// `y += c * x`, element-wise.
    #[inline]
    pub fn axpy(&self, c: BaseSymbol, x: &[u8], y: &mut [u8]) {
        debug_assert_eq!(x.len(), y.len());
        match c {
            0 => {}
            1 => {
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi ^= xi;
                }
            }
            _ => {
                let q = self.order();
                let row = &self.mul[(c as usize) * q..(c as usize + 1) * q];
                for (yi, &xi) in y.iter_mut().zip(x) {
                    *yi ^= row[xi as usize];
                }
            }
        }
    }

    /// `x *= c`, element-wise.
    #[inline]
    pub fn scale_in_place(&self, c: BaseSymbol, x: &mut [u8]) {
        if c == 1 {
            return;
        }
        let q = self.order();
        let row = &self.mul[(c as usize) * q..(c as usize + 1) * q];
        for xi in x.iter_mut() {
            *xi = row[*xi as usize];
        }
    }
}

/// An element of GF(q^m): `m` base symbols, coefficient `i` multiplying `X^i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(Vec<u8>);

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", hex::encode(&self.0))
    }
}

impl FieldElement {
    /// The GF(q)-coordinate view of the element.
    pub fn as_base_vector(&self) -> &[BaseSymbol] {
        &self.0
    }

    pub fn into_base_vector(self) -> Vec<BaseSymbol> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// GF(q^m) over a fixed base field and modulus, with the Frobenius matrix
/// precomputed.
#[derive(Clone)]
pub struct ExtField {
    base: BaseField,
    degree: usize,
    modulus: Vec<u8>,
    tail: Vec<(usize, u8)>,
    frobenius: Vec<u8>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtField")
            .field("base", &self.base)
            .field("degree", &self.degree)
            .field("modulus", &hex::encode(&self.modulus))
            .finish()
    }
}

impl ExtField {
    /// GF(q^m) with a monic irreducible modulus of degree `m` found by a
    /// deterministic search seeded by `(b, m)`.
    pub fn new(base: BaseField, degree: usize) -> Result<Self, FieldError> {
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let modulus = poly::search_irreducible(&base, degree);
        Ok(Self::from_parts(base, modulus))
    }

    /// GF(q^m) with a caller-chosen modulus (low coefficient first, monic,
    /// length `m + 1`). Irreducibility is verified.
    pub fn with_modulus(base: BaseField, modulus: Vec<u8>) -> Result<Self, FieldError> {
        let degree = modulus.len().saturating_sub(1);
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if let Some(&v) = modulus.iter().find(|&&c| !base.contains(c)) {
            return Err(FieldError::SymbolOutOfRange { value: v, bits: base.bits() });
        }
        if modulus[degree] != 1 || !poly::is_irreducible(&base, &modulus) {
            return Err(FieldError::ReducibleModulus(degree));
        }
        Ok(Self::from_parts(base, modulus))
    }

    fn from_parts(base: BaseField, modulus: Vec<u8>) -> Self {
        let degree = modulus.len() - 1;
        let tail = modulus[..degree]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let frobenius = poly::frobenius_matrix(&base, &modulus);
        Self { base, degree, modulus, tail, frobenius }
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    /// Extension degree m.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic modulus, low coefficient first.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.degree])
    }

    pub fn one(&self) -> FieldElement {
        self.basis(0)
    }

    /// The basis element `X^i`.
    pub fn basis(&self, i: usize) -> FieldElement {
        assert!(i < self.degree, "basis index {i} out of range for degree {}", self.degree);
        let mut v = vec![0; self.degree];
        v[i] = 1;
        FieldElement(v)
    }

    /// Embeds a base symbol as a constant.
    pub fn constant(&self, c: BaseSymbol) -> FieldElement {
        let mut v = vec![0; self.degree];
        v[0] = c;
        FieldElement(v)
    }

    pub fn from_base_vector(&self, v: Vec<BaseSymbol>) -> Result<FieldElement, FieldError> {
        if v.len() != self.degree {
            return Err(FieldError::LengthMismatch { expected: self.degree, got: v.len() });
        }
        if let Some(&value) = v.iter().find(|&&c| !self.base.contains(c)) {
            return Err(FieldError::SymbolOutOfRange { value, bits: self.base.bits() });
        }
        Ok(FieldElement(v))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut out = a.clone();
        self.add_assign(&mut out, b);
        out
    }

    pub fn add_assign(&self, acc: &mut FieldElement, b: &FieldElement) {
        for (x, y) in acc.0.iter_mut().zip(&b.0) {
            *x ^= y;
        }
    }

    /// `acc += c * a` for a base-field scalar `c`.
    pub fn add_scaled(&self, acc: &mut FieldElement, c: BaseSymbol, a: &FieldElement) {
        self.base.axpy(c, &a.0, &mut acc.0);
    }

    /// Scalar multiplication by a base symbol; acts coefficient-wise.
    pub fn scale(&self, c: BaseSymbol, a: &FieldElement) -> FieldElement {
        let mut out = a.clone();
        self.base.scale_in_place(c, &mut out.0);
        out
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let m = self.degree;
        let mut prod = if m >= KARATSUBA_THRESHOLD {
            poly::mul_karatsuba(&self.base, &a.0, &b.0)
        } else {
            poly::mul_schoolbook(&self.base, &a.0, &b.0)
        };
        self.reduce(&mut prod);
        prod.truncate(m);
        prod.resize(m, 0);
        FieldElement(prod)
    }

    /// Schoolbook product regardless of degree.
    pub fn mul_schoolbook(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let m = self.degree;
        let mut prod = poly::mul_schoolbook(&self.base, &a.0, &b.0);
        self.reduce(&mut prod);
        prod.truncate(m);
        prod.resize(m, 0);
        FieldElement(prod)
    }

    fn reduce(&self, prod: &mut [u8]) {
        let m = self.degree;
        for i in (m..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for &(j, t) in &self.tail {
                prod[i - m + j] ^= self.base.mul(c, t);
            }
        }
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let f = &self.base;
        let mut r0 = self.modulus.clone();
        let mut r1 = a.0.clone();
        poly::trim(&mut r1);
        let mut s0: Vec<u8> = Vec::new();
        let mut s1: Vec<u8> = vec![1];
        while !r1.is_empty() {
            let (quot, rem) = poly::divrem(f, &r0, &r1);
            let mut s2 = poly::mul_schoolbook(f, &quot, &s1);
            poly::add_into(&mut s2, &s0);
            poly::trim(&mut s2);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is now a nonzero constant since the modulus is irreducible.
        let c_inv = f.inv(r0[0])?;
        let mut out = poly::rem(f, &s0, &self.modulus);
        f.scale_in_place(c_inv, &mut out);
        out.resize(self.degree, 0);
        Ok(FieldElement(out))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^e` by square-and-multiply.
    pub fn pow(&self, a: &FieldElement, mut e: u128) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^(q^t)`, applying the precomputed q-power matrix `t` times.
    pub fn frobenius(&self, a: &FieldElement, t: usize) -> FieldElement {
        let mut v = a.clone();
        for _ in 0..t {
            v = self.frobenius_once(&v);
        }
        v
    }

    fn frobenius_once(&self, a: &FieldElement) -> FieldElement {
        FieldElement(poly::apply_matrix(&self.base, &self.frobenius, self.degree, &a.0))
    }

    /// Width of the serialized form: `ceil(m * b / 8)` bytes.
    pub fn byte_len(&self) -> usize {
        (self.degree * self.base.bits() as usize).div_ceil(8)
    }

    /// Big-endian bit packing, coefficient 0 first, zero padded at the end.
    pub fn to_bytes(&self, a: &FieldElement) -> Vec<u8> {
        let bits = self.base.bits() as usize;
        if bits == 8 {
            return a.0.clone();
        }
        let mut out = vec![0u8; self.byte_len()];
        let mut pos = 0usize;
        for &c in &a.0 {
            for k in (0..bits).rev() {
                if (c >> k) & 1 == 1 {
                    out[pos / 8] |= 0x80 >> (pos % 8);
                }
                pos += 1;
            }
        }
        out
    }

    pub fn from_bytes(&self, bytes: &[u8]) -> Result<FieldElement, FieldError> {
        if bytes.len() != self.byte_len() {
            return Err(FieldError::ByteLength { expected: self.byte_len(), got: bytes.len() });
        }
        let bits = self.base.bits() as usize;
        if bits == 8 {
            return Ok(FieldElement(bytes.to_vec()));
        }
        let bit = |pos: usize| (bytes[pos / 8] >> (7 - pos % 8)) & 1;
        let mut v = Vec::with_capacity(self.degree);
        let mut pos = 0usize;
        for _ in 0..self.degree {
            let mut c = 0u8;
            for _ in 0..bits {
                c = (c << 1) | bit(pos);
                pos += 1;
            }
            v.push(c);
        }
        if (pos..bytes.len() * 8).any(|p| bit(p) == 1) {
            return Err(FieldError::NonzeroPadding);
        }
        Ok(FieldElement(v))
    }

    pub fn to_hex(&self, a: &FieldElement) -> String {
        hex::encode(self.to_bytes(a))
    }

    pub fn from_hex(&self, s: &str) -> Result<FieldElement, FieldError> {
        let bytes = hex::decode(s).map_err(|e| FieldError::Hex(e.to_string()))?;
        self.from_bytes(&bytes)
    }

    /// Number of whole payload bytes one element can carry: `floor(m * b / 8)`.
    pub fn payload_bytes(&self) -> usize {
        self.degree * self.base.bits() as usize / 8
    }

    /// Packs up to `payload_bytes()` bytes into an element, zero-filling the rest.
    pub fn from_payload(&self, payload: &[u8]) -> FieldElement {
        assert!(payload.len() <= self.payload_bytes());
        let mut bytes = vec![0u8; self.byte_len()];
        bytes[..payload.len()].copy_from_slice(payload);
        self.from_bytes(&bytes).expect("payload fits without touching padding bits")
    }

    /// Inverse of [`ExtField::from_payload`]; returns exactly `payload_bytes()` bytes.
    pub fn to_payload(&self, a: &FieldElement) -> Vec<u8> {
        let mut bytes = self.to_bytes(a);
        bytes.truncate(self.payload_bytes());
        bytes
    }

    /// A uniformly random element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let q = self.base.order();
        FieldElement((0..self.degree).map(|_| rng.gen_range(0..q) as u8).collect())
    }

    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let a = self.random(rng);
            if !a.is_zero() {
                return a;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf16() -> BaseField {
        BaseField::new(4).unwrap()
    }

    #[test]
    fn base_field_basics() {
        let f = BaseField::new(8).unwrap();
        for x in 0..=255u8 {
            assert_eq!(f.add(x, x), 0);
            assert_eq!(f.mul(1, x), x);
            if x != 0 {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
            }
        }
        assert_eq!(f.inv(0), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn gf16_worked_product() {
        // x * x^3 = x^4 = x + 1 mod x^4 + x + 1
        assert_eq!(gf16().mul(0b0010, 0b1000), 0b0011);
    }

    #[test]
    fn gf16_table_matches_bitwise_oracle() {
        // Shift-and-add with reduction on overflow, independent of the table builder.
        fn slow(mut a: u8, mut b: u8) -> u8 {
            let mut p = 0u8;
            while b != 0 {
                if b & 1 == 1 {
                    p ^= a;
                }
                a <<= 1;
                if a & 0x10 != 0 {
                    a ^= 0x13;
                }
                b >>= 1;
            }
            p
        }
        let f = gf16();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(f.mul(a, b), slow(a, b), "{a} * {b}");
            }
        }
    }

    #[test]
    fn unsupported_widths_rejected() {
        assert_eq!(BaseField::new(0).unwrap_err(), FieldError::UnsupportedBaseBits(0));
        assert_eq!(BaseField::new(9).unwrap_err(), FieldError::UnsupportedBaseBits(9));
    }

    #[test]
    fn extension_modulus_is_irreducible_and_reproducible() {
        let a = ExtField::new(gf16(), 6).unwrap();
        let b = ExtField::new(gf16(), 6).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert!(ExtField::with_modulus(gf16(), a.modulus().to_vec()).is_ok());
        // x^2 + 1 = (x + 1)^2 is reducible in characteristic 2.
        assert_eq!(
            ExtField::with_modulus(gf16(), vec![1, 0, 1]).unwrap_err(),
            FieldError::ReducibleModulus(2)
        );
    }

    #[test]
    fn inverse_law_and_zero_inverse() {
        let field = ExtField::new(BaseField::new(8).unwrap(), 40).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = field.random_nonzero(&mut rng);
            assert_eq!(field.mul(&a, &field.inv(&a).unwrap()), field.one());
        }
        assert_eq!(field.inv(&field.zero()), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn karatsuba_path_agrees_with_schoolbook() {
        let field = ExtField::new(BaseField::new(8).unwrap(), 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = field.random(&mut rng);
            let b = field.random(&mut rng);
            assert_eq!(field.mul(&a, &b), field.mul_schoolbook(&a, &b));
        }
    }

    #[test]
    fn frobenius_identities() {
        let field = ExtField::new(gf16(), 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = field.random(&mut rng);
            assert_eq!(field.frobenius(&a, 0), a);
            assert_eq!(field.frobenius(&a, 5), a);
            // a^q by multiplying a by itself q times
            let mut p = field.one();
            for _ in 0..16 {
                p = field.mul(&p, &a);
            }
            assert_eq!(field.frobenius(&a, 1), p);
        }
        for t in 0..12 {
            assert_eq!(field.frobenius(&field.one(), t), field.one());
        }
    }

    #[test]
    fn bytes_round_trip_for_odd_packing() {
        let field = ExtField::new(BaseField::new(3).unwrap(), 7).unwrap();
        assert_eq!(field.byte_len(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = field.random(&mut rng);
            let bytes = field.to_bytes(&a);
            assert_eq!(field.from_bytes(&bytes).unwrap(), a);
        }
        let mut bad = vec![0u8; 3];
        bad[2] = 0x01;
        assert_eq!(field.from_bytes(&bad), Err(FieldError::NonzeroPadding));
    }

    #[test]
    fn gf16_nibble_order_is_big_endian() {
        let field = ExtField::new(gf16(), 3).unwrap();
        let a = field.from_base_vector(vec![0xA, 0x3, 0xF]).unwrap();
        assert_eq!(field.to_bytes(&a), vec![0xA3, 0xF0]);
        assert_eq!(field.to_hex(&a), "a3f0");
    }

    #[test]
    fn base_vector_checks_length_and_range() {
        let field = ExtField::new(gf16(), 3).unwrap();
        assert_eq!(
            field.from_base_vector(vec![1, 2]),
            Err(FieldError::LengthMismatch { expected: 3, got: 2 })
        );
        assert_eq!(
            field.from_base_vector(vec![1, 2, 16]),
            Err(FieldError::SymbolOutOfRange { value: 16, bits: 4 })
        );
        assert!(field.zero().as_base_vector().iter().all(|&c| c == 0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<u8> = (0..3).map(|_| rng.gen_range(0..16)).collect();
        assert_eq!(field.from_base_vector(v.clone()).unwrap().as_base_vector(), &v[..]);
    }
}
