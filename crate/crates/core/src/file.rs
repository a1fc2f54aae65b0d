//! File <-> polynomial packing.
//!
//! A file becomes an 8-byte big-endian length header, the payload, and zero
//! padding, sliced into field elements of `floor(m*b/8)` bytes each. Every
//! `subpackets` consecutive elements form the coefficients of one stripe
//! polynomial.

use thiserror::Error;

use crate::gf::ExtField;
use crate::linpoly::LinearizedPoly;
use crate::params::SystemParams;

pub const LENGTH_HEADER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FileError {
    #[error("file of {len} bytes exceeds the single-stripe capacity of {capacity} bytes; stripe it across several polynomials")]
    Oversize { len: usize, capacity: usize },
    #[error("stripe {stripe} has {got} terms, expected {expected}")]
    TermCount { stripe: usize, got: usize, expected: usize },
    #[error("corrupt length header: {declared} bytes declared, {available} available")]
    CorruptHeader { declared: u64, available: usize },
    #[error("no stripes to decode")]
    Empty,
}

/// Number of stripes needed for a file of `len` bytes (at least one).
pub fn stripes_needed(params: &SystemParams, len: usize) -> usize {
    (len + LENGTH_HEADER).div_ceil(params.stripe_bytes()).max(1)
}

/// Packs a file into exactly one stripe polynomial.
pub fn split_file(field: &ExtField, data: &[u8], params: &SystemParams) -> Result<LinearizedPoly, FileError> {
    let capacity = params.stripe_capacity();
    if data.len() > capacity {
        return Err(FileError::Oversize { len: data.len(), capacity });
    }
    Ok(split_striped(field, data, params).pop().expect("one stripe"))
}

/// Packs a file of any size into as many stripe polynomials as needed.
pub fn split_striped(field: &ExtField, data: &[u8], params: &SystemParams) -> Vec<LinearizedPoly> {
    let stripes = stripes_needed(params, data.len());
    let chunk = params.element_payload_bytes();
    debug_assert_eq!(chunk, field.payload_bytes());
    let mut buf = Vec::with_capacity(stripes * params.stripe_bytes());
    buf.extend_from_slice(&(data.len() as u64).to_be_bytes());
    buf.extend_from_slice(data);
    buf.resize(stripes * params.stripe_bytes(), 0);
    buf.chunks(params.stripe_bytes())
        .map(|stripe| {
            LinearizedPoly::new(stripe.chunks(chunk).map(|c| field.from_payload(c)).collect())
        })
        .collect()
}

/// Inverse of [`split_file`].
pub fn unsplit_file(field: &ExtField, poly: &LinearizedPoly, params: &SystemParams) -> Result<Vec<u8>, FileError> {
    unsplit_striped(field, std::slice::from_ref(poly), params)
}

/// Inverse of [`split_striped`].
pub fn unsplit_striped(
    field: &ExtField,
    polys: &[LinearizedPoly],
    params: &SystemParams,
) -> Result<Vec<u8>, FileError> {
    if polys.is_empty() {
        return Err(FileError::Empty);
    }
    let mut buf = Vec::with_capacity(polys.len() * params.stripe_bytes());
    for (s, poly) in polys.iter().enumerate() {
        if poly.terms() != params.subpackets {
            return Err(FileError::TermCount { stripe: s, got: poly.terms(), expected: params.subpackets });
        }
        for c in poly.coeffs() {
            buf.extend_from_slice(&field.to_payload(c));
        }
    }
    if buf.len() < LENGTH_HEADER {
        return Err(FileError::CorruptHeader { declared: 0, available: buf.len() });
    }
    let mut header = [0u8; LENGTH_HEADER];
    header.copy_from_slice(&buf[..LENGTH_HEADER]);
    let declared = u64::from_be_bytes(header);
    let available = buf.len() - LENGTH_HEADER;
    if declared > available as u64 {
        return Err(FileError::CorruptHeader { declared, available });
    }
    Ok(buf[LENGTH_HEADER..LENGTH_HEADER + declared as usize].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::BaseField;
    use crate::params::{validate_params, Mode, ParamSpec};

    fn small() -> (ExtField, SystemParams) {
        // n=4, k=2, d=2, r=1 over GF(16^8): alpha=2, B=3, 4 bytes per element
        let spec = ParamSpec::new(4, 2, 2, 1, Mode::Mbr).with_base_bits(4).with_degree(8);
        let p = validate_params(&spec).unwrap();
        (ExtField::new(BaseField::new(4).unwrap(), p.m).unwrap(), p)
    }

    #[test]
    fn empty_file_only_sets_header() {
        let (f, p) = small();
        let poly = split_file(&f, &[], &p).unwrap();
        assert_eq!(poly.terms(), p.subpackets);
        assert!(poly.coeffs().iter().all(|c| c.is_zero()));
        assert_eq!(unsplit_file(&f, &poly, &p).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn full_stripe_round_trip() {
        let (f, p) = small();
        let data: Vec<u8> = (0..p.stripe_capacity() as u8).collect();
        let poly = split_file(&f, &data, &p).unwrap();
        assert_eq!(unsplit_file(&f, &poly, &p).unwrap(), data);
        assert_eq!(
            split_file(&f, &[0; 100], &p).unwrap_err(),
            FileError::Oversize { len: 100, capacity: p.stripe_capacity() }
        );
    }

    #[test]
    fn packets_carry_equal_shares_of_a_full_stripe() {
        let p = validate_params(&ParamSpec::new(12, 8, 10, 2, Mode::Mbr)).unwrap();
        // M = B * m * b bits; each packet is M / B = m * b bits = 2M / (k(2d - k + r))
        let m_bits = p.stripe_bits();
        assert_eq!(m_bits * 2 / (8 * (20 - 8 + 2)) as u64, p.symbol_bits());
        assert_eq!(p.stripe_bytes(), 56 * 100);
    }

    #[test]
    fn striping_round_trip() {
        let (f, p) = small();
        let data: Vec<u8> = (0..50u8).collect();
        let polys = split_striped(&f, &data, &p);
        assert_eq!(polys.len(), stripes_needed(&p, 50));
        assert!(polys.len() > 1);
        assert_eq!(unsplit_striped(&f, &polys, &p).unwrap(), data);
    }

    #[test]
    fn corrupt_header_detected() {
        let (f, p) = small();
        let mut coeffs = split_file(&f, &[1, 2], &p).unwrap().into_coeffs();
        coeffs[0] = f.from_payload(&[0xFF, 0xFF]);
        let err = unsplit_file(&f, &LinearizedPoly::new(coeffs), &p).unwrap_err();
        assert!(matches!(err, FileError::CorruptHeader { .. }));
    }
}
