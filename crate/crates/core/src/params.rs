//! System parameters `(n, k, d, r)`, the operating point, and the derived
//! storage and bandwidth figures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which point of the storage/bandwidth tradeoff the system operates at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Minimum-bandwidth point: `alpha = d`.
    Mbr,
    /// Interior point with `d = n - r`, `alpha = n - 2r`.
    Interior,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Mbr => "mbr",
            Mode::Interior => "interior",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mbr" => Ok(Mode::Mbr),
            "interior" => Ok(Mode::Interior),
            other => Err(format!("unknown mode {other:?} (expected mbr or interior)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("n, k, d and r must all be positive")]
    NonPositive,
    #[error("r does not divide k")]
    RDoesNotDivideK,
    #[error("d < k")]
    DBelowK,
    #[error("d > n - r")]
    DAboveNMinusR,
    #[error("interior point requires d = n - r")]
    InteriorNeedsDEqualsNMinusR,
    #[error("interior point requires n > 2r")]
    InteriorNeedsNAbove2R,
    #[error("r does not divide n - d")]
    RDoesNotDivideNMinusD,
    #[error("r does not divide n - 2r")]
    RDoesNotDivideNMinus2R,
    #[error("unsupported base field width b = {0} (supported: 1..=8)")]
    UnsupportedBaseBits(u32),
    #[error("field too small: q = {q} < max(n - 1, 3r) = {needed}")]
    FieldTooSmall { q: usize, needed: usize },
    #[error("extension degree too small: m = {m} < {min}")]
    ExtensionTooSmall { m: usize, min: usize },
    #[error("subpacketization {subpackets} exceeds extension degree {m}")]
    SubpacketsExceedDegree { subpackets: usize, m: usize },
}

/// Unvalidated parameters as supplied by a caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub mode: Mode,
    /// Base field width; q = 2^b.
    pub b: u32,
    /// Extension degree; `None` picks the smallest admissible value.
    pub m: Option<usize>,
}

impl ParamSpec {
    pub fn new(n: usize, k: usize, d: usize, r: usize, mode: Mode) -> Self {
        Self { n, k, d, r, mode, b: 8, m: None }
    }

    pub fn with_base_bits(mut self, b: u32) -> Self {
        self.b = b;
        self
    }

    pub fn with_degree(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }
}

/// Validated parameters with the derived quantities filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub mode: Mode,
    pub b: u32,
    pub m: usize,
    /// Points stored per node.
    pub alpha: usize,
    /// Packets (field elements) per stripe, i.e. the number of terms of the
    /// file polynomial.
    pub subpackets: usize,
}

/// Packets per stripe at the MBR point: `k(2d - k + r) / 2`.
pub fn mbr_subpackets(k: usize, d: usize, r: usize) -> usize {
    k * (2 * d - k + r) / 2
}

/// Packets per stripe at the interior point: `k(2(n-2r) - (k-r))/2 + r(k-r)`.
pub fn interior_subpackets(n: usize, k: usize, r: usize) -> usize {
    k * (2 * (n - 2 * r) - (k - r)) / 2 + r * (k - r)
}

pub fn validate_params(spec: &ParamSpec) -> Result<SystemParams, ParamError> {
    let ParamSpec { n, k, d, r, mode, b, m } = *spec;
    if n == 0 || k == 0 || d == 0 || r == 0 {
        return Err(ParamError::NonPositive);
    }
    if k % r != 0 {
        return Err(ParamError::RDoesNotDivideK);
    }
    if d < k {
        return Err(ParamError::DBelowK);
    }
    if d + r > n {
        return Err(ParamError::DAboveNMinusR);
    }
    let (alpha, subpackets) = match mode {
        Mode::Mbr => {
            if (n - d) % r != 0 {
                return Err(ParamError::RDoesNotDivideNMinusD);
            }
            (d, mbr_subpackets(k, d, r))
        }
        Mode::Interior => {
            if d != n - r {
                return Err(ParamError::InteriorNeedsDEqualsNMinusR);
            }
            if n <= 2 * r {
                return Err(ParamError::InteriorNeedsNAbove2R);
            }
            if (n - 2 * r) % r != 0 {
                return Err(ParamError::RDoesNotDivideNMinus2R);
            }
            (n - 2 * r, interior_subpackets(n, k, r))
        }
    };
    if !(1..=8).contains(&b) {
        return Err(ParamError::UnsupportedBaseBits(b));
    }
    let q = 1usize << b;
    let needed = (n - 1).max(3 * r);
    if q < needed {
        return Err(ParamError::FieldTooSmall { q, needed });
    }
    let min_m = d * alpha;
    let m = m.unwrap_or(min_m);
    if m < min_m {
        return Err(ParamError::ExtensionTooSmall { m, min: min_m });
    }
    if subpackets > m {
        return Err(ParamError::SubpacketsExceedDegree { subpackets, m });
    }
    Ok(SystemParams { n, k, d, r, mode, b, m, alpha, subpackets })
}

impl SystemParams {
    pub fn q(&self) -> usize {
        1 << self.b
    }

    /// Smallest admissible extension degree: `d * alpha` (d² at MBR).
    pub fn min_degree(&self) -> usize {
        self.d * self.alpha
    }

    /// Whole payload bytes carried by one field element.
    pub fn element_payload_bytes(&self) -> usize {
        self.m * self.b as usize / 8
    }

    /// Bytes of one stripe including the 8-byte length header.
    pub fn stripe_bytes(&self) -> usize {
        self.subpackets * self.element_payload_bytes()
    }

    /// Largest file that fits in a single stripe.
    pub fn stripe_capacity(&self) -> usize {
        self.stripe_bytes().saturating_sub(crate::file::LENGTH_HEADER)
    }

    /// Field elements broadcast per repair round, `r * d` in both modes.
    pub fn bandwidth_symbols(&self) -> usize {
        self.r * self.d
    }

    pub fn symbol_bits(&self) -> u64 {
        self.m as u64 * self.b as u64
    }

    /// Size-M file model: M = subpackets * m * b bits for one full stripe.
    pub fn stripe_bits(&self) -> u64 {
        self.subpackets as u64 * self.symbol_bits()
    }

    /// Storage per node and bandwidth per failed node, both as fractions of
    /// the file size: `(alpha / B, d / B)`.
    pub fn normalized_point(&self) -> (f64, f64) {
        let b = self.subpackets as f64;
        (self.alpha as f64 / b, self.bandwidth_symbols() as f64 / self.r as f64 / b)
    }

    /// The same point as exact fractions `(num, den)` of the file size.
    pub fn normalized_point_exact(&self) -> ((usize, usize), (usize, usize)) {
        let b = self.subpackets;
        (reduce(self.alpha, b), reduce(self.d, b))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub(crate) fn reduce(num: usize, den: usize) -> (usize, usize) {
    let g = gcd(num, den).max(1);
    (num / g, den / g)
}
