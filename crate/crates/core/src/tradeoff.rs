//! Storage/bandwidth operating points, normalized by the file size.

use serde::Serialize;

use crate::params::{reduce, validate_params, Mode, ParamError, ParamSpec};

/// One operating point. Symbol counts are per stripe; the normalized values
/// divide by the stripe size in symbols, i.e. by `M / (m b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TradeoffRow {
    pub label: &'static str,
    pub alpha_symbols: usize,
    /// Symbols broadcast in one round.
    pub gamma_symbols: usize,
    /// Packets per stripe.
    pub subpackets: usize,
    /// `alpha / B` as a reduced fraction.
    pub alpha_norm: (usize, usize),
    /// `gamma / (r B)`, bandwidth per failed node, as a reduced fraction.
    pub gamma_per_failed_norm: (usize, usize),
}

fn row(label: &'static str, alpha: usize, gamma: usize, r: usize, b: usize) -> TradeoffRow {
    TradeoffRow {
        label,
        alpha_symbols: alpha,
        gamma_symbols: gamma,
        subpackets: b,
        alpha_norm: reduce(alpha, b),
        gamma_per_failed_norm: reduce(gamma, r * b),
    }
}

fn ratio((num, den): (usize, usize)) -> f64 {
    num as f64 / den as f64
}

impl TradeoffRow {
    pub fn alpha_norm_f64(&self) -> f64 {
        ratio(self.alpha_norm)
    }

    pub fn gamma_per_failed_norm_f64(&self) -> f64 {
        ratio(self.gamma_per_failed_norm)
    }
}

/// The MBR point for `(n, k, d, r)`, the interior point `d = n - r` when those
/// parameters are admissible, and the broadcast MSR corner
/// `alpha = d - k + r`, `B = k(d - k + r)` for reference.
pub fn tradeoff_points(n: usize, k: usize, d: usize, r: usize) -> Result<Vec<TradeoffRow>, ParamError> {
    let mbr = validate_params(&ParamSpec::new(n, k, d, r, Mode::Mbr))?;
    let mut rows = vec![row("mbr", mbr.alpha, mbr.bandwidth_symbols(), r, mbr.subpackets)];
    if let Ok(int) = validate_params(&ParamSpec::new(n, k, n - r, r, Mode::Interior)) {
        rows.push(row("interior", int.alpha, int.bandwidth_symbols(), r, int.subpackets));
    }
    let msr_alpha = d - k + r;
    rows.push(row("msr-reference", msr_alpha, r * d, r, k * msr_alpha));
    Ok(rows)
}

pub const CSV_HEADER: &str = "mode,alpha_symbols,gamma_symbols,alpha_norm,gamma_per_failed_norm";

/// CSV with a header row and normalized values to 5 decimals.
pub fn to_csv(rows: &[TradeoffRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.5},{:.5}\n",
            r.label,
            r.alpha_symbols,
            r.gamma_symbols,
            r.alpha_norm_f64(),
            r.gamma_per_failed_norm_f64()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mbr_row_has_equal_coordinates() {
        for (n, k, d, r) in [(12, 8, 10, 2), (10, 4, 6, 2), (9, 3, 6, 3)] {
            let rows = tradeoff_points(n, k, d, r).unwrap();
            assert_eq!(rows[0].alpha_norm, rows[0].gamma_per_failed_norm, "{n} {k} {d} {r}");
        }
    }

    #[test]
    fn parameter_errors_pass_through() {
        assert_eq!(tradeoff_points(12, 8, 6, 2).unwrap_err(), ParamError::DBelowK);
    }
}
