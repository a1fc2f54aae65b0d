//! One broadcast repair round.
//!
//! Helpers broadcast `w_{h,j}` for every failed node `j`. Every newcomer sees
//! the same symbols, arranges them in `Y` (helper per row, failed node per
//! column), shifts columns cyclically so no row holds two symbols from one
//! helper, multiplies by the shared repair matrix and keeps its own column of
//! `Y' = Y M`.
//!
//! At the interior point `Y` is `(n-2r) x 2r`: the first `n-2r` helpers fill
//! the left `r` columns, and the `r x r` block `phi` from the last `r` helpers
//! is repeated down the right `r` columns.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::BaseSymbol;
use crate::linpoly::linear_combination;
use crate::params::Mode;
use crate::subspace::SubspaceBasis;
use crate::system::{StorageSystem, StoredPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("expected {expected} failed nodes, got {got}")]
    FailedCount { expected: usize, got: usize },
    #[error("expected {expected} helpers, got {got}")]
    HelperCount { expected: usize, got: usize },
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("node {0} listed twice")]
    Duplicate(usize),
    #[error("node {0} is both failed and a helper")]
    HelperIsFailed(usize),
    #[error("helper {0} holds no content")]
    EmptyHelper(usize),
    #[error("cyclic shift leaves helper {helper} twice in row {row}")]
    RepeatedHelper { row: usize, helper: usize },
    #[error("repair matrix is {rows}x{cols}, Y has {y_cols} columns")]
    MatrixShape { rows: usize, cols: usize, y_cols: usize },
    #[error("round aborted, {property}: {detail}")]
    Assertion { property: String, detail: String },
}

/// Which codeword symbol a helper sent, and where it landed in `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastTag {
    pub helper: usize,
    /// The failed node whose index selects `w_{helper,target}`.
    pub target: usize,
    /// Position of the symbol in the helper's codeword.
    pub position: usize,
    /// Sent straight from a systematic position, no computation at the helper.
    pub systematic: bool,
}

/// An entry of `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub tag: BroadcastTag,
    pub point: StoredPoint,
}

/// Record of a completed round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairRound {
    pub round_id: u64,
    /// Ascending; newcomer `failed[c]` stores column `c` of `Y'`.
    pub failed: Vec<usize>,
    pub helpers: Vec<usize>,
    /// Distinct symbols transmitted, in transmission order.
    pub broadcast: Vec<BroadcastTag>,
    /// Helper id of every entry of the permuted `Y`, row by row.
    pub layout: Vec<Vec<usize>>,
    pub bandwidth_symbols: usize,
    pub bandwidth_bits: u64,
    /// Symbols sent from systematic codeword positions.
    pub transfer_only: usize,
    /// GF(q)-rank of the broadcast x-coordinates.
    pub broadcast_rank: usize,
    /// True for rounds run while building the system.
    pub placement: bool,
}

impl RepairRound {
    pub fn transfer_only_fraction(&self) -> f64 {
        self.transfer_only as f64 / self.bandwidth_symbols as f64
    }

    /// Helper sets of the rows of the permuted `Y`, each sorted.
    pub fn row_helper_sets(&self) -> Vec<Vec<usize>> {
        self.layout
            .iter()
            .map(|row| {
                let mut s = row.clone();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect()
    }
}

/// The `d` lowest-indexed nodes that are not failing.
pub fn default_helpers(n: usize, d: usize, failed: &[usize]) -> Vec<usize> {
    (1..=n).filter(|id| !failed.contains(id)).take(d).collect()
}

fn check_sets(system: &StorageSystem, failed: &[usize], helpers: &[usize]) -> Result<Vec<usize>, RepairError> {
    let p = system.params();
    if failed.len() != p.r {
        return Err(RepairError::FailedCount { expected: p.r, got: failed.len() });
    }
    if helpers.len() != p.d {
        return Err(RepairError::HelperCount { expected: p.d, got: helpers.len() });
    }
    let mut seen = vec![false; p.n + 1];
    for &id in failed.iter().chain(helpers) {
        if id == 0 || id > p.n {
            return Err(RepairError::UnknownNode(id));
        }
        if seen[id] {
            return if failed.contains(&id) && helpers.contains(&id) {
                Err(RepairError::HelperIsFailed(id))
            } else {
                Err(RepairError::Duplicate(id))
            };
        }
        seen[id] = true;
    }
    for &h in helpers {
        if system.node(h).is_none_or(|n| n.codeword.len() != p.n - 1) {
            return Err(RepairError::EmptyHelper(h));
        }
    }
    let mut sorted = failed.to_vec();
    sorted.sort_unstable();
    Ok(sorted)
}

fn cell(system: &StorageSystem, helper: usize, target: usize) -> Cell {
    let node = system.node(helper).expect("helper validated");
    let (position, point) = node.symbol_for(target).expect("helper differs from target");
    Cell {
        tag: BroadcastTag {
            helper,
            target,
            position,
            systematic: system.node_code().is_systematic_position(position),
        },
        point: point.clone(),
    }
}

/// Assembles the unpermuted `Y` from the helpers' transmissions. `failed`
/// must already be sorted.
pub fn gather_broadcast(
    system: &StorageSystem,
    failed: &[usize],
    helpers: &[usize],
) -> Result<Vec<Vec<Cell>>, RepairError> {
    let failed = check_sets(system, failed, helpers)?;
    let p = system.params();
    let y = match p.mode {
        Mode::Mbr => helpers
            .iter()
            .map(|&h| failed.iter().map(|&j| cell(system, h, j)).collect())
            .collect(),
        Mode::Interior => {
            let rows = p.n - 2 * p.r;
            let (left, last) = helpers.split_at(rows);
            let phi: Vec<Vec<Cell>> = last
                .iter()
                .map(|&h| failed.iter().map(|&j| cell(system, h, j)).collect())
                .collect();
            left.iter()
                .enumerate()
                .map(|(i, &h)| {
                    let mut row: Vec<Cell> = failed.iter().map(|&j| cell(system, h, j)).collect();
                    row.extend(phi[i % p.r].iter().cloned());
                    row
                })
                .collect()
        }
    };
    Ok(y)
}

/// Cyclic column shifts. MBR: column `c` moves up by `c` rows, so row `i`
/// holds helpers `i, i+1, ..., i+r-1` (mod d). Interior: the same on the left
/// `r` columns; the `phi` columns shift within each band of `r` rows.
pub fn permute_columns<T: Clone>(y: &[Vec<T>], mode: Mode, r: usize) -> Vec<Vec<T>> {
    let rows = y.len();
    (0..rows)
        .map(|i| {
            (0..y[i].len())
                .map(|c| match mode {
                    Mode::Mbr => y[(i + c) % rows][c].clone(),
                    Mode::Interior if c < r => y[(i + c) % rows][c].clone(),
                    Mode::Interior => {
                        let band = (i / r) * r;
                        let a = i % r;
                        y[band + (a + c - r) % r][c].clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// Returns the first `(row, helper)` that appears twice in a row.
pub fn repeated_helper(layout: &[Vec<usize>]) -> Option<(usize, usize)> {
    layout.iter().enumerate().find_map(|(i, row)| {
        row.iter()
            .enumerate()
            .find(|(c, h)| row[..*c].contains(h))
            .map(|(_, &h)| (i, h))
    })
}

/// `Y' = Y M`: entry `(i, j)` combines row `i` of `Y` by column `j` of `M`.
pub fn apply_repair_matrix(
    system: &StorageSystem,
    y: &[Vec<Cell>],
    matrix: &[Vec<BaseSymbol>],
) -> Result<Vec<Vec<StoredPoint>>, RepairError> {
    let cols = matrix.first().map_or(0, Vec::len);
    for row in y {
        if row.len() != matrix.len() {
            return Err(RepairError::MatrixShape { rows: matrix.len(), cols, y_cols: row.len() });
        }
    }
    let field = system.field();
    Ok(y.iter()
        .map(|row| {
            let points: Vec<StoredPoint> = row.iter().map(|c| c.point.clone()).collect();
            (0..cols)
                .map(|j| {
                    let coeffs: Vec<BaseSymbol> = matrix.iter().map(|m| m[j]).collect();
                    linear_combination(field, &points, &coeffs).expect("shapes checked")
                })
                .collect()
        })
        .collect())
}

/// Runs one repair round. `helpers = None` picks [`default_helpers`].
/// Nothing is modified unless every runtime assertion passes.
pub fn execute_round(
    system: &mut StorageSystem,
    failed: &[usize],
    helpers: Option<&[usize]>,
) -> Result<RepairRound, RepairError> {
    let p = *system.params();
    let helpers = match helpers {
        Some(h) => h.to_vec(),
        None => default_helpers(p.n, p.d, failed),
    };
    execute_round_inner(system, failed, &helpers, false)
}

pub(crate) fn execute_round_inner(
    system: &mut StorageSystem,
    failed: &[usize],
    helpers: &[usize],
    placement: bool,
) -> Result<RepairRound, RepairError> {
    let p = *system.params();
    let failed = check_sets(system, failed, helpers)?;
    let y = gather_broadcast(system, &failed, helpers)?;

    // Distinct transmissions: the phi block is repeated in Y but sent once.
    let mut broadcast: Vec<BroadcastTag> = Vec::with_capacity(p.r * p.d);
    let mut sent: Vec<&StoredPoint> = Vec::with_capacity(p.r * p.d);
    for row in &y {
        for c in row {
            if !broadcast.contains(&c.tag) {
                broadcast.push(c.tag);
                sent.push(&c.point);
            }
        }
    }
    let field = system.field();
    let broadcast_rank = SubspaceBasis::from_elements(field, sent.iter().map(|pt| &pt.x)).dim();
    if broadcast_rank != p.r * p.d {
        return Err(RepairError::Assertion {
            property: "broadcast rank".into(),
            detail: format!("{} broadcast symbols span only {broadcast_rank} dimensions", p.r * p.d),
        });
    }

    let y = permute_columns(&y, p.mode, p.r);
    let layout: Vec<Vec<usize>> =
        y.iter().map(|row| row.iter().map(|c| c.tag.helper).collect()).collect();
    if let Some((row, helper)) = repeated_helper(&layout) {
        return Err(RepairError::RepeatedHelper { row, helper });
    }
    let y_prime = apply_repair_matrix(system, &y, system.repair_matrix())?;

    let mut contents: Vec<Vec<StoredPoint>> = vec![Vec::with_capacity(p.alpha); p.r];
    for row in y_prime {
        for (c, pt) in row.into_iter().enumerate() {
            contents[c].push(pt);
        }
    }
    for (c, stored) in contents.iter().enumerate() {
        let rank = SubspaceBasis::from_elements(field, stored.iter().map(|pt| &pt.x)).dim();
        if rank != p.alpha {
            return Err(RepairError::Assertion {
                property: "newcomer rank".into(),
                detail: format!("node {} would store rank {rank}, expected {}", failed[c], p.alpha),
            });
        }
        if system.oracle_checks() {
            if let Some(i) = stored.iter().position(|pt| !system.on_polynomial(pt)) {
                return Err(RepairError::Assertion {
                    property: "points on polynomial".into(),
                    detail: format!("point {i} for node {} is off the polynomial", failed[c]),
                });
            }
        }
    }

    let round_id = system.next_round_id();
    let transfer_only = broadcast.iter().filter(|t| t.systematic).count();
    let round = RepairRound {
        round_id,
        failed: failed.clone(),
        helpers: helpers.to_vec(),
        bandwidth_symbols: broadcast.len(),
        bandwidth_bits: broadcast.len() as u64 * p.symbol_bits(),
        broadcast,
        layout,
        transfer_only,
        broadcast_rank,
        placement,
    };
    for (id, stored) in failed.iter().zip(contents) {
        system.install(*id, stored, round_id);
    }
    system.history.push(round.clone());
    Ok(round)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mbr_shift_matches_the_circular_pattern() {
        let y: Vec<Vec<usize>> = (1..=4).map(|h| vec![h, h]).collect();
        let shifted = permute_columns(&y, Mode::Mbr, 2);
        assert_eq!(shifted, vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 1]]);
        assert_eq!(repeated_helper(&shifted), None);
        assert_eq!(repeated_helper(&y), Some((0, 1)));
    }

    #[test]
    fn single_column_is_untouched() {
        let y: Vec<Vec<usize>> = (1..=5).map(|h| vec![h]).collect();
        assert_eq!(permute_columns(&y, Mode::Mbr, 1), y);
    }

    #[test]
    fn interior_shift_breaks_phi_repeats() {
        // n = 12, r = 2: helpers 1..8 on the left, 9 and 10 form phi.
        let y: Vec<Vec<usize>> = (0..8)
            .map(|i| {
                let h = i + 1;
                let phi = 9 + i % 2;
                vec![h, h, phi, phi]
            })
            .collect();
        let shifted = permute_columns(&y, Mode::Interior, 2);
        assert_eq!(shifted[0], vec![1, 2, 9, 10]);
        assert_eq!(shifted[1], vec![2, 3, 10, 9]);
        assert_eq!(shifted[7], vec![8, 1, 10, 9]);
        assert_eq!(repeated_helper(&shifted), None);
    }

    #[test]
    fn default_helpers_skip_failed() {
        assert_eq!(default_helpers(12, 10, &[1, 5]), vec![2, 3, 4, 6, 7, 8, 9, 10, 11, 12]);
        assert_eq!(default_helpers(12, 10, &[11, 12]), (1..=10).collect::<Vec<_>>());
    }
}
