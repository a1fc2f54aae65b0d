//! Subspace properties of a storage system, measured on concrete node spans.
//!
//! Every check is a statement about dimensions of sums and intersections of
//! x-spans. Information quantities are evaluated through the identity
//! `H(W_S) = dim(sum of W_i, i in S)`, which is exact for subspaces; the
//! three-way dictionary `I(A;B;C) = dim(A ∩ B ∩ C)` is not assumed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mds::combinations;
use crate::params::Mode;
use crate::subspace::SubspaceBasis;
use crate::system::StorageSystem;

/// Candidate budget above which a check samples instead of enumerating.
pub const DEFAULT_SAMPLE_LIMIT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    L1,
    L2,
    L3,
    L4,
    Lemma1,
    Dc,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::L1, Check::L2, Check::L3, Check::L4, Check::Lemma1, Check::Dc];
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Check::L1 => "l1",
            Check::L2 => "l2",
            Check::L3 => "l3",
            Check::L4 => "l4",
            Check::Lemma1 => "lemma1",
            Check::Dc => "dc",
        })
    }
}

impl std::str::FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown check {s:?} (expected one of l1,l2,l3,l4,lemma1,dc)"))
    }
}

/// Enumerate when the population fits in `limit`, otherwise draw `limit`
/// seeded samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub limit: usize,
    pub seed: u64,
}

impl Sampling {
    pub fn new(seed: u64) -> Self {
        Self { limit: DEFAULT_SAMPLE_LIMIT, seed }
    }

    pub fn exhaustive(seed: u64) -> Self {
        Self { limit: usize::MAX, seed }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    fn rng(&self, check: Check) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (check as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// A measurement that broke its bound. `groups` are the node sets involved,
/// in the order the check names them (e.g. `[A], [B1], [B2]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub groups: Vec<Vec<usize>>,
    pub measured: i64,
    pub expected: String,
}

/// Equality witnesses for one repaired node: which candidate families reach
/// the bound exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub node: usize,
    pub round: u64,
    /// `R` = the helper set of one row of the node's permuted `Y`.
    pub row_helpers: Option<Vec<usize>>,
    /// `R` = the newcomers of a later round in which the node was a helper.
    pub helped_round: Option<Vec<usize>>,
    /// `R` = the node's round-mates plus helpers of its round.
    pub mates_and_helpers: Option<Vec<usize>>,
    /// Largest `dim(W_A ∩ W_R)` seen over the row-helper candidates.
    pub row_helpers_best: usize,
}

impl WitnessRecord {
    pub fn found(&self) -> bool {
        self.row_helpers.is_some() || self.helped_round.is_some() || self.mates_and_helpers.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: Check,
    pub mode: Mode,
    /// Size of the candidate set the check draws from.
    pub population: u128,
    /// Candidates actually evaluated.
    pub sampled: usize,
    pub violations: Vec<Violation>,
    pub seed: u64,
    /// Largest (or, for `dc`, smallest) measured value.
    pub extreme: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Cached node spans and helpers for dimension queries.
struct Spans<'a> {
    system: &'a StorageSystem,
    spans: Vec<SubspaceBasis>,
}

impl<'a> Spans<'a> {
    fn new(system: &'a StorageSystem) -> Self {
        Self { system, spans: system.node_spans() }
    }

    fn node(&self, id: usize) -> &SubspaceBasis {
        &self.spans[id - 1]
    }

    fn sum(&self, ids: &[usize]) -> SubspaceBasis {
        let p = self.system.params();
        SubspaceBasis::sum_all(self.system.field().base(), p.m, ids.iter().map(|&i| self.node(i)))
    }

    /// `H(W_S)`.
    fn h(&self, ids: &[usize]) -> i64 {
        self.sum(ids).dim() as i64
    }

    fn meet(&self, a: &SubspaceBasis, b: &SubspaceBasis) -> SubspaceBasis {
        a.intersect(self.system.field().base(), b).expect("same ambient space")
    }

    /// `dim(W_A ∩ W_R)` for a single node `A`.
    fn overlap(&self, a: usize, r: &[usize]) -> usize {
        self.meet(self.node(a), &self.sum(r)).dim()
    }

    /// `I(X; Y | Z)` with every argument a node set.
    fn cond_mi(&self, x: &[usize], y: &[usize], z: &[usize]) -> i64 {
        self.h(&cat(&[x, z])) + self.h(&cat(&[y, z])) - self.h(&cat(&[x, y, z])) - self.h(z)
    }
}

fn cat(parts: &[&[usize]]) -> Vec<usize> {
    parts.concat()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `size`-subsets of `1..=n`, enumerated or sampled per the policy.
fn node_subsets(n: usize, size: usize, policy: &Sampling, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let population = binomial(n, size);
    if population <= policy.limit as u128 {
        combinations(n, size).map(|c| c.into_iter().map(|i| i + 1).collect()).collect()
    } else {
        (0..policy.limit).map(|_| random_subset(rng, n, size, &[])).collect()
    }
}

/// Sorted `size`-subset of `1..=n` avoiding `exclude`.
fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize, exclude: &[usize]) -> Vec<usize> {
    let pool: Vec<usize> = (1..=n).filter(|i| !exclude.contains(i)).collect();
    let mut out: Vec<usize> = sample(rng, pool.len(), size).into_iter().map(|i| pool[i]).collect();
    out.sort_unstable();
    out
}

/// `A` paired with each `size`-subset of the other nodes, enumerated or sampled.
fn node_and_subsets(n: usize, size: usize, policy: &Sampling, rng: &mut ChaCha8Rng) -> (u128, Vec<(usize, Vec<usize>)>) {
    let population = n as u128 * binomial(n - 1, size);
    let cases = if population <= policy.limit as u128 {
        (1..=n)
            .flat_map(|a| {
                combinations(n - 1, size)
                    .map(move |c| (a, c.into_iter().map(|i| if i + 1 >= a { i + 2 } else { i + 1 }).collect()))
            })
            .collect()
    } else {
        (0..policy.limit)
            .map(|_| {
                let a = rng.gen_range(1..=n);
                (a, random_subset(rng, n, size, &[a]))
            })
            .collect()
    };
    (population, cases)
}

fn report(system: &StorageSystem, check: Check, policy: &Sampling, population: u128, sampled: usize) -> Report {
    Report {
        check,
        mode: system.params().mode,
        population,
        sampled,
        violations: Vec::new(),
        seed: policy.seed,
        extreme: 0,
        witnesses: Vec::new(),
        notes: Vec::new(),
    }
}

/// Pairwise spans meet only in zero.
pub fn check_l1(system: &StorageSystem, policy: &Sampling) -> Report {
    let n = system.params().n;
    let spans = Spans::new(system);
    let mut rng = policy.rng(Check::L1);
    let pairs = node_subsets(n, 2, policy, &mut rng);
    let dims: Vec<usize> = pairs.par_iter().map(|p| spans.overlap(p[0], &p[1..])).collect();
    let mut rep = report(system, Check::L1, policy, binomial(n, 2), pairs.len());
    rep.extreme = dims.iter().copied().max().unwrap_or(0) as i64;
    rep.violations = pairs
        .iter()
        .zip(&dims)
        .filter(|(_, &d)| d != 0)
        .map(|(p, &d)| Violation { groups: vec![vec![p[0]], vec![p[1]]], measured: d as i64, expected: "0".into() })
        .collect();
    rep
}

/// Any `r` nodes (MBR) or `2r` nodes (interior) have independent spans.
pub fn check_l2(system: &StorageSystem, policy: &Sampling) -> Report {
    let p = *system.params();
    let bound = match p.mode {
        Mode::Mbr => p.r,
        Mode::Interior => 2 * p.r,
    };
    let spans = Spans::new(system);
    let mut rng = policy.rng(Check::L2);
    let population: u128 = (1..=bound.min(p.n)).map(|s| binomial(p.n, s)).sum();
    let sets: Vec<Vec<usize>> = if population <= policy.limit as u128 {
        (1..=bound.min(p.n)).flat_map(|s| node_subsets(p.n, s, &Sampling::exhaustive(0), &mut rng)).collect()
    } else {
        (0..policy.limit)
            .map(|_| {
                let s = rng.gen_range(1..=bound.min(p.n));
                random_subset(&mut rng, p.n, s, &[])
            })
            .collect()
    };
    let deficits: Vec<i64> = sets
        .par_iter()
        .map(|s| s.iter().map(|&i| spans.node(i).dim() as i64).sum::<i64>() - spans.h(s))
        .collect();
    let mut rep = report(system, Check::L2, policy, population, sets.len());
    rep.extreme = deficits.iter().copied().max().unwrap_or(0);
    rep.violations = sets
        .iter()
        .zip(&deficits)
        .filter(|(_, &d)| d != 0)
        .map(|(s, &d)| Violation {
            groups: vec![s.clone()],
            measured: spans.h(s),
            expected: format!("{}", spans.h(s) + d),
        })
        .collect();
    rep
}

/// `(A, B1, B2, B3)`: `B3` is empty at MBR.
type Partition = (usize, Vec<usize>, Vec<usize>, Vec<usize>);

fn sample_partitions(p: &crate::params::SystemParams, policy: &Sampling, rng: &mut ChaCha8Rng) -> Vec<Partition> {
    let (max_b, cond) = match p.mode {
        Mode::Mbr => (p.d.min(p.n - 1), 0),
        Mode::Interior => ((p.n - p.r).min(p.n - 1), p.r),
    };
    let count = policy.limit.min(10_000);
    (0..count)
        .map(|_| {
            let a = rng.gen_range(1..=p.n);
            let size = rng.gen_range(cond + 2..=max_b);
            let mut b = random_subset(rng, p.n, size, &[a]);
            // Shuffle so the conditioning block and the split are uniform.
            for i in (1..b.len()).rev() {
                let j = rng.gen_range(0..=i);
                b.swap(i, j);
            }
            let b3: Vec<usize> = b.drain(..cond).collect();
            let cut = rng.gen_range(1..b.len());
            let mut b1 = b[..cut].to_vec();
            let mut b2 = b[cut..].to_vec();
            let mut b3 = b3;
            b1.sort_unstable();
            b2.sort_unstable();
            b3.sort_unstable();
            (a, b1, b2, b3)
        })
        .collect()
}

fn partition_population(p: &crate::params::SystemParams) -> u128 {
    let (max_b, cond) = match p.mode {
        Mode::Mbr => (p.d.min(p.n - 1), 0),
        Mode::Interior => ((p.n - p.r).min(p.n - 1), p.r),
    };
    let mut total = 0u128;
    for size in cond + 2..=max_b {
        let rest = size - cond;
        // ordered splits of the remaining nodes into two non-empty blocks
        let splits = (1u128 << rest) - 2;
        total += binomial(p.n - 1, size) * binomial(size, cond) * splits;
    }
    total * p.n as u128
}

/// MBR: `dim(W_A ∩ W_B1 ∩ W_B2) = 0`. Interior: the conditional
/// co-information `I(W_A; W_B1; W_B2 | W_B3) = 0` with `|B3| = r`.
///
/// At MBR the report also notes how often the unconditional co-information
/// `I(W_A; W_B1; W_B2)`, computed from dimensions of sums, is nonzero.
pub fn check_l3(system: &StorageSystem, policy: &Sampling) -> Report {
    let p = *system.params();
    let spans = Spans::new(system);
    let mut rng = policy.rng(Check::L3);
    let cases = sample_partitions(&p, policy, &mut rng);
    let values: Vec<(i64, i64)> = cases
        .par_iter()
        .map(|(a, b1, b2, b3)| {
            let a = std::slice::from_ref(a);
            let co = spans.cond_mi(a, b1, b3) - spans.cond_mi(a, b1, &cat(&[b2, b3]));
            let measured = match p.mode {
                Mode::Mbr => {
                    let ab1 = spans.meet(spans.node(a[0]), &spans.sum(b1));
                    spans.meet(&ab1, &spans.sum(b2)).dim() as i64
                }
                Mode::Interior => co,
            };
            (measured, co)
        })
        .collect();
    let mut rep = report(system, Check::L3, policy, partition_population(&p), cases.len());
    rep.extreme = values.iter().map(|v| v.0.abs()).max().unwrap_or(0);
    rep.violations = cases
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.0 != 0)
        .map(|((a, b1, b2, b3), v)| {
            let mut groups = vec![vec![*a], b1.clone(), b2.clone()];
            if !b3.is_empty() {
                groups.push(b3.clone());
            }
            Violation { groups, measured: v.0, expected: "0".into() }
        })
        .collect();
    if p.mode == Mode::Mbr {
        let nonzero = values.iter().filter(|v| v.1 != 0).count();
        rep.notes.push(format!(
            "co-information I(W_A;W_B1;W_B2) from sum dimensions is nonzero in {nonzero} of {} cases",
            values.len()
        ));
    }
    rep
}

/// `dim(W_A ∩ W_R) <= r` for `|R| = r` (interior: `<= 2r` for `|R| = 2r`),
/// plus a search for exact-equality witnesses for every node whose content
/// came from a repair round.
pub fn check_l4(system: &StorageSystem, policy: &Sampling) -> Report {
    let p = *system.params();
    let size = match p.mode {
        Mode::Mbr => p.r,
        Mode::Interior => 2 * p.r,
    };
    let spans = Spans::new(system);
    let mut rng = policy.rng(Check::L4);
    let (population, cases) = node_and_subsets(p.n, size, policy, &mut rng);
    let dims: Vec<usize> = cases.par_iter().map(|(a, r)| spans.overlap(*a, r)).collect();
    let mut rep = report(system, Check::L4, policy, population, cases.len());
    rep.extreme = dims.iter().copied().max().unwrap_or(0) as i64;
    rep.violations = cases
        .iter()
        .zip(&dims)
        .filter(|(_, &d)| d > size)
        .map(|((a, r), &d)| Violation { groups: vec![vec![*a], r.clone()], measured: d as i64, expected: format!("<= {size}") })
        .collect();

    rep.witnesses = system
        .nodes()
        .par_iter()
        .filter(|node| node.generation > 0)
        .map(|node| find_witness(system, &spans, node.id, node.generation, size))
        .collect();
    for w in rep.witnesses.iter().filter(|w| !w.found()) {
        rep.violations.push(Violation {
            groups: vec![vec![w.node]],
            measured: w.row_helpers_best as i64,
            expected: format!("an equality witness with dim = {size}"),
        });
    }
    rep
}

fn find_witness(system: &StorageSystem, spans: &Spans<'_>, a: usize, generation: u64, size: usize) -> WitnessRecord {
    let history = system.history();
    let round = history.iter().find(|r| r.round_id == generation).expect("generation names a round");
    let hits = |r: &Vec<usize>| r.len() == size && spans.overlap(a, r) == size;

    let rows = round.row_helper_sets();
    let row_dims: Vec<usize> = rows.iter().filter(|r| r.len() == size).map(|r| spans.overlap(a, r)).collect();
    let row_helpers = rows.iter().filter(|r| r.len() == size).zip(&row_dims).find(|(_, &d)| d == size).map(|(r, _)| r.clone());

    let helped_round = history
        .iter()
        .filter(|later| later.round_id > generation && later.helpers.contains(&a))
        .filter(|later| {
            later.failed.iter().all(|&f| system.node(f).is_some_and(|n| n.generation == later.round_id))
        })
        .map(|later| later.failed.clone())
        .find(&hits);

    let mates: Vec<usize> = round.failed.iter().copied().filter(|&f| f != a).collect();
    let mates_and_helpers = if mates.len() < size
        && mates.iter().all(|&f| system.node(f).is_some_and(|n| n.generation == generation))
    {
        let extra = size - mates.len();
        combinations(round.helpers.len(), extra)
            .map(|c| {
                let mut r = mates.clone();
                r.extend(c.into_iter().map(|i| round.helpers[i]));
                r.sort_unstable();
                r
            })
            .find(&hits)
    } else {
        None
    };

    WitnessRecord {
        node: a,
        round: generation,
        row_helpers,
        helped_round,
        mates_and_helpers,
        row_helpers_best: row_dims.into_iter().max().unwrap_or(0),
    }
}

/// Decomposition of `dim(W_A ∩ W_L)` over the `r`-blocks of the sorted list
/// `L`. MBR: `dim(W_A ∩ W_L) = sum_i dim(W_A ∩ W_Ri)`. Interior: the
/// conditional form `dim(W_A ∩ W_L) = sum_{j>=2} I(W_A; W_Rj | W_R1)`.
/// A trailing block of fewer than `r` nodes is dropped from the right side,
/// as in the original statement.
pub fn check_lemma1(system: &StorageSystem, policy: &Sampling) -> Report {
    let p = *system.params();
    let max_l = match p.mode {
        Mode::Mbr => p.d,
        Mode::Interior => p.n - p.r,
    }
    .min(p.n - 1);
    let spans = Spans::new(system);
    let mut rng = policy.rng(Check::Lemma1);
    let population: u128 = p.n as u128 * (1..=max_l).map(|l| binomial(p.n - 1, l)).sum::<u128>();
    let cases: Vec<(usize, Vec<usize>)> = (0..policy.limit.min(10_000))
        .map(|_| {
            let a = rng.gen_range(1..=p.n);
            let l = rng.gen_range(1..=max_l);
            (a, random_subset(&mut rng, p.n, l, &[a]))
        })
        .collect();
    let values: Vec<(i64, i64)> = cases
        .par_iter()
        .map(|(a, list)| {
            let lhs = spans.overlap(*a, list) as i64;
            let blocks: Vec<&[usize]> = list.chunks(p.r).filter(|c| c.len() == p.r).collect();
            let rhs = match p.mode {
                Mode::Mbr => blocks.iter().map(|b| spans.overlap(*a, b) as i64).sum(),
                Mode::Interior => match blocks.split_first() {
                    Some((first, rest)) => rest.iter().map(|b| spans.cond_mi(&[*a], b, first)).sum(),
                    None => 0,
                },
            };
            (lhs, rhs)
        })
        .collect();
    let mut rep = report(system, Check::Lemma1, policy, population, cases.len());
    rep.extreme = values.iter().map(|(l, r)| (l - r).abs()).max().unwrap_or(0);
    rep.violations = cases
        .iter()
        .zip(&values)
        .filter(|(_, (l, r))| l != r)
        .map(|((a, list), (l, r))| Violation {
            groups: vec![vec![*a], list.clone()],
            measured: *l,
            expected: format!("{r}"),
        })
        .collect();
    rep
}

/// Every `k`-subset spans at least `B` dimensions.
pub fn check_dc(system: &StorageSystem, policy: &Sampling) -> Report {
    let p = *system.params();
    let spans = Spans::new(system);
    let mut rng = policy.rng(Check::Dc);
    let sets = node_subsets(p.n, p.k, policy, &mut rng);
    let dims: Vec<i64> = sets.par_iter().map(|s| spans.h(s)).collect();
    let mut rep = report(system, Check::Dc, policy, binomial(p.n, p.k), sets.len());
    rep.extreme = dims.iter().copied().min().unwrap_or(0);
    rep.violations = sets
        .iter()
        .zip(&dims)
        .filter(|(_, &d)| d < p.subpackets as i64)
        .map(|(s, &d)| Violation { groups: vec![s.clone()], measured: d, expected: format!(">= {}", p.subpackets) })
        .collect();
    rep
}

pub fn run_check(system: &StorageSystem, check: Check, policy: &Sampling) -> Report {
    match check {
        Check::L1 => check_l1(system, policy),
        Check::L2 => check_l2(system, policy),
        Check::L3 => check_l3(system, policy),
        Check::L4 => check_l4(system, policy),
        Check::Lemma1 => check_lemma1(system, policy),
        Check::Dc => check_dc(system, policy),
    }
}

pub fn run_checks(system: &StorageSystem, checks: &[Check], policy: &Sampling) -> Vec<Report> {
    checks.iter().map(|&c| run_check(system, c, policy)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate_params, ParamSpec};
    use crate::system::build_system;

    fn small(mode: Mode) -> StorageSystem {
        // n=6, k=2, d=4, r=2 over GF(16), m = d * alpha
        let spec = ParamSpec::new(6, 2, 4, 2, mode).with_base_bits(4);
        build_system(&validate_params(&spec).unwrap(), b"abc").unwrap()
    }

    #[test]
    fn populations() {
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(12, 8), 495);
        assert_eq!(binomial(3, 5), 0);
        let p = validate_params(&ParamSpec::new(12, 8, 10, 2, Mode::Mbr)).unwrap();
        // n * sum_b C(11, b) (2^b - 2), b = 2..=10
        let expected: u128 = 12 * (2..=10).map(|b| binomial(11, b) * ((1 << b) - 2)).sum::<u128>();
        assert_eq!(partition_population(&p), expected);
    }

    #[test]
    fn enumeration_skips_the_anchor() {
        let policy = Sampling::exhaustive(0);
        let mut rng = policy.rng(Check::L4);
        let (pop, cases) = node_and_subsets(4, 2, &policy, &mut rng);
        assert_eq!(pop, 12);
        assert_eq!(cases.len(), 12);
        assert!(cases.iter().all(|(a, r)| !r.contains(a) && r.iter().all(|&i| (1..=4).contains(&i))));
    }

    #[test]
    fn fresh_small_systems_pass_l1_and_dc() {
        for mode in [Mode::Mbr, Mode::Interior] {
            let sys = small(mode);
            let policy = Sampling::new(1);
            assert!(check_l1(&sys, &policy).passed(), "{mode}");
            assert!(check_dc(&sys, &policy).passed(), "{mode}");
        }
    }

    #[test]
    fn cloned_node_breaks_l1_and_l2() {
        let mut sys = small(Mode::Mbr);
        let copy = sys.node(1).unwrap().clone();
        let target = sys.node_mut(2).unwrap();
        target.stored = copy.stored;
        target.codeword = copy.codeword;
        let policy = Sampling::new(1);
        let l1 = check_l1(&sys, &policy);
        assert!(l1.violations.iter().any(|v| v.groups == vec![vec![1], vec![2]]));
        assert!(!check_l2(&sys, &policy).passed());
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.to_string().parse::<Check>().unwrap(), c);
        }
        assert!("l5".parse::<Check>().is_err());
    }
}
