//! Longevity campaigns: many random repair rounds, periodic property checks,
//! and random collections at the end.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::collector::collect;
use crate::params::Mode;
use crate::properties::{run_check, Check, Report, Sampling};
use crate::repair::{execute_round, RepairError, RepairRound};
use crate::system::StorageSystem;

#[derive(Debug, Clone)]
pub struct LongevityConfig {
    pub rounds: usize,
    pub collect_samples: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub sampling: Sampling,
    /// Checks enumerated in full at every checkpoint, whatever the sample limit.
    pub exhaustive: Vec<Check>,
}

impl LongevityConfig {
    pub fn new(rounds: usize, collect_samples: usize, seed: u64) -> Self {
        Self { rounds, collect_samples, seed, checks: Check::ALL.to_vec(), sampling: Sampling::new(seed), exhaustive: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AbortedRound {
    pub round: usize,
    pub failed: Vec<usize>,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Checkpoint {
    /// Rounds attempted before the checkpoint.
    pub round: usize,
    pub reports: Vec<Report>,
}

impl Checkpoint {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CollectionOutcome {
    pub nodes: Vec<usize>,
    pub bit_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LongevitySummary {
    pub mode: Mode,
    pub seed: u64,
    pub rounds_requested: usize,
    pub rounds_completed: usize,
    pub aborted: Vec<AbortedRound>,
    pub bandwidth_symbols_total: u64,
    pub bandwidth_bits_total: u64,
    /// Rounds whose broadcast was not exactly `r d` symbols.
    pub bandwidth_mismatches: usize,
    /// Counts of rounds by transfer-only fraction, in tenths: bucket `i`
    /// holds fractions in `[i/10, (i+1)/10)`, the last bucket includes 1.
    pub transfer_only_histogram: [usize; 10],
    pub checkpoints: Vec<Checkpoint>,
    pub collections: Vec<CollectionOutcome>,
    pub collections_bit_exact: usize,
}

impl LongevitySummary {
    pub fn passed(&self) -> bool {
        self.aborted.is_empty()
            && self.bandwidth_mismatches == 0
            && self.checkpoints.iter().all(Checkpoint::passed)
            && self.collections_bit_exact == self.collections.len()
    }
}

fn checkpoint_rounds(t: usize) -> Vec<usize> {
    let mut v = vec![0, t / 2, t];
    v.dedup();
    v
}

/// Uniformly random `size`-subset of `1..=n`, sorted.
pub fn random_nodes(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    let mut v: Vec<usize> = sample(rng, n, size).into_iter().map(|i| i + 1).collect();
    v.sort_unstable();
    v
}

/// Runs the campaign. `on_round` sees every attempted round in order.
pub fn run_longevity<F>(system: &mut StorageSystem, cfg: &LongevityConfig, mut on_round: F) -> LongevitySummary
where
    F: FnMut(usize, &[usize], &Result<RepairRound, RepairError>),
{
    let p = *system.params();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let checkpoints_at = checkpoint_rounds(cfg.rounds);
    let mut summary = LongevitySummary {
        mode: p.mode,
        seed: cfg.seed,
        rounds_requested: cfg.rounds,
        rounds_completed: 0,
        aborted: Vec::new(),
        bandwidth_symbols_total: 0,
        bandwidth_bits_total: 0,
        bandwidth_mismatches: 0,
        transfer_only_histogram: [0; 10],
        checkpoints: Vec::new(),
        collections: Vec::new(),
        collections_bit_exact: 0,
    };

    for round in 0..=cfg.rounds {
        if round > 0 {
            let failed = random_nodes(&mut rng, p.n, p.r);
            let outcome = execute_round(system, &failed, None);
            on_round(round, &failed, &outcome);
            match outcome {
                Ok(rec) => {
                    summary.rounds_completed += 1;
                    summary.bandwidth_symbols_total += rec.bandwidth_symbols as u64;
                    summary.bandwidth_bits_total += rec.bandwidth_bits;
                    if rec.bandwidth_symbols != p.bandwidth_symbols() {
                        summary.bandwidth_mismatches += 1;
                    }
                    let bucket = ((rec.transfer_only_fraction() * 10.0) as usize).min(9);
                    summary.transfer_only_histogram[bucket] += 1;
                }
                Err(e) => summary.aborted.push(AbortedRound { round, failed, error: e.to_string() }),
            }
        }
        if checkpoints_at.contains(&round) {
            let sampling = Sampling { seed: cfg.sampling.seed ^ round as u64, ..cfg.sampling };
            let full = Sampling::exhaustive(sampling.seed);
            let reports = cfg
                .checks
                .iter()
                .map(|&c| run_check(system, c, if cfg.exhaustive.contains(&c) { &full } else { &sampling }))
                .collect();
            summary.checkpoints.push(Checkpoint { round, reports });
        }
    }

    let original = system.oracle_file().ok();
    let subsets: Vec<Vec<usize>> = (0..cfg.collect_samples).map(|_| random_nodes(&mut rng, p.n, p.k)).collect();
    let sys = &*system;
    summary.collections = subsets
        .into_par_iter()
        .map(|nodes| match collect(sys, &nodes) {
            Ok(bytes) => CollectionOutcome { bit_exact: Some(&bytes) == original.as_ref(), nodes, error: None },
            Err(e) => CollectionOutcome { nodes, bit_exact: false, error: Some(e.to_string()) },
        })
        .collect();
    summary.collections_bit_exact = summary.collections.iter().filter(|c| c.bit_exact).count();
    summary
}
