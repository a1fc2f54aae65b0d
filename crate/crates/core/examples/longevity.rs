//! A short longevity campaign: random failures, checkpointed property checks,
//! and random collections at the end.

use regen::longevity::{run_longevity, LongevityConfig};
use regen::params::{validate_params, Mode, ParamSpec};
use regen::properties::Check;
use regen::system::build_system;

fn main() {
    let rounds = std::env::args().nth(1).map_or(10, |s| s.parse().expect("round count"));
    let params = validate_params(&ParamSpec::new(12, 8, 10, 2, Mode::Mbr)).unwrap();
    let mut system = build_system(&params, b"longevity campaign").unwrap();
    let mut cfg = LongevityConfig::new(rounds, 20, 7);
    cfg.checks = vec![Check::L1, Check::Dc];
    let summary = run_longevity(&mut system, &cfg, |round, failed, outcome| match outcome {
        Ok(rec) => println!("round {round}: failed {failed:?}, {} symbols", rec.bandwidth_symbols),
        Err(e) => println!("round {round}: failed {failed:?}, aborted: {e}"),
    });
    for c in &summary.checkpoints {
        println!("checkpoint after {} rounds: {}", c.round, if c.passed() { "pass" } else { "fail" });
    }
    println!("collections bit-exact: {}/{}", summary.collections_bit_exact, summary.collections.len());
    println!("transfer-only histogram: {:?}", summary.transfer_only_histogram);
}
