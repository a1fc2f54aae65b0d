//! Build the (12, 8, 10, 2) MBR system and repair nodes 11 and 12.

use regen::params::{validate_params, Mode, ParamSpec};
use regen::repair::execute_round;
use regen::system::build_system;

fn main() {
    let params = validate_params(&ParamSpec::new(12, 8, 10, 2, Mode::Mbr)).unwrap();
    println!("alpha {} B {} m {} stripe capacity {} bytes", params.alpha, params.subpackets, params.m, params.stripe_capacity());
    let data: Vec<u8> = (0..params.stripe_capacity()).map(|i| (i * 31 % 251) as u8).collect();
    let mut system = build_system(&params, &data).unwrap();

    let round = execute_round(&mut system, &[11, 12], None).unwrap();
    println!("round {}: helpers {:?}", round.round_id, round.helpers);
    println!("broadcast {} symbols = {} bits, rank {}", round.bandwidth_symbols, round.bandwidth_bits, round.broadcast_rank);
    println!("transfer-only fraction {:.2}", round.transfer_only_fraction());
    for row in &round.layout {
        println!("  {row:?}");
    }
    assert!(system.all_points_on_polynomial());
}
