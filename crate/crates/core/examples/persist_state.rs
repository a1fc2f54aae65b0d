//! Save a repaired system to JSON and load it back.

use regen::params::{validate_params, Mode, ParamSpec};
use regen::repair::execute_round;
use regen::state;
use regen::system::build_system;

fn main() {
    let params = validate_params(&ParamSpec::new(12, 8, 10, 2, Mode::Mbr)).unwrap();
    let mut system = build_system(&params, b"persisted").unwrap();
    execute_round(&mut system, &[3, 4], None).unwrap();

    let text = state::to_json(&system, 42);
    println!("state: {} bytes of JSON", text.len());
    let (loaded, seed) = state::from_json(&text).unwrap();
    assert_eq!(seed, 42);
    assert_eq!(loaded.nodes(), system.nodes());
    assert_eq!(loaded.history(), system.history());
    println!("round trip preserved {} nodes and {} rounds", loaded.nodes().len(), loaded.history().len());
}
