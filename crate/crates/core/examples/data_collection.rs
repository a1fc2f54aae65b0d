//! Reconstruct a file from k nodes, before and after a repair round.

use regen::collector::{collect, dc_dimension};
use regen::params::{validate_params, Mode, ParamSpec};
use regen::repair::execute_round;
use regen::system::build_system;

fn main() {
    let params = validate_params(&ParamSpec::new(12, 8, 10, 2, Mode::Mbr)).unwrap();
    let data = b"Any k nodes hold enough independent points to interpolate the file.".to_vec();
    let mut system = build_system(&params, &data).unwrap();
    let nodes = [1, 3, 5, 7, 9, 10, 11, 12];

    let report = |label: &str, system: &regen::system::StorageSystem| {
        let dim = dc_dimension(system, &nodes).unwrap();
        match collect(system, &nodes) {
            Ok(bytes) => println!("{label}: dimension {dim}, bit-exact {}", bytes == data),
            Err(e) => println!("{label}: dimension {dim}, {e}"),
        }
    };
    report("fresh", &system);
    execute_round(&mut system, &[11, 12], None).unwrap();
    report("after repairing 11, 12", &system);
}
