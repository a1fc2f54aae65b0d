//! Run the structural property checks on a fresh system and print a summary.

use regen::params::{validate_params, Mode, ParamSpec};
use regen::properties::{run_checks, Check, Sampling};
use regen::system::build_system;

fn main() {
    let mode = std::env::args().nth(1).map_or(Mode::Mbr, |s| s.parse().expect("mbr or interior"));
    let params = validate_params(&ParamSpec::new(12, 8, 10, 2, mode)).unwrap();
    let system = build_system(&params, b"property checks").unwrap();
    for report in run_checks(&system, &Check::ALL, &Sampling::new(7)) {
        println!(
            "{:<7} {:<10} population {:>6} sampled {:>5} violations {:>4} extreme {}",
            report.check.to_string(),
            report.mode,
            report.population,
            report.sampled,
            report.violations.len(),
            report.extreme
        );
    }
}
