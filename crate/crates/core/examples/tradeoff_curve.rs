//! Normalized operating points for a few parameter sets, as CSV.

use regen::tradeoff::{to_csv, tradeoff_points};

fn main() {
    for (n, k, d, r) in [(12, 8, 10, 2), (10, 4, 6, 2), (9, 3, 6, 3)] {
        println!("# n={n} k={k} d={d} r={r}");
        print!("{}", to_csv(&tradeoff_points(n, k, d, r).unwrap()));
    }
}
