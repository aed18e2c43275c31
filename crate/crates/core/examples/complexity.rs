//! Operator taxonomy and leading-term operation counts at one problem size.

use radconv::analyzer::{complexity_estimate, taxonomy_table, ComplexitySizes};

fn main() {
    // 14 x 14 tokens, 3 x 3 kernel, 5 x 5 regions, 64 channels, 7 x 7 attention window.
    let sizes = ComplexitySizes {
        n: 196,
        k: 9,
        r: 5,
        d: 64,
        w: 7,
    };
    println!(
        "{:<18} {:<19} {:<7} {:<9} {:>10}",
        "operator", "window", "size", "long", "ops"
    );
    for row in taxonomy_table() {
        let est = complexity_estimate(row.operator, sizes);
        println!(
            "{:<18} {:<19} {:<7} {:<9} {:>10}  ({})",
            row.operator.name(),
            row.window.name(),
            row.window_size,
            row.long_range,
            est.count,
            est.expression
        );
    }
}
