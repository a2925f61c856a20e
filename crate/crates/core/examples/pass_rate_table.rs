//! Recompute pass-rate intervals from published match-level counts.
//!
//! cargo run --example pass_rate_table

use odsl::eval::{ablation_rows, EvalReport};

fn main() {
    println!("| Variant {}", EvalReport::table_header());
    for row in ablation_rows() {
        let computed = row.report();
        println!("| {} {}", row.label(), computed.table_row());
        println!(
            "|   reported {} (computed {:.4} ± {:.4})",
            row.pass_rate, computed.pass_rate.center, computed.pass_rate.halfwidth
        );
    }
}
