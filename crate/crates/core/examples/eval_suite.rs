//! Grade the bundled evaluation suite against its recorded outputs and print
//! the match-level table with an Agresti-Coull interval.
//!
//! cargo run --example eval_suite

use odsl::eval::{builtin_suite, offline_outputs, run_suite, GradeOptions, SuiteOptions};

fn main() {
    let suite = builtin_suite();
    let report = run_suite(&suite, offline_outputs, SuiteOptions::default()).unwrap();
    print!("{}", report.render());

    let strict = SuiteOptions { grade: GradeOptions { strict: true }, workers: Some(2) };
    let report = run_suite(&suite, offline_outputs, strict).unwrap();
    println!("\nstrict grading (no subprogram levels):\n{}", report.table_row());
}
