//! Prints the threshold column of every bundled cluster next to its tabulated values.

use std::time::Instant;

use dualthresh_core::cluster::catalog::builtin_entries;
use dualthresh_core::tables::LOSS_RATES;
use dualthresh_core::{sweep, SolveOptions};

fn main() {
    let opts = SolveOptions { tol: 1e-9, ..SolveOptions::default() };
    for entry in builtin_entries() {
        let start = Instant::now();
        let rows = sweep(entry.channel, &entry.spec, &LOSS_RATES, &opts);
        let elapsed = start.elapsed();
        let mut worst: f64 = 0.0;
        print!("{:>6} {:>12}", entry.spec.name(), entry.channel);
        for (row, reference) in rows.iter().zip(entry.reference) {
            let r = row.as_ref().expect("solve");
            worst = worst.max((r.p_c - reference).abs());
            print!("  {:.5}", r.p_c);
        }
        println!("  max|dev| = {worst:.1e}  ({:.2?})", elapsed);
    }
}
