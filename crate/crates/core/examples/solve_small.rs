//! Proves EFX existence for three agents and up to six goods with the
//! built-in preprocessor and CDCL solver.
//!
//!     cargo run --release --example solve_small

use std::time::Instant;

use efx_core::encoder::{encode, EncodeOptions};
use efx_core::satlite::{preprocess, solve_with_stats, SolveResult};

fn main() {
    for (m, k) in [(4, 2), (5, 3), (5, 0), (6, 4), (6, 0)] {
        let mut opts = EncodeOptions::new(m).item_order(true);
        if k > 0 {
            opts = opts.level(k);
        }
        let t = Instant::now();
        let (f, stats) = encode(&opts).unwrap();
        let p = preprocess(&f);
        let (answer, s) = if p.unsat {
            (SolveResult::Unsat, Default::default())
        } else {
            solve_with_stats(&p.formula, None)
        };
        let verdict = match answer {
            SolveResult::Unsat => "UNSAT: every instance has an EFX allocation",
            SolveResult::Sat(_) => "SAT: counterexample found",
            SolveResult::Unknown => "unknown",
        };
        println!(
            "m={m} k={k}: {} clauses, {} after preprocessing, {} conflicts, {:.2?}  {verdict}",
            stats.total_clauses,
            p.formula.num_clauses(),
            s.conflicts,
            t.elapsed()
        );
    }
}
