//! Runs the three-agent algorithm, which always returns an allocation that
//! is tEFX or both EF1 and EEFX, on random instances and on the bundled one.
//!
//!     cargo run --release --example three_agents -- 7 500

use std::collections::BTreeMap;

use efx_core::data::counterexample8;
use efx_core::tri_solver::{solve_three, verify_result};
use efx_core::RankValuation;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let m = args.first().copied().unwrap_or(6);
    let runs = args.get(1).copied().unwrap_or(200) as u64;

    let mut paths: BTreeMap<String, usize> = BTreeMap::new();
    for seed in 0..runs {
        let vals: Vec<RankValuation> = (0..3).map(|i| RankValuation::random(m, 3 * seed + i).unwrap()).collect();
        let r = solve_three(&vals).expect("algorithm terminates");
        assert!(verify_result(&vals, &r));
        *paths.entry(format!("{} via {:?}", r.tag, r.steps)).or_default() += 1;
    }
    println!("{runs} random instances with {m} goods:");
    for (path, n) in paths {
        println!("  {n:>5}  {path}");
    }

    let ce = counterexample8();
    let r = solve_three(&ce).unwrap();
    println!("bundled instance (no EFX allocation exists): {}", r.tag);
    for (i, b) in r.allocation.bundles().iter().enumerate() {
        println!("  agent {i}: {b}");
    }
}
