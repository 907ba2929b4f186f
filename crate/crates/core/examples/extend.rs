//! Lifts the three-agent instance to four and five agents and confirms that
//! no EFX allocation appears.
//!
//!     cargo run --release --example extend

use std::time::Instant;

use efx_core::constructions::{add_dummy_goods, extend_counterexample};
use efx_core::data::counterexample8;
use efx_core::decode_verify::{verify, VerifyOptions};
use efx_core::RankValuation;

fn main() {
    let base = counterexample8();
    for n in [4, 5] {
        let t = Instant::now();
        let vals = extend_counterexample(&base, n).unwrap();
        let r = verify(&vals, VerifyOptions::default()).unwrap();
        println!(
            "{n} agents, {} goods: {} EFX allocations among {} ({:.2?})",
            vals[0].m(),
            r.efx_count,
            r.scanned,
            t.elapsed()
        );
    }
    let real: Vec<_> = base.iter().map(RankValuation::to_real).collect();
    for extra in 1..=2 {
        let vals = add_dummy_goods(&real, extra).unwrap();
        let r = verify(&vals, VerifyOptions::default()).unwrap();
        println!("3 agents with {extra} worthless good(s): {} EFX allocations among {}", r.efx_count, r.scanned);
    }
}
