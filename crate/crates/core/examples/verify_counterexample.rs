//! Checks all 5796 allocations of the bundled eight-good instance and shows
//! how close the best ones come to EFX.
//!
//!     cargo run --release --example verify_counterexample

use efx_core::alloc_enum::enumerate_allocations;
use efx_core::data::counterexample8;
use efx_core::decode_verify::{verify, VerifyOptions};
use efx_core::fairness::{strongly_envies, violated_condition_count};

fn main() {
    let vals = counterexample8();
    let report = verify(&vals, VerifyOptions::default()).unwrap();
    print!("{}", report.to_text());

    println!("\nallocations violating a single condition (first 5):");
    let near = enumerate_allocations(3, 8)
        .unwrap()
        .filter(|x| violated_condition_count(x, &vals).unwrap() == 1)
        .take(5);
    for x in near {
        let b = x.bundles();
        let (i, j) = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && strongly_envies(&vals[i], b[i], b[j]).unwrap())
            .unwrap();
        println!("  {} {} {}   agent {i} strongly envies agent {j}", b[0], b[1], b[2]);
    }
}
