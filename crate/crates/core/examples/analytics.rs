//! Marginal values and MMS violations of the bundled instance.
//!
//!     cargo run --release --example analytics

use efx_core::data::counterexample8;
use efx_core::decode_verify::{count_mms_violations, find_mms_violations, marginal_values};

fn main() {
    let vals = counterexample8();
    let v0 = &vals[0];
    println!("marginal value of g0 for agent 0, by size of S ∪ {{g0}}:");
    for size in 1..=8 {
        let mv = marginal_values(v0, 0, size).unwrap();
        println!("  {size}: {:>3} sets, min {:>3}, max {:>3}", mv.len(), mv[0], mv[mv.len() - 1]);
    }
    for (i, v) in vals.iter().enumerate() {
        println!("agent {i}: {} MMS violations, e.g.", count_mms_violations(v));
        for q in find_mms_violations(v, Some(3)) {
            let [a, b, c, d] = q.values(v);
            println!("  min({}: {a}, {}: {b}) > max({}: {c}, {}: {d})", q.a, q.b, q.c, q.d);
        }
    }
}
