//! Envy graphs and cycle rotation on a random instance.
//!
//!     cargo run --release --example envy_cycles

use efx_core::fairness::{eliminate_envy_cycles, envy_graph, Allocation};
use efx_core::RankValuation;

fn main() {
    let (n, m) = (4, 8);
    let vals: Vec<RankValuation> = (0..n).map(|i| RankValuation::random(m, 11 + i as u64).unwrap()).collect();
    // agent i gets goods i, i+n, ...
    let owners: Vec<usize> = (0..m).map(|g| (g + 3) % n).collect();
    let x = Allocation::from_owners(n, &owners);
    let g = envy_graph(&x, &vals).unwrap();
    println!("start: {:?}", x.bundles().iter().map(|b| b.to_string()).collect::<Vec<_>>());
    println!("envy edges: {:?}", g.edges().collect::<Vec<_>>());
    let (y, rotations) = eliminate_envy_cycles(&x, &vals).unwrap();
    let h = envy_graph(&y, &vals).unwrap();
    println!("after {rotations} rotation(s): {:?}", y.bundles().iter().map(|b| b.to_string()).collect::<Vec<_>>());
    println!("envy edges: {:?}, acyclic: {}", h.edges().collect::<Vec<_>>(), h.find_cycle().is_none());
}
