//! Realizes each ordinal valuation of the bundled instance as an exact
//! submodular set function and checks the result.
//!
//!     cargo run --release --example submodular

use efx_core::constructions::{is_submodular, submodular_realize, DyadicValuation};
use efx_core::data::counterexample8;
use efx_core::GoodSet;
use num_rational::BigRational;
use num_traits::One;

fn main() {
    for (i, v) in counterexample8().iter().enumerate() {
        let f = submodular_realize(v);
        // f(all) = 1 − 2^−N for the top-ranked set
        let gap = BigRational::one() - f.as_fraction(GoodSet::full(8));
        println!(
            "agent {i}: submodular = {}, f(g0) = {}, 1 − f(all) = 2^-{}",
            is_submodular(&f).is_ok(),
            f.as_fraction(GoodSet::singleton(0)),
            gap.denom().bits() - 1
        );
    }
    // complementary goods: f({g0,g1}) far above f(g0) + f(g1)
    let f = DyadicValuation::from_raw(2, [0u32, 1, 1, 5].map(Into::into).to_vec()).unwrap();
    let w = is_submodular(&f).unwrap_err();
    println!("supermodular table rejected: adding g{} to {} gains more than adding it to {}", w.good, w.t, w.s);
}
