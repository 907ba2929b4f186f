//! The three-agent, eight-good instance without an EFX allocation.

use crate::decode_verify::threevals::load_threevals;
use crate::goodset::GoodSet;
use crate::valuation::RankValuation;

const COUNTEREXAMPLE8: &str = include_str!("../data/counterexample8.txt");

/// Raw rank tables in the three-block text format.
pub fn counterexample8_text() -> &'static str {
    COUNTEREXAMPLE8
}

/// The three valuations, loaded and checked.
pub fn counterexample8() -> Vec<RankValuation> {
    let vals = load_threevals(COUNTEREXAMPLE8, 3, 8).expect("bundled tables are valid");
    let spot = [(0, 5, 54), (1, 16, 1), (2, 64, 1)];
    for (agent, set, rank) in spot {
        assert_eq!(vals[agent].rank(GoodSet::from_bits(set)), rank);
    }
    vals
}
