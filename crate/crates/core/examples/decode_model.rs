//! Round trip between valuations and SAT models: the bundled instance is
//! written as a model, checked against the m = 8 formula and decoded again.
//!
//!     cargo run --release --example decode_model

use efx_core::cnf::Lit;
use efx_core::data::counterexample8;
use efx_core::decode_verify::{decode_valuations, encode_assignment};
use efx_core::encoder::{emit, EncodeOptions};
use efx_core::satlite::parse_model;

fn main() {
    let vals = counterexample8();
    let model = encode_assignment(&vals).unwrap();
    let text = model.to_model_text(20);
    println!("model: {} variables, {} bytes of v-lines", model.num_vars(), text.len());

    let parsed = parse_model(&text, model.num_vars()).unwrap();
    let mut falsified = 0u64;
    let stats = emit(&EncodeOptions::new(8).level(6).item_order(true), &mut |c: &[Lit]| {
        if !c.iter().any(|&l| parsed.lit_value(l) == Some(true)) {
            falsified += 1;
        }
    })
    .unwrap();
    println!("clauses of the m=8 formula: {}, falsified by the model: {falsified}", stats.total_clauses);

    let back = decode_valuations(&parsed, 8).unwrap();
    println!("decoded valuations equal the originals: {}", back == vals);
}
