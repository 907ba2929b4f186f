use efx_core::encoder::{encode, EncodeOptions};
use efx_core::satlite::{preprocess, solve, SolveResult};

#[test]
fn reduction_of_six_goods_level_four() {
    let (f, stats) = encode(&EncodeOptions::new(6).level(4).item_order(true)).unwrap();
    assert_eq!(stats.total_clauses, 189735);
    let p = preprocess(&f);
    assert!(!p.unsat);
    assert_eq!(p.formula.num_clauses(), 43813);
}

#[test]
fn four_goods_always_admit_efx() {
    let (f, _) = encode(&EncodeOptions::new(4).level(2).item_order(true)).unwrap();
    assert_eq!(solve(&f, None), SolveResult::Unsat);
}

#[test]
fn five_goods_always_admit_efx() {
    for opts in [EncodeOptions::new(5).level(2).item_order(true), EncodeOptions::new(5).item_order(true)] {
        let (f, _) = encode(&opts).unwrap();
        assert_eq!(solve(&f, None), SolveResult::Unsat);
    }
}

#[test]
fn six_goods_always_admit_efx() {
    let (f, _) = encode(&EncodeOptions::new(6).item_order(true)).unwrap();
    assert_eq!(solve(&f, None), SolveResult::Unsat);
}

#[test]
fn reductions_of_six_and_seven_goods() {
    for (m, k, item, clauses) in [(6, 5, false, 110520), (6, 4, false, 47310), (7, 5, true, 680779)] {
        let (f, _) = encode(&EncodeOptions::new(m).level(k).item_order(item)).unwrap();
        assert_eq!(preprocess(&f).formula.num_clauses(), clauses, "m={m} k={k}");
    }
}

// about 20 s in release mode
#[test]
#[ignore]
fn reduction_of_eight_goods_level_six() {
    let (f, stats) = encode(&EncodeOptions::new(8).level(6).item_order(true)).unwrap();
    assert_eq!(stats.total_clauses, 29002318);
    assert_eq!(preprocess(&f).formula.num_clauses(), 8138126);
}
