use efx_core::data::counterexample8;
use efx_core::decode_verify::{
    count_mms_violations, find_mms_violations, marginal_values, verify, VerifyOptions,
};
use efx_core::GoodSet;

#[test]
fn no_efx_allocation() {
    let vals = counterexample8();
    let r = verify(&vals, VerifyOptions::default()).unwrap();
    assert!(r.all_monotone());
    assert_eq!(r.scanned, 5796);
    assert_eq!(r.efx_count, 0);
    assert_eq!(r.violations(1), 272);
}

#[test]
fn marginals_of_first_good() {
    let v0 = &counterexample8()[0];
    let four = marginal_values(v0, 0, 4).unwrap();
    assert_eq!((four[0], *four.last().unwrap()), (11, 131));
    let three = marginal_values(v0, 0, 3).unwrap();
    assert_eq!(&three[..5], &[1, 1, 1, 1, 3]);
    assert!(three.contains(&10));
}

#[test]
fn mms_violations_of_first_agent() {
    let v0 = &counterexample8()[0];
    let all = find_mms_violations(v0, None);
    let s = |g: &[usize]| GoodSet::from_goods(g.iter().copied());
    let q = all
        .iter()
        .find(|q| q.a == s(&[1, 2]) && q.b == s(&[0, 4, 7]) && q.c == s(&[2, 4]) && q.d == s(&[0, 1, 7]))
        .expect("listed quadruple");
    assert_eq!(q.values(v0), [77, 59, 40, 53]);
    assert_eq!(count_mms_violations(v0), 1363);
}
